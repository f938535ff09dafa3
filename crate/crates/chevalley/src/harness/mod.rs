//! Verification plans, the check registry, and report emission.
//!
//! A plan is a line-oriented `key=value` file; each non-empty, non-comment
//! line describes one instance of a registered check. Reports are JSON with
//! per-instance verdicts: `PASS`, `FAIL`, `SKIPPED` (a hypothesis of the
//! statement fails on the instance; an exploratory run is still recorded) or
//! `CAPPED` (the sets involved exceed the element cap).

mod checks;

use crate::chevbasis::StructureTable;
use crate::group::{GroupCtx, RepKind, Representation};
use crate::ring::{FiniteRing, Ideal, RingElt};
use crate::roots::RootSystem;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;
use thiserror::Error;

pub use checks::subgroup_by_descriptor;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("line {0}: {1}")]
    BadLine(usize, String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("missing parameter `{0}`")]
    MissingParam(String),
    #[error("bad parameter `{0}`: {1}")]
    BadParam(String, String),
}

/// One parsed plan instance.
#[derive(Debug, Clone)]
pub struct PlanInstance {
    pub check: String,
    pub params: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub label: String,
    pub cap: usize,
    pub instances: Vec<PlanInstance>,
}

pub const REGISTERED_CHECKS: &[&str] = &[
    "structure",
    "steinberg",
    "order",
    "weights",
    "gauss",
    "z-generators",
    "perfectness",
    "level-absorb",
    "level-sum",
    "level-upper",
    "level-lower",
    "level-congruence",
    "mixed-commutator-c",
    "mixed-commutator-g",
    "comaximal-level",
    "conjugation-bounds",
    "commutator-bounds",
    "chain",
    "localization",
    "congruence-chain",
];

/// Parse a plan file: one instance per line as `check=name key=value ...`;
/// a bare `cap=N` line changes the cap for subsequent instances.
pub fn parse_plan(label: &str, text: &str) -> Result<Plan, PlanError> {
    let mut plan = Plan { label: label.to_string(), cap: crate::subgroups::DEFAULT_CAP, instances: Vec::new() };
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut kv = BTreeMap::new();
        for tok in line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| PlanError::BadLine(no + 1, format!("token `{tok}`")))?;
            kv.insert(k.to_string(), v.to_string());
        }
        if let Some(cap) = kv.get("cap") {
            if kv.len() == 1 {
                plan.cap = cap
                    .parse()
                    .map_err(|_| PlanError::BadLine(no + 1, "bad cap".into()))?;
                continue;
            }
        }
        let check = kv
            .remove("check")
            .ok_or_else(|| PlanError::BadLine(no + 1, "missing check=".into()))?;
        if !REGISTERED_CHECKS.contains(&check.as_str()) {
            return Err(PlanError::UnknownCheck(check));
        }
        plan.instances.push(PlanInstance { check, params: kv });
    }
    Ok(plan)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "SKIPPED")]
    Skipped,
    #[serde(rename = "CAPPED")]
    Capped,
}

#[derive(Debug, Clone, Serialize)]
pub struct InstanceReport {
    pub check: String,
    pub system: String,
    pub ring: String,
    pub params: BTreeMap<String, String>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploratory: Option<String>,
    pub sizes: BTreeMap<String, usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness_digests: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub millis: u128,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub plan: String,
    pub instances: Vec<InstanceReport>,
}

impl Report {
    /// Exit-code contract: a `FAIL` whose hypotheses hold is a hard error.
    pub fn exit_code(&self) -> i32 {
        if self.instances.iter().any(|i| i.verdict == Verdict::Fail) {
            1
        } else {
            0
        }
    }

    pub fn summary(&self) -> String {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for i in &self.instances {
            let key = match i.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Skipped => "SKIPPED",
                Verdict::Capped => "CAPPED",
            };
            *counts.entry(key).or_default() += 1;
        }
        let parts: Vec<String> = counts.iter().map(|(k, v)| format!("{v} {k}")).collect();
        format!("{} instances: {}", self.instances.len(), parts.join(", "))
    }
}

/// Shared construction cache so repeated instances reuse structure tables
/// and representations.
pub struct Workspace {
    tables: Mutex<BTreeMap<String, Arc<StructureTable>>>,
    rings: Mutex<BTreeMap<String, Arc<FiniteRing>>>,
}

static WORKSPACE: OnceLock<Workspace> = OnceLock::new();

impl Workspace {
    pub fn get() -> &'static Workspace {
        WORKSPACE.get_or_init(|| Workspace {
            tables: Mutex::new(BTreeMap::new()),
            rings: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn table(&self, system: &str) -> Result<Arc<StructureTable>, PlanError> {
        let key = system.to_ascii_uppercase();
        let mut map = self.tables.lock().unwrap();
        if let Some(t) = map.get(&key) {
            return Ok(t.clone());
        }
        let rs = RootSystem::parse(system)
            .map_err(|e| PlanError::BadParam("system".into(), e.to_string()))?;
        let t = StructureTable::new(rs);
        map.insert(key, t.clone());
        Ok(t)
    }

    pub fn ring(&self, spec: &str) -> Result<Arc<FiniteRing>, PlanError> {
        let mut map = self.rings.lock().unwrap();
        if let Some(r) = map.get(spec) {
            return Ok(r.clone());
        }
        let r = FiniteRing::parse(spec)
            .map_err(|e| PlanError::BadParam("ring".into(), e.to_string()))?;
        map.insert(spec.to_string(), r.clone());
        Ok(r)
    }
}

/// Typed access to instance parameters.
pub struct Params<'a> {
    inst: &'a PlanInstance,
    pub cap: usize,
}

impl<'a> Params<'a> {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.inst.params.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, PlanError> {
        self.get(key).ok_or_else(|| PlanError::MissingParam(key.into()))
    }

    pub fn system(&self) -> Result<Arc<StructureTable>, PlanError> {
        Workspace::get().table(self.require("system")?)
    }

    pub fn ring(&self) -> Result<Arc<FiniteRing>, PlanError> {
        Workspace::get().ring(self.require("ring")?)
    }

    pub fn rep_kind(&self, default: RepKind) -> Result<RepKind, PlanError> {
        match self.get("rep") {
            None => Ok(default),
            Some("adjoint") => Ok(RepKind::Adjoint),
            Some("natural") => Ok(RepKind::Natural),
            Some(other) => Err(PlanError::BadParam("rep".into(), other.into())),
        }
    }

    pub fn ctx(&self, default_rep: RepKind) -> Result<Arc<GroupCtx>, PlanError> {
        let table = self.system()?;
        let ring = self.ring()?;
        let rep = match self.rep_kind(default_rep)? {
            RepKind::Adjoint => Representation::adjoint(table),
            RepKind::Natural => Representation::natural(table)
                .map_err(|e| PlanError::BadParam("rep".into(), e.to_string()))?,
        };
        Ok(GroupCtx::new(rep, ring))
    }

    /// Parse an ideal expression: `R`, `0`, `(g1,g2,...)` with ring-element
    /// generators.
    pub fn ideal(&self, key: &str, ring: &Arc<FiniteRing>) -> Result<Ideal, PlanError> {
        let src = self.require(key)?;
        parse_ideal(src, ring).map_err(|e| PlanError::BadParam(key.into(), e))
    }

    pub fn ideal_or(&self, key: &str, ring: &Arc<FiniteRing>, default: &Ideal) -> Result<Ideal, PlanError> {
        match self.get(key) {
            None => Ok(default.clone()),
            Some(_) => self.ideal(key, ring),
        }
    }

    pub fn elt(&self, key: &str, ring: &Arc<FiniteRing>) -> Result<RingElt, PlanError> {
        let src = self.require(key)?;
        ring.parse_elt(src).map_err(|e| PlanError::BadParam(key.into(), e.to_string()))
    }

    pub fn int(&self, key: &str, default: i64) -> Result<i64, PlanError> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| PlanError::BadParam(key.into(), v.into())),
        }
    }
}

pub fn parse_ideal(src: &str, ring: &Arc<FiniteRing>) -> Result<Ideal, String> {
    let s = src.trim();
    if s.eq_ignore_ascii_case("r") {
        return Ok(Ideal::unit(ring.clone()));
    }
    if s == "0" {
        return Ok(Ideal::zero(ring.clone()));
    }
    let inner = s
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| format!("expected R, 0 or (generators), got `{s}`"))?;
    let mut gens = Vec::new();
    for part in inner.split(',') {
        if part.trim().is_empty() {
            continue;
        }
        gens.push(ring.parse_elt(part).map_err(|e| e.to_string())?);
    }
    Ok(Ideal::new(ring.clone(), gens))
}

/// Run one instance; panics inside a check become a `FAIL` with detail.
pub fn run_instance(inst: &PlanInstance, cap: usize) -> InstanceReport {
    let start = Instant::now();
    let params = Params { inst, cap };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        checks::dispatch(&inst.check, &params)
    }));
    let mut report = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => checks::Outcome::fail(format!("configuration error: {e}")),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            checks::Outcome::fail(format!("panicked: {msg}"))
        }
    };
    report.sizes.retain(|_, v| *v != usize::MAX);
    InstanceReport {
        check: inst.check.clone(),
        system: inst.params.get("system").cloned().unwrap_or_default(),
        ring: inst.params.get("ring").cloned().unwrap_or_default(),
        params: inst.params.clone(),
        verdict: report.verdict,
        hypothesis: report.hypothesis,
        exploratory: report.exploratory,
        sizes: report.sizes,
        witness_digests: report.witness_digests,
        detail: report.detail,
        millis: start.elapsed().as_millis(),
    }
}

/// Run a whole plan, optionally across worker threads (instances are
/// independent; the report keeps plan order).
pub fn run_plan(plan: &Plan, threads: usize) -> Report {
    let n = plan.instances.len();
    let mut slots: Vec<Option<InstanceReport>> = Vec::new();
    slots.resize_with(n, || None);
    if threads <= 1 {
        for (i, inst) in plan.instances.iter().enumerate() {
            slots[i] = Some(run_instance(inst, plan.cap));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots_mx = Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..threads.min(n.max(1)) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if i >= n {
                        break;
                    }
                    let r = run_instance(&plan.instances[i], plan.cap);
                    slots_mx.lock().unwrap()[i] = Some(r);
                });
            }
        });
    }
    Report {
        plan: plan.label.clone(),
        instances: slots.into_iter().map(|s| s.expect("instance ran")).collect(),
    }
}

/// The bundled verification corpus: simply, doubly and triply laced types
/// over small local and semilocal rings, with hypothesis-violating instances
/// included as skipped-exploratory runs.
pub const PAPER_SUITE: &str = include_str!("paper_suite.plan");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_parsing() {
        let plan = parse_plan(
            "t",
            "# comment\n\ncap=5000\ncheck=order system=A2 ring=GF(2) rep=natural expect=168\n",
        )
        .unwrap();
        assert_eq!(plan.cap, 5000);
        assert_eq!(plan.instances.len(), 1);
        assert_eq!(plan.instances[0].check, "order");

        assert!(parse_plan("t", "check=unknown-thing\n").is_err());
        assert!(parse_plan("t", "system=A2\n").is_err());
    }

    #[test]
    fn empty_plan_runs() {
        let plan = parse_plan("empty", "").unwrap();
        let report = run_plan(&plan, 1);
        assert_eq!(report.exit_code(), 0);
        assert!(report.instances.is_empty());
    }

    #[test]
    fn order_check_pass_and_fail() {
        let plan = parse_plan(
            "orders",
            "check=order system=A2 ring=GF(2) rep=natural expect=168\n\
             check=order system=A2 ring=GF(2) rep=natural expect=167\n",
        )
        .unwrap();
        let report = run_plan(&plan, 1);
        assert_eq!(report.instances[0].verdict, Verdict::Pass);
        assert_eq!(report.instances[1].verdict, Verdict::Fail);
        assert_eq!(report.exit_code(), 1);
    }

    #[test]
    fn paper_suite_parses() {
        let plan = parse_plan("paper-suite", PAPER_SUITE).unwrap();
        assert!(plan.instances.len() > 30);
    }
}
