//! The registered checks.
//!
//! Each check evaluates the hypotheses of the statement it instantiates on
//! the given ring, runs the computation where feasible (pre-flighted against
//! the element cap with exact Gauss size formulas), and reports PASS/FAIL,
//! SKIPPED with an exploratory result, or CAPPED.

use super::{parse_ideal, Params, PlanError, Verdict};
use crate::calculus::{
    verify_chained_inclusions, verify_commutator_inclusion, verify_conjugation_inclusion,
    witness_mixed_commutator, witness_sum_level,
};
use crate::group::{Gen, GroupCtx, Mat, RepKind};
use crate::ring::{canonically_isomorphic, FiniteRing, Ideal};
use crate::roots::{LengthClass, TypeLabel};
use crate::subgroups::{
    closure, congruence_kernel_schreier, congruence_subgroup, elementary_level, ideal_add_gens,
    mixed_commutator, relative_elementary, relative_elementary_pair, set_product, torus_congruence,
    torus_elements, unipotent_set, x_gens, z_gens, SetData, SubgroupError, SubgroupHandle,
};
use indexmap::IndexSet;
use std::collections::BTreeMap;
use std::sync::Arc;

pub struct Outcome {
    pub verdict: Verdict,
    pub hypothesis: Option<String>,
    pub exploratory: Option<String>,
    pub sizes: BTreeMap<String, usize>,
    pub witness_digests: Vec<String>,
    pub detail: Option<String>,
}

impl Outcome {
    fn pass() -> Outcome {
        Outcome {
            verdict: Verdict::Pass,
            hypothesis: None,
            exploratory: None,
            sizes: BTreeMap::new(),
            witness_digests: Vec::new(),
            detail: None,
        }
    }

    pub fn fail(detail: String) -> Outcome {
        Outcome { verdict: Verdict::Fail, detail: Some(detail), ..Outcome::pass() }
    }

    fn capped(detail: String) -> Outcome {
        Outcome { verdict: Verdict::Capped, detail: Some(detail), ..Outcome::pass() }
    }

    fn from_bool(ok: bool, what: &str) -> Outcome {
        if ok {
            Outcome::pass()
        } else {
            Outcome::fail(format!("{what} failed"))
        }
    }
}

pub fn dispatch(check: &str, p: &Params) -> Result<Outcome, PlanError> {
    match check {
        "structure" => structure(p),
        "steinberg" => steinberg(p),
        "order" => order(p),
        "weights" => weights(p),
        "gauss" => gauss(p),
        "z-generators" => z_generators(p),
        "perfectness" => perfectness(p),
        "level-absorb" => level_absorb(p),
        "level-sum" => level_sum(p),
        "level-upper" => level_upper(p),
        "level-lower" => level_lower(p),
        "level-congruence" => level_congruence(p),
        "mixed-commutator-c" => mixed_commutator_check(p, true),
        "mixed-commutator-g" => mixed_commutator_check(p, false),
        "comaximal-level" => comaximal_level(p),
        "conjugation-bounds" => conjugation_bounds(p),
        "commutator-bounds" => commutator_bounds_check(p),
        "chain" => chain(p),
        "localization" => localization(p),
        "congruence-chain" => congruence_chain(p),
        other => Err(PlanError::UnknownCheck(other.into())),
    }
}

fn default_rep(label: TypeLabel) -> RepKind {
    match label {
        TypeLabel::A | TypeLabel::C => RepKind::Natural,
        _ => RepKind::Adjoint,
    }
}

/// Hypotheses of the commutator statements: no residue field of two elements
/// for `C2`/`G2`, plus the `c in c^2 R + 2cR` condition for every symplectic
/// type when `with_condition` is set.
fn hypotheses(
    label: TypeLabel,
    rank: usize,
    ring: &Arc<FiniteRing>,
    with_condition: bool,
) -> Option<String> {
    let rank2_special = (label == TypeLabel::C && rank == 2) || label == TypeLabel::G;
    if rank2_special && ring.has_f2_residue_field() {
        return Some("ring has a residue field of two elements".into());
    }
    if with_condition && label == TypeLabel::C && !ring.condition_cl() {
        return Some("some c lies outside c^2 R + 2 c R".into());
    }
    None
}

/// Exact size of the Gauss product set for the congruence subgroup of level
/// `a`, used as a pre-flight estimate (saturating).
fn gauss_size(ctx: &Arc<GroupCtx>, a: &Ideal) -> usize {
    let rs = ctx.rep.table().root_system().clone();
    let half = rs.positive().len() as u32;
    let t = torus_congruence(ctx, a).len();
    let u = a.len().saturating_pow(half);
    u.saturating_mul(t).saturating_mul(u)
}

/// Relative elementary subgroup handle, materialized when the congruence
/// envelope fits under the cap.
fn relative_handle(ctx: &Arc<GroupCtx>, a: &Ideal, cap: usize) -> SubgroupHandle {
    if gauss_size(ctx, a) <= cap {
        relative_elementary(ctx, a, cap)
    } else {
        SubgroupHandle {
            ctx: ctx.clone(),
            label: "E(Phi,R,a)".into(),
            gens: z_gens(ctx, a, a),
            set: SetData::Capped { seen: 0 },
        }
    }
}

/// The full congruence subgroup realized in the context's representation:
/// the union of central-torus cosets of the principal congruence subgroup.
fn full_congruence(
    ctx: &Arc<GroupCtx>,
    b: &Ideal,
    cap: usize,
) -> Result<SubgroupHandle, SubgroupError> {
    let g = congruence_subgroup(ctx, b, cap)?;
    if b.is_unit_ideal() {
        return Ok(g);
    }
    let SetData::Full(gset) = &g.set else { return Ok(g) };
    let (_q, map) = ctx.ring.quotient(b);
    let qctx = GroupCtx::new(ctx.rep.clone(), map.dst().clone());
    let reduced_gens: Vec<Mat> = {
        let mut gens = x_gens(ctx, &Ideal::unit(ctx.ring.clone()));
        gens.extend(torus_elements(ctx).into_iter().map(|(m, _)| m));
        gens.iter().map(|m| ctx.apply_ring_map(&map, m)).collect()
    };
    let mut central_values: IndexSet<crate::group::Packed> = IndexSet::new();
    let mut central_reps: Vec<Mat> = Vec::new();
    for (m, _) in torus_elements(ctx) {
        let mq = ctx.apply_ring_map(&map, &m);
        let central = reduced_gens
            .iter()
            .all(|g| qctx.mul(&mq, g) == qctx.mul(g, &mq));
        if central && central_values.insert(qctx.pack(&mq)) {
            central_reps.push(m);
        }
    }
    let mut set: IndexSet<crate::group::Packed> = IndexSet::new();
    for z in &central_reps {
        for p in gset {
            let m = ctx.unpack(p);
            set.insert(ctx.pack(&ctx.mul(z, &m)));
            if set.len() > cap {
                return Err(SubgroupError::CapExceeded { seen: set.len() });
            }
        }
    }
    let mut gens = g.gens.clone();
    gens.extend(central_reps.into_iter().filter(|m| !ctx.is_identity(m)));
    Ok(SubgroupHandle { ctx: ctx.clone(), label: format!("C{}", g.label), gens, set: SetData::Full(set) })
}

// ---------------------------------------------------------------------------

fn structure(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let mut out = Outcome::pass();
    out.sizes.insert("dimension".into(), table.dim());
    out.sizes.insert("roots".into(), rs.num_roots());
    if !table.jacobi_holds() {
        return Ok(Outcome::fail("Jacobi identity".into()));
    }
    for a in 0..rs.num_roots() {
        for b in 0..rs.num_roots() {
            if a == b || rs.negate(a) == b {
                continue;
            }
            if let Some(n) = table.n_const(a, b) {
                let (pa, _) = rs.root_string(a, b).unwrap();
                let (pb, _) = rs.root_string(b, a).unwrap();
                if n.abs() != pa + 1 || n.abs() != pb + 1 {
                    return Ok(Outcome::fail(format!("|N| != p+1 at pair ({a},{b})")));
                }
                if table.n_const(b, a) != Some(-n)
                    || table.n_const(rs.negate(a), rs.negate(b)) != Some(-n)
                {
                    return Ok(Outcome::fail("antisymmetry".into()));
                }
            }
        }
    }
    Ok(out)
}

fn steinberg(p: &Params) -> Result<Outcome, PlanError> {
    let ctx = p.ctx(RepKind::Adjoint)?;
    let table = ctx.rep.table().clone();
    let rs = table.root_system().clone();
    let ring = ctx.ring.clone();
    let mut checked = 0usize;
    for alpha in 0..rs.num_roots() {
        for a in ring.elements() {
            for b in ring.elements() {
                let lhs = ctx.mul(&ctx.x_alpha(alpha, a), &ctx.x_alpha(alpha, b));
                if lhs != ctx.x_alpha(alpha, ring.add(a, b)) {
                    return Ok(Outcome::fail("additivity".into()));
                }
                checked += 1;
            }
        }
    }
    for a in 0..rs.num_roots() {
        for b in 0..rs.num_roots() {
            if a == b || rs.negate(a) == b {
                continue;
            }
            for s in ring.elements() {
                for t in ring.elements() {
                    let lhs = ctx
                        .comm(&ctx.x_alpha(a, s), &ctx.x_alpha(b, t))
                        .expect("invertible");
                    let mut rhs = ctx.identity();
                    for (root, arg) in
                        table.commutator_expansion(&ring, a, b, s, t).expect("pair")
                    {
                        rhs = ctx.mul(&rhs, &ctx.x_alpha(root, arg));
                    }
                    if lhs != rhs {
                        return Ok(Outcome::fail(format!("commutator formula at ({a},{b})")));
                    }
                    checked += 1;
                }
            }
        }
    }
    let mut out = Outcome::pass();
    out.sizes.insert("identities".into(), checked);
    Ok(out)
}

fn order(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let ctx = p.ctx(default_rep(table.root_system().label()))?;
    let level = p.ideal_or("level", &ctx.ring.clone(), &Ideal::unit(ctx.ring.clone()))?;
    let expect: usize = p.int("expect", -1)? as usize;
    let h = elementary_level(&ctx, &level, p.cap);
    let mut out = Outcome::pass();
    match h.order() {
        Some(n) => {
            out.sizes.insert("order".into(), n);
            if !h.audit(16, 0x0a11ce) {
                return Ok(Outcome::fail("closure audit".into()));
            }
            if n != expect {
                return Ok(Outcome::fail(format!("order {n}, expected {expect}")));
            }
        }
        None => return Ok(Outcome::capped("closure exceeded cap".into())),
    }
    Ok(out)
}

fn weights(p: &Params) -> Result<Outcome, PlanError> {
    let ctx = p.ctx(RepKind::Adjoint)?;
    let rs = ctx.rep.table().root_system().clone();
    let ring = ctx.ring.clone();
    let n = ctx.dim();
    let mut checked = 0usize;
    for omega in rs.torus_coweights() {
        if !ctx.is_identity(&ctx.h_omega(&omega, ring.one()).expect("unit")) {
            return Ok(Outcome::fail("h_omega(1)".into()));
        }
        for eps in ring.units() {
            let h = ctx.h_omega(&omega, eps).expect("unit");
            // the weight element is diagonal, so conjugation rescales entries
            let d: Vec<_> = (0..n).map(|i| h[i * n + i]).collect();
            let dinv: Vec<_> = d.iter().map(|&x| ring.inv(x).expect("diagonal of units")).collect();
            for alpha in 0..rs.num_roots() {
                let k = rs.coweight_pairing(&omega, alpha).expect("listed weight");
                let factor = if k >= 0 {
                    ring.pow(eps, k as usize)
                } else {
                    ring.pow(ring.inv(eps).unwrap(), (-k) as usize)
                };
                for xi in ring.elements() {
                    let x = ctx.x_alpha(alpha, xi);
                    let mut lhs = x.clone();
                    for i in 0..n {
                        for j in 0..n {
                            lhs[i * n + j] =
                                ring.mul(ring.mul(d[i], x[i * n + j]), dinv[j]);
                        }
                    }
                    if lhs != ctx.x_alpha(alpha, ring.mul(factor, xi)) {
                        return Ok(Outcome::fail(format!(
                            "weight action at {} root {alpha}",
                            omega.label
                        )));
                    }
                    checked += 1;
                }
            }
        }
    }
    let mut out = Outcome::pass();
    out.sizes.insert("identities".into(), checked);
    out.sizes.insert("weights".into(), rs.torus_coweights().len());
    Ok(out)
}

fn gauss(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let ctx = p.ctx(default_rep(table.root_system().label()))?;
    let ring = ctx.ring.clone();
    let a = p.ideal("a", &ring)?;
    if !ring.is_local() {
        return Err(PlanError::BadParam("ring".into(), "Gauss check needs a local ring".into()));
    }
    if !a.is_subset(&ring.radical()) {
        return Err(PlanError::BadParam("a".into(), "ideal not inside the radical".into()));
    }
    if gauss_size(&ctx, &a) > p.cap {
        return Ok(Outcome::capped("Gauss product beyond cap".into()));
    }

    // independent route: Schreier kernel of the reduction on the ambient
    let mut ambient = x_gens(&ctx, &Ideal::unit(ring.clone()));
    ambient.extend(torus_elements(&ctx).into_iter().map(|(m, _)| m));
    let kernel = match congruence_kernel_schreier(&ctx, &ambient, &a, p.cap, p.cap) {
        Ok(k) => k,
        Err(SubgroupError::CapExceeded { .. }) => {
            return Ok(Outcome::capped("quotient image beyond cap".into()))
        }
        Err(e) => return Ok(Outcome::fail(e.to_string())),
    };

    // Gauss product U(a) T(R,a) U^-(a)
    let u = unipotent_set(&ctx, &a, true);
    let t = torus_congruence(&ctx, &a);
    let um = unipotent_set(&ctx, &a, false);
    let mut product: IndexSet<crate::group::Packed> = IndexSet::new();
    for x in &u {
        for (h, _) in &t {
            let xh = ctx.mul(x, h);
            for y in &um {
                product.insert(ctx.pack(&ctx.mul(&xh, y)));
            }
        }
    }

    // E(Phi,a) T(R,a)
    let e_level = elementary_level(&ctx, &a, p.cap);
    let SetData::Full(eset) = &e_level.set else {
        return Ok(Outcome::capped("level subgroup beyond cap".into()));
    };
    let mut et: IndexSet<crate::group::Packed> = IndexSet::new();
    for pm in eset {
        let m = ctx.unpack(pm);
        for (h, _) in &t {
            et.insert(ctx.pack(&ctx.mul(&m, h)));
        }
    }

    let mut out = Outcome::pass();
    out.sizes.insert("kernel".into(), kernel.len());
    out.sizes.insert("gauss_product".into(), product.len());
    out.sizes.insert("level_times_torus".into(), et.len());
    let same = kernel.len() == product.len()
        && product.iter().all(|x| kernel.contains(x))
        && et.len() == kernel.len()
        && et.iter().all(|x| kernel.contains(x));
    Ok(if same { out } else { Outcome::fail("decomposition sets differ".into()) })
}

fn z_generators(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let ctx = p.ctx(default_rep(table.root_system().label()))?;
    let a = p.ideal("a", &ctx.ring.clone())?;
    if gauss_size(&ctx, &a) > p.cap {
        return Ok(Outcome::capped("relative subgroup beyond cap".into()));
    }
    let rel = relative_elementary(&ctx, &a, p.cap);
    let SetData::Full(rel_set) = &rel.set else {
        return Ok(Outcome::capped("relative subgroup beyond cap".into()));
    };
    let zc = match closure(&ctx, &z_gens(&ctx, &a, &a), p.cap) {
        Ok(s) => s,
        Err(SubgroupError::CapExceeded { .. }) => {
            return Ok(Outcome::capped("z-closure beyond cap".into()))
        }
        Err(e) => return Ok(Outcome::fail(e.to_string())),
    };
    let mut out = Outcome::pass();
    out.sizes.insert("relative".into(), rel_set.len());
    out.sizes.insert("z_closure".into(), zc.len());
    let same = rel_set.len() == zc.len() && zc.iter().all(|x| rel_set.contains(x));
    Ok(if same { out } else { Outcome::fail("z-generators do not span".into()) })
}

fn perfectness(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let ctx = p.ctx(default_rep(rs.label()))?;
    let ring = ctx.ring.clone();
    let a = p.ideal_or("a", &ring, &Ideal::unit(ring.clone()))?;
    let b = p.ideal_or("b", &ring, &a)?;
    let hyp = hypotheses(rs.label(), rs.rank(), &ring, false);

    if gauss_size(&ctx, &Ideal::unit(ring.clone())) > p.cap {
        return Ok(Outcome::capped("ambient beyond cap".into()));
    }
    let ambient = {
        let mut gens = x_gens(&ctx, &Ideal::unit(ring.clone()));
        gens.extend(torus_elements(&ctx).into_iter().map(|(m, _)| m));
        gens
    };
    let e_full = match closure(&ctx, &x_gens(&ctx, &Ideal::unit(ring.clone())), p.cap) {
        Ok(s) => s,
        Err(_) => return Ok(Outcome::capped("elementary group beyond cap".into())),
    };
    let _ = ambient;
    let e_handle = SubgroupHandle {
        ctx: ctx.clone(),
        label: "E(Phi,R)".into(),
        gens: x_gens(&ctx, &Ideal::unit(ring.clone())),
        set: SetData::Full(e_full),
    };
    let pair = match relative_elementary_pair(&ctx, &a, &b, p.cap) {
        Ok(h) => h,
        Err(SubgroupError::NotAdmissible) => {
            return Err(PlanError::BadParam("b".into(), "pair not admissible".into()))
        }
        Err(e) => return Ok(Outcome::fail(e.to_string())),
    };
    if !pair.is_exhaustive() {
        return Ok(Outcome::capped("relative pair beyond cap".into()));
    }
    let comm = match mixed_commutator(&e_handle, &pair, p.cap) {
        Ok(c) => c,
        Err(_) => return Ok(Outcome::capped("commutator beyond cap".into())),
    };
    let mut out = Outcome::pass();
    out.sizes.insert("pair".into(), pair.order().unwrap_or(usize::MAX));
    out.sizes.insert("commutator".into(), comm.order().unwrap_or(usize::MAX));
    let equal = comm.set_eq(&pair) == Some(true);
    match hyp {
        Some(h) => {
            out.verdict = Verdict::Skipped;
            out.hypothesis = Some(h);
            out.exploratory = Some(if equal { "equality held anyway".into() } else { "equality failed".into() });
        }
        None if !equal => return Ok(Outcome::fail("group is not E-perfect".into())),
        None => {}
    }
    Ok(out)
}

fn level_absorb(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let ctx = p.ctx(default_rep(rs.label()))?;
    let ring = ctx.ring.clone();
    let a = p.ideal("a", &ring)?;
    let floor = if rs.label() == TypeLabel::C {
        // (2R + a) a^2
        let two = Ideal::principal(ring.clone(), ring.from_int(2));
        let sum = two.sum(&a).expect("ring");
        sum.product(&a.product(&a).expect("ring")).expect("ring")
    } else {
        a.product(&a).expect("ring")
    };
    let level = elementary_level(&ctx, &a, p.cap);
    let SetData::Full(level_set) = &level.set else {
        return Ok(Outcome::capped("level subgroup beyond cap".into()));
    };
    let rel = relative_handle(&ctx, &floor, p.cap);
    let SetData::Full(rel_set) = &rel.set else {
        return Ok(Outcome::capped("relative subgroup beyond cap".into()));
    };
    let mut out = Outcome::pass();
    out.sizes.insert("level".into(), level_set.len());
    out.sizes.insert("relative_floor".into(), rel_set.len());
    let included = rel_set.iter().all(|x| level_set.contains(x));
    Ok(if included { out } else { Outcome::fail("E(Phi,a) misses E(Phi,R,a^2)".into()) })
}

fn level_sum(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let ctx = p.ctx(default_rep(table.root_system().label()))?;
    let ring = ctx.ring.clone();
    let a = p.ideal("a", &ring)?;
    let b = p.ideal("b", &ring)?;
    let c = p.ideal_or("c", &ring, &a)?;
    let d = p.ideal_or("d", &ring, &b)?;
    let build = |x: &Ideal, y: &Ideal| relative_elementary_pair(&ctx, x, y, p.cap);
    let (h1, h2) = match (build(&a, &c), build(&b, &d)) {
        (Ok(h1), Ok(h2)) => (h1, h2),
        _ => return Err(PlanError::BadParam("a".into(), "pair not admissible".into())),
    };
    let sum_a = a.sum(&b).expect("ring");
    let sum_c = c.sum(&d).expect("ring");
    let target = match build(&sum_a, &sum_c) {
        Ok(h) => h,
        Err(_) => return Err(PlanError::BadParam("a".into(), "sum pair not admissible".into())),
    };
    if !(h1.is_exhaustive() && h2.is_exhaustive() && target.is_exhaustive()) {
        return Ok(Outcome::capped("subgroups beyond cap".into()));
    }
    let product = match set_product(&h1, &h2, p.cap) {
        Ok(s) => s,
        Err(_) => return Ok(Outcome::capped("set product beyond cap".into())),
    };
    let SetData::Full(target_set) = &target.set else { unreachable!() };
    let mut out = Outcome::pass();
    out.sizes.insert("product".into(), product.len());
    out.sizes.insert("sum_subgroup".into(), target_set.len());
    let same = product.len() == target_set.len() && product.iter().all(|x| target_set.contains(x));
    Ok(if same { out } else { Outcome::fail("product of levels differs from level of sums".into()) })
}

fn level_upper(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let ctx = p.ctx(default_rep(rs.label()))?;
    let ring = ctx.ring.clone();
    let a = p.ideal("a", &ring)?;
    let b = p.ideal("b", &ring)?;
    let ab = a.product(&b).expect("ring");
    let sum = a.sum(&b).expect("ring");
    let two_invertible = ring.is_unit(ring.from_int(2));
    let exceptional = rs.label() == TypeLabel::C && !two_invertible;

    let mut out = Outcome::pass();
    // witness sweep
    let mut digests = Vec::new();
    let zeta_pool: Vec<_> = ring.elements().take(4).collect();
    for alpha in 0..rs.num_roots() {
        for &ae in ideal_add_gens(&a).iter() {
            for &be in ideal_add_gens(&b).iter() {
                for &zeta in &zeta_pool {
                    if exceptional && rs.root(alpha).length == LengthClass::Long {
                        continue;
                    }
                    match witness_sum_level(&ctx, alpha, ae, be, zeta, &a, &b) {
                        Ok(w) => {
                            if digests.len() < 4 {
                                digests.push(format!("{:016x}", w.digest()));
                            }
                        }
                        Err(e) => {
                            return Ok(Outcome::fail(format!(
                                "sum-level witness failed at root {alpha}: {e}"
                            )))
                        }
                    }
                }
            }
        }
    }
    out.witness_digests = digests;

    // set-level inclusion (the exceptional symplectic case weakens the
    // left-hand side's long-root parameter)
    let lhs = if exceptional {
        let weak = ab
            .square_gen()
            .sum(&Ideal::principal(ring.clone(), ring.from_int(2)).product(&ab).expect("ring"))
            .expect("ring")
            .sum(&a.square_gen().product(&b).expect("ring"))
            .expect("ring");
        out.detail = Some("exceptional symplectic form of the inclusion".into());
        match relative_elementary_pair(&ctx, &ab, &weak, p.cap) {
            Ok(h) => h,
            Err(_) => return Ok(Outcome::capped("pair beyond cap".into())),
        }
    } else {
        relative_handle(&ctx, &ab, p.cap)
    };
    let rhs = elementary_level(&ctx, &sum, p.cap);
    match (&lhs.set, &rhs.set) {
        (SetData::Full(ls), SetData::Full(rset)) => {
            out.sizes.insert("relative_product_level".into(), ls.len());
            out.sizes.insert("level_sum".into(), rset.len());
            if !ls.iter().all(|x| rset.contains(x)) {
                return Ok(Outcome::fail("E(Phi,R,ab) escapes E(Phi,a+b)".into()));
            }
        }
        _ => {
            out.detail = Some(
                out.detail
                    .map(|d| format!("{d}; sets beyond cap, witnesses only"))
                    .unwrap_or_else(|| "sets beyond cap, witnesses only".into()),
            );
        }
    }
    Ok(out)
}

fn level_lower(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let ctx = p.ctx(default_rep(rs.label()))?;
    let ring = ctx.ring.clone();
    let a = p.ideal("a", &ring)?;
    let b = p.ideal("b", &ring)?;
    let ab = a.product(&b).expect("ring");
    let hyp = hypotheses(rs.label(), rs.rank(), &ring, true);

    // witness sweep over all elements of the ideals
    let mut digests = Vec::new();
    let mut witness_fail: Option<String> = None;
    'sweep: for alpha in 0..rs.num_roots() {
        for &ae in a.elements() {
            for &be in b.elements() {
                match witness_mixed_commutator(&ctx, alpha, ae, be, &a, &b) {
                    Ok(w) => {
                        let target = ctx.x_alpha(alpha, ring.mul(ae, be));
                        if !w.verify(&ctx, &target, &a, &b) {
                            witness_fail = Some(format!("witness audit failed at root {alpha}"));
                            break 'sweep;
                        }
                        if digests.len() < 4 {
                            digests.push(format!("{:016x}", w.digest()));
                        }
                    }
                    Err(e) => {
                        witness_fail = Some(format!("no witness at root {alpha}: {e}"));
                        break 'sweep;
                    }
                }
            }
        }
    }

    // set-level inclusion
    let ea = relative_handle(&ctx, &a, p.cap);
    let eb = relative_handle(&ctx, &b, p.cap);
    let eab = relative_handle(&ctx, &ab, p.cap);
    let mut set_result: Option<bool> = None;
    let mut sizes = BTreeMap::new();
    if gauss_size(&ctx, &ab) <= p.cap {
        if let Ok(comm) = mixed_commutator(&ea, &eb, p.cap) {
            if let (SetData::Full(cs), SetData::Full(es)) = (&comm.set, &eab.set) {
                sizes.insert("commutator".into(), cs.len());
                sizes.insert("relative_ab".into(), es.len());
                set_result = Some(es.iter().all(|x| cs.contains(x)));
            }
        }
    }

    let ok = witness_fail.is_none() && set_result != Some(false);
    let mut out = Outcome::pass();
    out.sizes = sizes;
    out.witness_digests = digests;
    match hyp {
        Some(h) => {
            out.verdict = Verdict::Skipped;
            out.hypothesis = Some(h);
            out.exploratory = Some(match (&witness_fail, set_result) {
                (None, Some(true) | None) => "inclusion held anyway".into(),
                _ => format!(
                    "inclusion failed without hypotheses: {}",
                    witness_fail.unwrap_or_else(|| "set gap".into())
                ),
            });
        }
        None => {
            if let Some(msg) = witness_fail {
                return Ok(Outcome::fail(msg));
            }
            if set_result == Some(false) {
                return Ok(Outcome::fail("E(Phi,R,ab) escapes the mixed commutator".into()));
            }
            if set_result.is_none() {
                out.detail = Some("sets beyond cap, witnesses only".into());
            }
        }
    }
    let _ = ok;
    Ok(out)
}

fn level_congruence(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let ctx = p.ctx(default_rep(rs.label()))?;
    let ring = ctx.ring.clone();
    let a = p.ideal("a", &ring)?;
    let b = p.ideal("b", &ring)?;
    let ab = a.product(&b).expect("ring");
    if gauss_size(&ctx, &ab) > p.cap {
        return Ok(Outcome::capped("G(Phi,R,ab) beyond cap".into()));
    }
    let ga = match congruence_subgroup(&ctx, &a, p.cap) {
        Ok(h) => h,
        Err(_) => return Ok(Outcome::capped("G(Phi,R,a) beyond cap".into())),
    };
    let cb = match full_congruence(&ctx, &b, p.cap) {
        Ok(h) => h,
        Err(_) => return Ok(Outcome::capped("C(Phi,R,b) beyond cap".into())),
    };
    let gab = match congruence_subgroup(&ctx, &ab, p.cap) {
        Ok(h) => h,
        Err(_) => return Ok(Outcome::capped("G(Phi,R,ab) beyond cap".into())),
    };
    let SetData::Full(gab_set) = &gab.set else {
        return Ok(Outcome::capped("G(Phi,R,ab) beyond cap".into()));
    };
    let comm = match mixed_commutator(&ga, &cb, p.cap) {
        Ok(c) => c,
        Err(_) => return Ok(Outcome::capped("commutator beyond cap".into())),
    };
    let SetData::Full(comm_set) = &comm.set else {
        return Ok(Outcome::capped("commutator beyond cap".into()));
    };
    let mut out = Outcome::pass();
    out.sizes.insert("commutator".into(), comm_set.len());
    out.sizes.insert("congruence_ab".into(), gab_set.len());
    let included = comm_set.iter().all(|x| gab_set.contains(x));
    Ok(if included {
        out
    } else {
        Outcome::fail("[G(a),C(b)] escapes G(ab)".into())
    })
}

fn mixed_commutator_check(p: &Params, c_form: bool) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let default = if c_form {
        RepKind::Adjoint
    } else {
        default_rep(rs.label())
    };
    let ctx = p.ctx(default)?;
    let ring = ctx.ring.clone();
    let a = p.ideal("a", &ring)?;
    let b = p.ideal("b", &ring)?;
    let hyp = hypotheses(rs.label(), rs.rank(), &ring, true);

    // degenerate certificate: both ideals the whole ring, ambient too large
    let unit = Ideal::unit(ring.clone());
    if a.is_unit_ideal() && b.is_unit_ideal() && gauss_size(&ctx, &unit) > p.cap {
        if let Some(h) = hyp {
            return Ok(Outcome {
                verdict: Verdict::Skipped,
                hypothesis: Some(h),
                exploratory: Some("degenerate instance not attempted".into()),
                ..Outcome::pass()
            });
        }
        return degenerate_certificate(&ctx, p);
    }

    let ea = relative_handle(&ctx, &a, p.cap);
    let other = if c_form {
        full_congruence(&ctx, &b, p.cap)
    } else {
        congruence_subgroup(&ctx, &b, p.cap)
    };
    let other = match other {
        Ok(h) => h,
        Err(_) => return Ok(Outcome::capped("congruence subgroup beyond cap".into())),
    };
    let eb = relative_handle(&ctx, &b, p.cap);

    let ab = a.product(&b).expect("ring");
    if gauss_size(&ctx, &ab) > p.cap {
        return Ok(Outcome::capped("commutator envelope beyond cap".into()));
    }
    let lhs = match mixed_commutator(&ea, &other, p.cap) {
        Ok(c) => c,
        Err(_) => return Ok(Outcome::capped("left commutator beyond cap".into())),
    };
    let rhs = match mixed_commutator(&ea, &eb, p.cap) {
        Ok(c) => c,
        Err(_) => return Ok(Outcome::capped("right commutator beyond cap".into())),
    };
    let mut out = Outcome::pass();
    out.sizes.insert("lhs".into(), lhs.order().unwrap_or(usize::MAX));
    out.sizes.insert("rhs".into(), rhs.order().unwrap_or(usize::MAX));
    if let Some(d) = lhs.digest() {
        out.witness_digests.push(format!("{d:016x}"));
    }
    let equal = lhs.set_eq(&rhs);
    match (hyp, equal) {
        (Some(h), eq) => {
            out.verdict = Verdict::Skipped;
            out.hypothesis = Some(h);
            out.exploratory = Some(match eq {
                Some(true) => "equality held anyway".into(),
                Some(false) => "equality failed without hypotheses".into(),
                None => "sets beyond cap".into(),
            });
        }
        (None, Some(true)) => {}
        (None, Some(false)) => return Ok(Outcome::fail("mixed commutator formula".into())),
        (None, None) => return Ok(Outcome::capped("sets beyond cap".into())),
    }
    Ok(out)
}

/// Certificate path for `a = b = R` on ambients beyond the cap: every
/// generator-pair commutator of `[E, C]` is exhibited inside `[E, E]` and the
/// torus is shown to normalize the elementary subgroup, so the two normal
/// closures coincide without materializing them.
fn degenerate_certificate(ctx: &Arc<GroupCtx>, p: &Params) -> Result<Outcome, PlanError> {
    let rs = ctx.rep.table().root_system().clone();
    let ring = ctx.ring.clone();
    let unit = Ideal::unit(ring.clone());
    let torus = torus_elements(ctx);
    let mut digests = Vec::new();
    for (h, _) in &torus {
        if ctx.is_identity(h) {
            continue;
        }
        for alpha in 0..rs.num_roots() {
            for &u in ideal_add_gens(&unit).iter() {
                let x = ctx.x_alpha(alpha, u);
                let conj = ctx.conj(h, &x).expect("invertible");
                // torus conjugation stays in the same root subgroup
                let lambda = ring
                    .elements()
                    .find(|&l| conj == ctx.x_alpha(alpha, ring.mul(l, u)));
                let Some(lambda) = lambda else {
                    return Ok(Outcome::fail("torus does not normalize a root subgroup".into()));
                };
                // [x_alpha(u), h] = x_alpha((1 - lambda) u): witness it in [E, E]
                let arg = ring.mul(ring.sub(ring.one(), lambda), u);
                match witness_mixed_commutator(ctx, alpha, arg, ring.one(), &unit, &unit) {
                    Ok(w) => {
                        let target = ctx.x_alpha(alpha, arg);
                        if !w.verify(ctx, &target, &unit, &unit) {
                            return Ok(Outcome::fail("certificate witness audit".into()));
                        }
                        if digests.len() < 4 {
                            digests.push(format!("{:016x}", w.digest()));
                        }
                    }
                    Err(e) => {
                        return Ok(Outcome::fail(format!("certificate witness failed: {e}")))
                    }
                }
            }
        }
    }
    let _ = p;
    let mut out = Outcome::pass();
    out.witness_digests = digests;
    out.detail = Some(
        "witness certificate: ambient beyond cap; torus normalization and \
         generator commutators verified elementwise"
            .into(),
    );
    Ok(out)
}

fn comaximal_level(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let ctx = p.ctx(default_rep(rs.label()))?;
    let ring = ctx.ring.clone();
    let a = p.ideal("a", &ring)?;
    let b = p.ideal("b", &ring)?;
    if !a.comaximal(&b).expect("ring") {
        return Err(PlanError::BadParam("b".into(), "ideals are not comaximal".into()));
    }
    let hyp = hypotheses(rs.label(), rs.rank(), &ring, false);
    let ab = a.product(&b).expect("ring");
    if gauss_size(&ctx, &ab) > p.cap {
        return Ok(Outcome::capped("target beyond cap".into()));
    }
    let ea = relative_handle(&ctx, &a, p.cap);
    let eb = relative_handle(&ctx, &b, p.cap);
    let eab = relative_handle(&ctx, &ab, p.cap);
    let comm = match mixed_commutator(&ea, &eb, p.cap) {
        Ok(c) => c,
        Err(_) => return Ok(Outcome::capped("commutator beyond cap".into())),
    };
    let mut out = Outcome::pass();
    out.sizes.insert("commutator".into(), comm.order().unwrap_or(usize::MAX));
    out.sizes.insert("relative_ab".into(), eab.order().unwrap_or(usize::MAX));
    let equal = comm.set_eq(&eab);
    match (hyp, equal) {
        (Some(h), eq) => {
            out.verdict = Verdict::Skipped;
            out.hypothesis = Some(h);
            out.exploratory = Some(match eq {
                Some(true) => "equality held anyway".into(),
                Some(false) => "equality failed without hypotheses".into(),
                None => "sets beyond cap".into(),
            });
        }
        (None, Some(true)) => {}
        (None, Some(false)) => {
            return Ok(Outcome::fail("comaximal commutator equality".into()))
        }
        (None, None) => return Ok(Outcome::capped("sets beyond cap".into())),
    }
    Ok(out)
}

fn conjugation_bounds(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let ctx = p.ctx(default_rep(table.root_system().label()))?;
    let ring = ctx.ring.clone();
    let s = p.elt("s", &ring)?;
    let t = match p.get("t") {
        Some(_) => p.elt("t", &ring)?,
        None => ring.one(),
    };
    let a = p.ideal("a", &ring)?;
    let (pp, q, k) = (p.int("p", 1)?, p.int("q", 0)?, p.int("k", 1)?);
    let rep = verify_conjugation_inclusion(&ctx, s, t, &a, pp, q, k, p.cap)
        .map_err(|e| PlanError::BadParam("s".into(), e.to_string()))?;
    let mut out = Outcome::from_bool(rep.pass, "conjugation inclusion");
    out.sizes.insert("localized_ring".into(), rep.localized_size);
    if let Some(r) = rep.rhs_order {
        out.sizes.insert("rhs".into(), r);
    }
    out.sizes.insert("conjugates_checked".into(), rep.checked);
    if let Some(sb) = rep.sharp_below {
        out.detail = Some(format!("inclusion below the bound: {sb}"));
    }
    Ok(out)
}

fn commutator_bounds_check(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    let ctx = p.ctx(default_rep(rs.label()))?;
    let ring = ctx.ring.clone();
    let s = p.elt("s", &ring)?;
    let t = match p.get("t") {
        Some(_) => p.elt("t", &ring)?,
        None => ring.one(),
    };
    let a = p.ideal("a", &ring)?;
    let b = p.ideal_or("b", &ring, &a)?;
    let (pp, q, k, m) =
        (p.int("p", 1)?, p.int("q", 0)?, p.int("k", 1)?, p.int("m", 0)?);
    let rep = verify_commutator_inclusion(&ctx, s, t, &a, &b, pp, q, k, m, p.cap)
        .map_err(|e| PlanError::BadParam("s".into(), e.to_string()))?;
    let mut out = Outcome::from_bool(rep.pass, "commutator inclusion");
    out.sizes.insert("localized_ring".into(), rep.localized_size);
    if let Some(r) = rep.rhs_order {
        out.sizes.insert("rhs".into(), r);
    }
    out.sizes.insert("commutators_checked".into(), rep.checked);
    out.witness_digests = rep.witness_digests.clone();
    if let Some(len) = rep.witness_max_len {
        out.sizes.insert("max_witness_factors".into(), len);
        // the eight-commutator claim applies when 2 is invertible
        let (loc, f1) = ring.localize(s);
        let two_unit = loc.is_unit(f1.apply(ring.from_int(2))) || loc.is_zero_ring();
        if two_unit && len > 8 {
            return Ok(Outcome::fail(format!("witness length {len} exceeds eight")));
        }
    }
    Ok(out)
}

fn chain(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let ctx = p.ctx(default_rep(table.root_system().label()))?;
    let ring = ctx.ring.clone();
    let s = p.elt("s", &ring)?;
    let t = match p.get("t") {
        Some(_) => p.elt("t", &ring)?,
        None => ring.one(),
    };
    let a = p.ideal("a", &ring)?;
    let b = p.ideal_or("b", &ring, &a)?;
    let (pp, q, k) = (p.int("p", 1)?, p.int("q", 0)?, p.int("k", 1)?);
    let rep = verify_chained_inclusions(&ctx, s, t, &a, &b, pp, q, k, p.cap)
        .map_err(|e| PlanError::BadParam("s".into(), e.to_string()))?;
    let ok = rep.relativized_pass && rep.commutator_pass && rep.hall_witt_pass;
    let mut out = Outcome::from_bool(ok, "chained inclusions");
    out.sizes.insert("localized_ring".into(), rep.localized_size);
    out.detail = Some(format!(
        "relativized={} commutator={} hall_witt={}",
        rep.relativized_pass, rep.commutator_pass, rep.hall_witt_pass
    ));
    Ok(out)
}

fn localization(p: &Params) -> Result<Outcome, PlanError> {
    let ring = p.ring()?;
    let mut out = Outcome::pass();
    if let Some(_s) = p.get("s") {
        let s = p.elt("s", &ring)?;
        let (rs_ring, fs) = ring.localize(s);
        out.sizes.insert("localized".into(), rs_ring.size());
        if let Some(expect) = p.get("expect") {
            let expect: usize = expect
                .parse()
                .map_err(|_| PlanError::BadParam("expect".into(), expect.into()))?;
            if rs_ring.size() != expect {
                return Ok(Outcome::fail(format!(
                    "localized size {} expected {expect}",
                    rs_ring.size()
                )));
            }
        }
        if !rs_ring.is_zero_ring() && !rs_ring.is_unit(fs.apply(s)) {
            return Ok(Outcome::fail("image of s is not a unit".into()));
        }
        if !fs.is_homomorphism() {
            return Ok(Outcome::fail("localization map is not a homomorphism".into()));
        }
        if let Some(_t) = p.get("t") {
            let t = p.elt("t", &ring)?;
            let (r1, f1) = ring.localize(s);
            let (_r12, f12) = r1.localize(f1.apply(t));
            let (r2, f2) = ring.localize(t);
            let (_r21, f21) = r2.localize(f2.apply(s));
            if !canonically_isomorphic(&f1.compose(&f12), &f2.compose(&f21)) {
                return Ok(Outcome::fail("double localizations differ".into()));
            }
        }
    }
    // kernel shadow at the stabilization index, over every element
    for s in ring.elements() {
        let (ann, k) = ring.stable_annihilator(s);
        let sk = ring.pow(s, k);
        for r in ring.elements() {
            let x = ring.mul(sk, r);
            if ann.contains(x) && x != 0 {
                return Ok(Outcome::fail("kernel meets s^k R nontrivially".into()));
            }
        }
    }
    Ok(out)
}

fn congruence_chain(p: &Params) -> Result<Outcome, PlanError> {
    let table = p.system()?;
    let rs = table.root_system().clone();
    if !matches!(rs.label(), TypeLabel::A | TypeLabel::C) {
        return Err(PlanError::BadParam(
            "system".into(),
            "congruence chain needs a natural representation".into(),
        ));
    }
    let ring = p.ring()?;
    let rep_nat = crate::group::Representation::natural(table.clone())
        .map_err(|e| PlanError::BadParam("system".into(), e.to_string()))?;
    let ctx_nat = GroupCtx::new(rep_nat, ring.clone());
    let a = p.ideal("a", &ring)?;
    let rep_ad = crate::group::Representation::adjoint(table.clone());
    let ctx_ad = GroupCtx::new(rep_ad, ring.clone());
    if gauss_size(&ctx_nat, &a) > p.cap || gauss_size(&ctx_ad, &a) > p.cap {
        return Ok(Outcome::capped("congruence subgroups beyond cap".into()));
    }

    // C(Phi,R,a) in the adjoint realization
    let c_ad = match congruence_subgroup(&ctx_ad, &a, p.cap) {
        Ok(h) => h,
        Err(_) => return Ok(Outcome::capped("adjoint congruence beyond cap".into())),
    };
    let SetData::Full(c_set) = &c_ad.set else {
        return Ok(Outcome::capped("adjoint congruence beyond cap".into()));
    };

    // G(Phi,R,a) in the natural realization, with words, mapped into the
    // adjoint group
    let words = gauss_words(&ctx_nat, &a);
    let mut g_in_c = true;
    for (_m, word) in &words {
        let img = ctx_ad.eval_word(word);
        if !c_set.contains(&ctx_ad.pack(&img)) {
            g_in_c = false;
        }
    }

    // E(Phi,R,a) in the adjoint realization sits inside C
    let e_ad = relative_handle(&ctx_ad, &a, p.cap);
    let e_in_c = match &e_ad.set {
        SetData::Full(es) => es.iter().all(|x| c_set.contains(x)),
        SetData::Capped { .. } => true,
    };

    // counterexample scan: natural elements acting trivially in the adjoint
    // module modulo a, yet not congruent to the identity
    let c_nat = match full_congruence(&ctx_nat, &a, p.cap) {
        Ok(h) => h,
        Err(_) => return Ok(Outcome::capped("natural full congruence beyond cap".into())),
    };
    let mut counterexamples = 0usize;
    if let SetData::Full(cn) = &c_nat.set {
        for pm in cn {
            let m = ctx_nat.unpack(pm);
            if !ctx_nat.congruent_to_identity(&m, &a) {
                counterexamples += 1;
            }
        }
    }

    let mut out = Outcome::pass();
    out.sizes.insert("adjoint_congruence".into(), c_set.len());
    out.sizes.insert("natural_gauss".into(), words.len());
    out.sizes.insert("central_counterexamples".into(), counterexamples);
    if !(g_in_c && e_in_c) {
        return Ok(Outcome::fail("inclusion chain broke".into()));
    }
    Ok(out)
}

/// Gauss enumeration with generator words: `U(a) T(R,a) U^-(a)` over a local
/// ring, every element carrying a root-element word.
fn gauss_words(ctx: &Arc<GroupCtx>, a: &Ideal) -> Vec<(Mat, Vec<Gen>)> {
    let rs = ctx.rep.table().root_system().clone();
    let mut out: Vec<(Mat, Vec<Gen>)> = vec![(ctx.identity(), vec![])];
    let extend = |out: &mut Vec<(Mat, Vec<Gen>)>, roots: &[usize]| {
        for &alpha in roots {
            let mut next = Vec::with_capacity(out.len() * a.len());
            for (m, w) in out.iter() {
                for &t in a.elements() {
                    let mut w2 = w.clone();
                    if t != 0 {
                        w2.push(Gen { root: alpha, t });
                    }
                    next.push((ctx.mul(m, &ctx.x_alpha(alpha, t)), w2));
                }
            }
            *out = next;
        }
    };
    let pos: Vec<usize> = rs.positive().to_vec();
    let neg: Vec<usize> = (0..rs.num_roots()).filter(|&r| !rs.is_positive(r)).collect();
    extend(&mut out, &pos);
    // torus part, with words
    let torus: Vec<(Mat, Vec<Gen>)> = torus_congruence(ctx, a)
        .into_iter()
        .filter_map(|(m, w)| w.map(|w| (m, w)))
        .collect();
    let mut with_torus = Vec::with_capacity(out.len() * torus.len());
    for (m, w) in &out {
        for (h, hw) in &torus {
            let mut w2 = w.clone();
            w2.extend_from_slice(hw);
            with_torus.push((ctx.mul(m, h), w2));
        }
    }
    out = with_torus;
    extend(&mut out, &neg);
    out
}

/// Build a subgroup handle from a descriptor expression:
/// `E(a)`, `E(R,a)`, `E(R,a,b)`, `G(a)`, `C(a)`, `U(a)`, `U-(a)`, `T(a)`,
/// `H`, mixed commutators `[D1,D2]` and set products `D1*D2`, with ideal
/// expressions `R`, `0` or `(generators)`.
pub fn subgroup_by_descriptor(
    ctx: &Arc<GroupCtx>,
    src: &str,
    cap: usize,
) -> Result<SubgroupHandle, String> {
    let src = src.trim();
    // top-level product split
    let mut depth = 0i32;
    for (i, ch) in src.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            '*' if depth == 0 => {
                let left = subgroup_by_descriptor(ctx, &src[..i], cap)?;
                let right = subgroup_by_descriptor(ctx, &src[i + 1..], cap)?;
                let set = set_product(&left, &right, cap).map_err(|e| e.to_string())?;
                let mut gens = left.gens.clone();
                gens.extend(right.gens.iter().cloned());
                return Ok(SubgroupHandle {
                    ctx: ctx.clone(),
                    label: format!("{}*{}", left.label, right.label),
                    gens,
                    set: SetData::Full(set),
                });
            }
            _ => {}
        }
    }
    if let Some(inner) = src.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let mut depth = 0i32;
        for (i, ch) in inner.char_indices() {
            match ch {
                '(' | '[' => depth += 1,
                ')' | ']' => depth -= 1,
                ',' if depth == 0 => {
                    let left = subgroup_by_descriptor(ctx, &inner[..i], cap)?;
                    let right = subgroup_by_descriptor(ctx, &inner[i + 1..], cap)?;
                    return mixed_commutator(&left, &right, cap).map_err(|e| e.to_string());
                }
                _ => {}
            }
        }
        return Err("commutator descriptor needs two operands".into());
    }
    let ring = ctx.ring.clone();
    if src == "H" {
        let rs = ctx.rep.table().root_system().clone();
        let mut gens = Vec::new();
        for alpha in 0..rs.num_roots() {
            for eps in ring.units() {
                gens.push(ctx.h_alpha(alpha, eps).map_err(|e| e.to_string())?);
            }
        }
        let set = closure(ctx, &gens, cap).map_err(|e| e.to_string())?;
        return Ok(SubgroupHandle {
            ctx: ctx.clone(),
            label: "H".into(),
            gens,
            set: SetData::Full(set),
        });
    }
    let (name, args_src) = src
        .split_once('(')
        .ok_or_else(|| format!("cannot parse descriptor `{src}`"))?;
    let args_src = args_src.strip_suffix(')').ok_or("missing closing parenthesis")?;
    // split args at top level; the ideal expressions contain parentheses
    let mut args: Vec<String> = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in args_src.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                args.push(cur.clone());
                cur.clear();
            }
            _ => cur.push(ch),
        }
    }
    if !cur.is_empty() {
        args.push(cur);
    }
    let ideal_at = |i: usize| -> Result<Ideal, String> {
        parse_ideal(args.get(i).ok_or("missing ideal argument")?, &ring)
    };
    match (name, args.len()) {
        ("E", 1) => Ok(elementary_level(ctx, &ideal_at(0)?, cap)),
        ("E", 2) if args[0].trim().eq_ignore_ascii_case("r") => {
            Ok(relative_elementary(ctx, &ideal_at(1)?, cap))
        }
        ("E", 3) if args[0].trim().eq_ignore_ascii_case("r") => {
            relative_elementary_pair(ctx, &ideal_at(1)?, &ideal_at(2)?, cap)
                .map_err(|e| e.to_string())
        }
        ("G", 1) => congruence_subgroup(ctx, &ideal_at(0)?, cap).map_err(|e| e.to_string()),
        ("C", 1) => full_congruence(ctx, &ideal_at(0)?, cap).map_err(|e| e.to_string()),
        ("U", 1) | ("U-", 1) => {
            let a = ideal_at(0)?;
            let positive = name == "U";
            let mats = unipotent_set(ctx, &a, positive);
            let mut set = IndexSet::new();
            for m in &mats {
                set.insert(ctx.pack(m));
            }
            let rs = ctx.rep.table().root_system().clone();
            let gens: Vec<Mat> = (0..rs.num_roots())
                .filter(|&r| rs.is_positive(r) == positive)
                .flat_map(|r| {
                    ideal_add_gens(&a).into_iter().map(move |t| (r, t)).collect::<Vec<_>>()
                })
                .map(|(r, t)| ctx.x_alpha(r, t))
                .collect();
            Ok(SubgroupHandle {
                ctx: ctx.clone(),
                label: format!("{name}(..)"),
                gens,
                set: SetData::Full(set),
            })
        }
        ("T", 1) => {
            let a = ideal_at(0)?;
            let mats: Vec<Mat> = torus_congruence(ctx, &a).into_iter().map(|(m, _)| m).collect();
            let mut set = IndexSet::new();
            for m in &mats {
                set.insert(ctx.pack(m));
            }
            Ok(SubgroupHandle {
                ctx: ctx.clone(),
                label: "T(..)".into(),
                gens: mats,
                set: SetData::Full(set),
            })
        }
        _ => Err(format!("cannot parse descriptor `{src}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{parse_plan, run_plan, Verdict};

    fn run_one(line: &str) -> crate::harness::InstanceReport {
        let plan = parse_plan("test", line).unwrap();
        run_plan(&plan, 1).instances.pop().unwrap()
    }

    #[test]
    fn structure_check() {
        let r = run_one("check=structure system=G2");
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn gauss_small() {
        let r = run_one("check=gauss system=A2 ring=Z/4 rep=natural a=(2)");
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.sizes["kernel"], 256);
    }

    #[test]
    fn theorem_one_small() {
        let r = run_one("check=mixed-commutator-c system=A2 ring=Z/4 a=(2) b=(2)");
        assert_eq!(r.verdict, Verdict::Pass);
    }

    #[test]
    fn comaximal_z6() {
        let r = run_one("check=comaximal-level system=A2 ring=Z/6 a=(2) b=(3)");
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.sizes["commutator"], 1);
    }

    #[test]
    fn skipped_exploratory() {
        let r = run_one("check=mixed-commutator-c system=B2 ring=Z/4 a=(2) b=(2)");
        assert_eq!(r.verdict, Verdict::Skipped);
        assert!(r.hypothesis.is_some());
        assert!(r.exploratory.is_some());
    }
}
