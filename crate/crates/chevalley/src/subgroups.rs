//! Finite subgroups of Chevalley groups as canonicalized element sets.
//!
//! Everything here is breadth-first closure over packed canonical matrices:
//! level subgroups `E(Phi,a)`, relative elementary subgroups (normal closures
//! computed by iterated conjugation by ambient generators), tori, unipotent
//! parts, congruence subgroups (Gauss products over local rings, assembled
//! through the idempotent decomposition otherwise, plus an independent
//! Schreier-kernel route used to cross-check them), set products and mixed
//! commutator subgroups.
//!
//! Handles above the element cap report a partial count and are excluded
//! from equality assertions.

use crate::group::{Gen, GroupCtx, GroupError, Mat, Packed, RepKind};
use crate::ring::{Ideal, RingElt};
use crate::roots::{LengthClass, RootIdx};
use indexmap::IndexSet;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SubgroupError {
    #[error("closure exceeded the cap ({seen} elements seen)")]
    CapExceeded { seen: usize },
    #[error("operands live in different ambients")]
    MixedAmbient,
    #[error("pair of ideals is not admissible")]
    NotAdmissible,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Default cap on materialized subgroup sets.
pub const DEFAULT_CAP: usize = 2_000_000;
/// All-pairs commutator route is used when `|H| * |K|` stays below this.
pub const PAIR_BUDGET: usize = 1 << 22;

#[derive(Clone)]
pub enum SetData {
    Full(IndexSet<Packed>),
    Capped { seen: usize },
}

#[derive(Clone)]
pub struct SubgroupHandle {
    pub ctx: Arc<GroupCtx>,
    pub label: String,
    pub gens: Vec<Mat>,
    pub set: SetData,
}

impl SubgroupHandle {
    pub fn order(&self) -> Option<usize> {
        match &self.set {
            SetData::Full(s) => Some(s.len()),
            SetData::Capped { .. } => None,
        }
    }

    pub fn is_exhaustive(&self) -> bool {
        matches!(self.set, SetData::Full(_))
    }

    pub fn contains(&self, m: &Mat) -> Option<bool> {
        match &self.set {
            SetData::Full(s) => Some(s.contains(&self.ctx.pack(m))),
            SetData::Capped { .. } => None,
        }
    }

    pub fn set_eq(&self, other: &SubgroupHandle) -> Option<bool> {
        match (&self.set, &other.set) {
            (SetData::Full(a), SetData::Full(b)) => {
                Some(a.len() == b.len() && a.iter().all(|p| b.contains(p)))
            }
            _ => None,
        }
    }

    pub fn is_subset(&self, other: &SubgroupHandle) -> Option<bool> {
        match (&self.set, &other.set) {
            (SetData::Full(a), SetData::Full(b)) => Some(a.iter().all(|p| b.contains(p))),
            _ => None,
        }
    }

    /// Order-independent digest of the element set.
    pub fn digest(&self) -> Option<u64> {
        match &self.set {
            SetData::Full(s) => {
                let mut hashes: Vec<u64> = s.iter().map(|p| fnv(p)).collect();
                hashes.sort_unstable();
                let mut acc = 0xcbf29ce484222325u64;
                for h in hashes {
                    acc = acc.wrapping_mul(0x100000001b3) ^ h;
                }
                Some(acc)
            }
            SetData::Capped { .. } => None,
        }
    }

    /// Random product/inverse spot checks after closure.
    pub fn audit(&self, samples: usize, seed: u64) -> bool {
        let SetData::Full(s) = &self.set else { return true };
        if s.is_empty() {
            return false;
        }
        let mut rng = StdRng::seed_from_u64(seed);
        for _ in 0..samples {
            let a = self.ctx.unpack(s.get_index(rng.gen_range(0..s.len())).unwrap());
            let b = self.ctx.unpack(s.get_index(rng.gen_range(0..s.len())).unwrap());
            if !s.contains(&self.ctx.pack(&self.ctx.mul(&a, &b))) {
                return false;
            }
            let Ok(ai) = self.ctx.inverse(&a) else { return false };
            if !s.contains(&self.ctx.pack(&ai)) {
                return false;
            }
        }
        true
    }
}

pub fn fnv(words: &[u64]) -> u64 {
    let mut acc = 0xcbf29ce484222325u64;
    for &w in words {
        for b in w.to_le_bytes() {
            acc = (acc ^ b as u64).wrapping_mul(0x100000001b3);
        }
    }
    acc
}

fn dedupe(ctx: &GroupCtx, mats: Vec<Mat>) -> Vec<Mat> {
    let mut seen: IndexSet<Packed> = IndexSet::new();
    let mut out = Vec::new();
    for m in mats {
        if ctx.is_identity(&m) {
            continue;
        }
        if seen.insert(ctx.pack(&m)) {
            out.push(m);
        }
    }
    out
}

/// Generators with their inverses, deduplicated, identity dropped.
fn symmetrize(ctx: &GroupCtx, gens: &[Mat]) -> Result<Vec<Mat>, SubgroupError> {
    let mut all = Vec::with_capacity(gens.len() * 2);
    for g in gens {
        all.push(g.clone());
        all.push(ctx.inverse(g)?);
    }
    Ok(dedupe(ctx, all))
}

/// Breadth-first closure of the subgroup generated by `gens`.
pub fn closure(
    ctx: &Arc<GroupCtx>,
    gens: &[Mat],
    cap: usize,
) -> Result<IndexSet<Packed>, SubgroupError> {
    let mut set = IndexSet::new();
    set.insert(ctx.pack(&ctx.identity()));
    let sym = symmetrize(ctx, gens)?;
    closure_extend(ctx, &mut set, &sym, &sym, cap)?;
    Ok(set)
}

/// Extend a set that is already closed under `all_sym \ new_sym`: existing
/// elements only need the new generators; elements discovered from there are
/// expanded against everything. Both generator lists must be symmetric.
fn closure_extend(
    ctx: &Arc<GroupCtx>,
    set: &mut IndexSet<Packed>,
    all_sym: &[Mat],
    new_sym: &[Mat],
    cap: usize,
) -> Result<(), SubgroupError> {
    let initial = set.len();
    for qi in 0..initial {
        let m = ctx.unpack(set.get_index(qi).unwrap());
        for g in new_sym {
            set.insert(ctx.pack(&ctx.mul(&m, g)));
            if set.len() > cap {
                return Err(SubgroupError::CapExceeded { seen: set.len() });
            }
        }
    }
    let mut qi = initial;
    while qi < set.len() {
        let m = ctx.unpack(set.get_index(qi).unwrap());
        qi += 1;
        for g in all_sym {
            set.insert(ctx.pack(&ctx.mul(&m, g)));
            if set.len() > cap {
                return Err(SubgroupError::CapExceeded { seen: set.len() });
            }
        }
    }
    Ok(())
}

/// Normal closure of `seeds` under conjugation by `conjugators`, as a set:
/// generator sets are conjugated and re-closed until stable.
pub fn normal_closure(
    ctx: &Arc<GroupCtx>,
    seeds: &[Mat],
    conjugators: &[Mat],
    cap: usize,
) -> Result<(IndexSet<Packed>, Vec<Mat>), SubgroupError> {
    let mut gens = dedupe(ctx, seeds.to_vec());
    let mut sym = symmetrize(ctx, &gens)?;
    let mut set = IndexSet::new();
    set.insert(ctx.pack(&ctx.identity()));
    closure_extend(ctx, &mut set, &sym, &sym, cap)?;
    let conj_pairs: Vec<(Mat, Mat)> = {
        let mut out = Vec::new();
        for c in dedupe(ctx, conjugators.to_vec()) {
            let ci = ctx.inverse(&c)?;
            out.push((c, ci));
        }
        out
    };
    loop {
        let mut fresh = Vec::new();
        for (c, ci) in &conj_pairs {
            for g in &gens {
                let cg = ctx.mul(&ctx.mul(c, g), ci);
                if !set.contains(&ctx.pack(&cg)) {
                    fresh.push(cg);
                }
            }
        }
        if fresh.is_empty() {
            return Ok((set, gens));
        }
        let fresh = dedupe(ctx, fresh);
        let new_sym = symmetrize(ctx, &fresh)?;
        gens.extend(fresh);
        sym.extend(new_sym.iter().cloned());
        closure_extend(ctx, &mut set, &sym, &new_sym, cap)?;
    }
}

fn handle(ctx: &Arc<GroupCtx>, label: String, gens: Vec<Mat>, set: SetData) -> SubgroupHandle {
    SubgroupHandle { ctx: ctx.clone(), label, gens, set }
}

fn run_capped<F>(f: F) -> (SetData, bool)
where
    F: FnOnce() -> Result<IndexSet<Packed>, SubgroupError>,
{
    match f() {
        Ok(s) => (SetData::Full(s), true),
        Err(SubgroupError::CapExceeded { seen }) => (SetData::Capped { seen }, false),
        Err(_) => (SetData::Capped { seen: 0 }, false),
    }
}

/// Additive generating set of an ideal (greedy over the element list).
pub fn ideal_add_gens(a: &Ideal) -> Vec<RingElt> {
    let ring = a.ring();
    let mut gens: Vec<RingElt> = Vec::new();
    let mut span = vec![false; ring.size()];
    span[0] = true;
    for &x in a.elements() {
        if span[x as usize] {
            continue;
        }
        gens.push(x);
        // extend span by all additive combinations with x
        let mut frontier: Vec<RingElt> = (0..ring.size() as RingElt)
            .filter(|&y| span[y as usize])
            .collect();
        while let Some(y) = frontier.pop() {
            let mut z = y;
            loop {
                z = ring.add(z, x);
                if span[z as usize] {
                    break;
                }
                span[z as usize] = true;
                frontier.push(z);
            }
        }
    }
    gens
}

/// Root-element generators `x_alpha(t)` for all roots and `t` ranging over
/// additive generators of the ideal.
pub fn x_gens(ctx: &Arc<GroupCtx>, a: &Ideal) -> Vec<Mat> {
    let rs = ctx.rep.table().root_system().clone();
    let ts = ideal_add_gens(a);
    let mut out = Vec::new();
    for alpha in 0..rs.num_roots() {
        for &t in &ts {
            out.push(ctx.x_alpha(alpha, t));
        }
    }
    out
}

/// Same, but split by length class for a two-parameter pair.
pub fn x_gens_pair(ctx: &Arc<GroupCtx>, a: &Ideal, b: &Ideal) -> Vec<Mat> {
    let rs = ctx.rep.table().root_system().clone();
    let ta = ideal_add_gens(a);
    let tb = ideal_add_gens(b);
    let mut out = Vec::new();
    for alpha in 0..rs.num_roots() {
        let ts = if rs.root(alpha).length == LengthClass::Short && !rs.simply_laced() {
            &ta
        } else {
            &tb
        };
        for &t in ts.iter() {
            out.push(ctx.x_alpha(alpha, t));
        }
    }
    out
}

/// Ambient elementary generators: `x_alpha(u)` over additive generators of
/// the whole ring.
pub fn ambient_e_gens(ctx: &Arc<GroupCtx>) -> Vec<Mat> {
    x_gens(ctx, &Ideal::unit(ctx.ring.clone()))
}

/// `z_alpha(xi, zeta) = x_{-alpha}(zeta) x_alpha(xi) x_{-alpha}(-zeta)`.
pub fn z_elem(ctx: &GroupCtx, alpha: RootIdx, xi: RingElt, zeta: RingElt) -> Mat {
    let rs = ctx.rep.table().root_system().clone();
    let na = rs.negate(alpha);
    ctx.mul(
        &ctx.mul(&ctx.x_alpha(na, zeta), &ctx.x_alpha(alpha, xi)),
        &ctx.x_alpha(na, ctx.ring.neg(zeta)),
    )
}

/// The `z`-generator family of a relative elementary subgroup: `xi` over
/// additive generators of the level ideal(s), `zeta` over the whole ring.
pub fn z_gens(ctx: &Arc<GroupCtx>, a: &Ideal, b: &Ideal) -> Vec<Mat> {
    let rs = ctx.rep.table().root_system().clone();
    let ta = ideal_add_gens(a);
    let tb = ideal_add_gens(b);
    let mut out = Vec::new();
    for alpha in 0..rs.num_roots() {
        let ts = if rs.root(alpha).length == LengthClass::Short && !rs.simply_laced() {
            &ta
        } else {
            &tb
        };
        for &xi in ts.iter() {
            for zeta in ctx.ring.elements() {
                out.push(z_elem(ctx, alpha, xi, zeta));
            }
        }
    }
    dedupe(ctx, out)
}

/// Level subgroup `E(Phi, a)`.
pub fn elementary_level(ctx: &Arc<GroupCtx>, a: &Ideal, cap: usize) -> SubgroupHandle {
    let gens = dedupe(ctx, x_gens(ctx, a));
    let (set, _) = run_capped(|| closure(ctx, &gens, cap));
    handle(ctx, format!("E(Phi,({}))", ideal_label(a)), gens, set)
}

/// Relative elementary subgroup `E(Phi, R, a)`: normal closure of the level
/// subgroup in the absolute elementary group.
pub fn relative_elementary(ctx: &Arc<GroupCtx>, a: &Ideal, cap: usize) -> SubgroupHandle {
    relative_elementary_pair(ctx, a, a, cap).expect("diagonal pair is always admissible")
}

/// Floor ideal of an admissible pair: generated by `2 xi` and `xi^2` (with 2
/// replaced by 3 and squares by cubes for triply laced systems).
pub fn admissible_floor(ctx: &Arc<GroupCtx>, a: &Ideal) -> Ideal {
    match ctx.rep.table().root_system().max_multiplier() {
        1 => a.clone(),
        2 => a.scaled_power_gen(2, 2),
        _ => a.scaled_power_gen(3, 3),
    }
}

/// Two-parameter relative elementary subgroup `E(Phi, R, a, b)` for an
/// admissible pair.
pub fn relative_elementary_pair(
    ctx: &Arc<GroupCtx>,
    a: &Ideal,
    b: &Ideal,
    cap: usize,
) -> Result<SubgroupHandle, SubgroupError> {
    let rs = ctx.rep.table().root_system().clone();
    if rs.simply_laced() {
        if a != b {
            return Err(SubgroupError::NotAdmissible);
        }
    } else if !(admissible_floor(ctx, a).is_subset(b) && b.is_subset(a)) {
        return Err(SubgroupError::NotAdmissible);
    }
    let seeds = dedupe(ctx, x_gens_pair(ctx, a, b));
    let conj = ambient_e_gens(ctx);
    let label = if a == b {
        format!("E(Phi,R,({}))", ideal_label(a))
    } else {
        format!("E(Phi,R,({}),({}))", ideal_label(a), ideal_label(b))
    };
    match normal_closure(ctx, &seeds, &conj, cap) {
        Ok((set, gens)) => Ok(handle(ctx, label, gens, SetData::Full(set))),
        Err(SubgroupError::CapExceeded { seen }) => {
            // fall back to the z-generator family as the generator list
            let gens = z_gens(ctx, a, b);
            Ok(handle(ctx, label, gens, SetData::Capped { seen }))
        }
        Err(e) => Err(e),
    }
}

fn ideal_label(a: &Ideal) -> String {
    if a.is_unit_ideal() {
        return "R".into();
    }
    let gens: Vec<String> = a.gens().iter().take(3).map(|&g| a.ring().name(g).to_string()).collect();
    gens.join(",")
}

/// The torus `T(Phi, R)` for the context's representation: generated by all
/// `h_alpha(eps)` plus (adjoint case) the weight elements. Elements carry a
/// root-element word when one exists.
pub fn torus_elements(ctx: &Arc<GroupCtx>) -> Vec<(Mat, Option<Vec<Gen>>)> {
    let rs = ctx.rep.table().root_system().clone();
    let mut gens: Vec<(Mat, Option<Vec<Gen>>)> = Vec::new();
    for alpha in 0..rs.num_roots() {
        for eps in ctx.ring.units() {
            let word = ctx.h_alpha_word(alpha, eps).unwrap();
            gens.push((ctx.eval_word(&word), Some(word)));
        }
    }
    if ctx.rep.kind() == RepKind::Adjoint {
        for omega in rs.torus_coweights() {
            for eps in ctx.ring.units() {
                gens.push((ctx.h_omega(&omega, eps).unwrap(), None));
            }
        }
    }
    // abelian closure, words concatenated while both sides have one
    let mut set: IndexSet<Packed> = IndexSet::new();
    let mut elems: Vec<(Mat, Option<Vec<Gen>>)> = Vec::new();
    let id = ctx.identity();
    set.insert(ctx.pack(&id));
    elems.push((id, Some(vec![])));
    let mut qi = 0usize;
    while qi < elems.len() {
        let (m, w) = elems[qi].clone();
        qi += 1;
        for (g, gw) in &gens {
            let p = ctx.mul(&m, g);
            if set.insert(ctx.pack(&p)) {
                let word = match (&w, gw) {
                    (Some(a), Some(b)) => {
                        let mut c = a.clone();
                        c.extend_from_slice(b);
                        Some(c)
                    }
                    _ => None,
                };
                elems.push((p, word));
            }
        }
    }
    elems
}

/// `T(Phi, R, a)`: torus elements congruent to the identity modulo `a`.
pub fn torus_congruence(ctx: &Arc<GroupCtx>, a: &Ideal) -> Vec<(Mat, Option<Vec<Gen>>)> {
    torus_elements(ctx)
        .into_iter()
        .filter(|(m, _)| ctx.congruent_to_identity(m, a))
        .collect()
}

/// The set `U(Phi, a)` (or `U^-`): products of positive (negative) root
/// elements with parameters in `a`, in the frozen root order.
pub fn unipotent_set(ctx: &Arc<GroupCtx>, a: &Ideal, positive: bool) -> Vec<Mat> {
    let rs = ctx.rep.table().root_system().clone();
    let mut roots: Vec<RootIdx> =
        (0..rs.num_roots()).filter(|&r| rs.is_positive(r) == positive).collect();
    roots.sort();
    let mut out = vec![ctx.identity()];
    for alpha in roots {
        let mut next = Vec::with_capacity(out.len() * a.len());
        for m in &out {
            for &t in a.elements() {
                next.push(ctx.mul(m, &ctx.x_alpha(alpha, t)));
            }
        }
        out = next;
    }
    out
}

/// Congruence subgroup of the context's matrix group: `{g : g = 1 mod a}`.
///
/// Over a local ring this is the Gauss product `U(a) T(R,a) U^-(a)`; over a
/// product of local rings the factors are assembled through the idempotent
/// decomposition. In the adjoint representation this realizes the full
/// congruence subgroup `C(Phi,R,a)`; in a faithful natural representation it
/// is the principal congruence subgroup `G(Phi,R,a)`.
pub fn congruence_subgroup(
    ctx: &Arc<GroupCtx>,
    a: &Ideal,
    cap: usize,
) -> Result<SubgroupHandle, SubgroupError> {
    let label = format!("Cong(({}))", ideal_label(a));
    if a.is_unit_ideal() {
        // the whole ambient group E(Phi,R) T(Phi,R)
        let mut gens = ambient_e_gens(ctx);
        let torus: Vec<Mat> = torus_elements(ctx).into_iter().map(|(m, _)| m).collect();
        gens.extend(torus);
        let gens = dedupe(ctx, gens);
        let (set, _) = run_capped(|| closure(ctx, &gens, cap));
        return Ok(handle(ctx, label, gens, set));
    }
    if ctx.ring.is_local() {
        let u = unipotent_set(ctx, a, true);
        let t = torus_congruence(ctx, a);
        let um = unipotent_set(ctx, a, false);
        let total = u.len() * t.len() * um.len();
        let mut gens = dedupe(ctx, x_gens(ctx, a));
        gens.extend(t.iter().filter(|(m, _)| !ctx.is_identity(m)).map(|(m, _)| m.clone()));
        if total > 4 * cap {
            return Ok(handle(ctx, label, gens, SetData::Capped { seen: total }));
        }
        let mut set = IndexSet::with_capacity(total.min(cap));
        for x in &u {
            for (h, _) in &t {
                let xh = ctx.mul(x, h);
                for y in &um {
                    set.insert(ctx.pack(&ctx.mul(&xh, y)));
                    if set.len() > cap {
                        return Ok(handle(ctx, label, gens, SetData::Capped { seen: set.len() }));
                    }
                }
            }
        }
        return Ok(handle(ctx, label, gens, SetData::Full(set)));
    }
    // product of local rings: CRT-assemble the factor congruence subgroups
    let factors = ctx.ring.local_factors();
    let mut factor_sets: Vec<Vec<Mat>> = Vec::new();
    for f in factors {
        let fctx = GroupCtx::new(ctx.rep.clone(), f.ring.clone());
        let fa = Ideal::new(
            f.ring.clone(),
            a.gens().iter().map(|&g| f.project[g as usize]).collect(),
        );
        let h = congruence_subgroup(&fctx, &fa, cap)?;
        match h.set {
            SetData::Full(s) => {
                factor_sets.push(s.iter().map(|p| fctx.unpack(p)).collect());
            }
            SetData::Capped { seen } => {
                let gens = dedupe(ctx, x_gens(ctx, a));
                return Ok(handle(ctx, label, gens, SetData::Capped { seen }));
            }
        }
    }
    let total: usize = factor_sets.iter().map(|s| s.len()).product();
    let mut gens = dedupe(ctx, x_gens(ctx, a));
    gens.extend(
        torus_congruence(ctx, a).into_iter().filter(|(m, _)| !ctx.is_identity(m)).map(|(m, _)| m),
    );
    if total > cap {
        return Ok(handle(ctx, label, gens, SetData::Capped { seen: total }));
    }
    let n2 = ctx.dim() * ctx.dim();
    let mut set = IndexSet::with_capacity(total);
    let mut combo = vec![0usize; factor_sets.len()];
    loop {
        let mut m = vec![ctx.ring.zero(); n2];
        for (fi, f) in factors.iter().enumerate() {
            let part = &factor_sets[fi][combo[fi]];
            for (k, &v) in part.iter().enumerate() {
                m[k] = ctx.ring.add(m[k], f.lift[v as usize]);
            }
        }
        set.insert(ctx.pack(&m));
        // odometer
        let mut pos = 0;
        loop {
            if pos == combo.len() {
                let (set, _) = (SetData::Full(set), ());
                return Ok(handle(ctx, label, gens, set));
            }
            combo[pos] += 1;
            if combo[pos] < factor_sets[pos].len() {
                break;
            }
            combo[pos] = 0;
            pos += 1;
        }
    }
}

/// Independent congruence-kernel construction through the quotient group:
/// enumerate the image of the ambient generators modulo `a`, lift a
/// transversal, and close the Schreier generators of the kernel.
pub fn congruence_kernel_schreier(
    ctx: &Arc<GroupCtx>,
    ambient_gens: &[Mat],
    a: &Ideal,
    image_cap: usize,
    cap: usize,
) -> Result<IndexSet<Packed>, SubgroupError> {
    let (q, map) = ctx.ring.quotient(a);
    let qctx = GroupCtx::new(ctx.rep.clone(), q);
    let gens = symmetrize(ctx, ambient_gens)?;
    let gen_imgs: Vec<Mat> = gens.iter().map(|g| ctx.apply_ring_map(&map, g)).collect();

    let mut img: IndexSet<Packed> = IndexSet::new();
    img.insert(qctx.pack(&qctx.identity()));
    let mut lifts: Vec<Mat> = vec![ctx.identity()];
    let mut qi = 0usize;
    while qi < img.len() {
        let cur_img = qctx.unpack(img.get_index(qi).unwrap());
        let cur_lift = lifts[qi].clone();
        qi += 1;
        for (g, gi) in gens.iter().zip(&gen_imgs) {
            let t = qctx.mul(&cur_img, gi);
            if img.insert(qctx.pack(&t)) {
                lifts.push(ctx.mul(&cur_lift, g));
                if img.len() > image_cap {
                    return Err(SubgroupError::CapExceeded { seen: img.len() });
                }
            }
        }
    }

    let mut set: IndexSet<Packed> = IndexSet::new();
    set.insert(ctx.pack(&ctx.identity()));
    let mut sym: Vec<Mat> = Vec::new();
    for qi in 0..img.len() {
        let cur_img = qctx.unpack(img.get_index(qi).unwrap());
        for (g, gi) in gens.iter().zip(&gen_imgs) {
            let dest = qctx.mul(&cur_img, gi);
            let dest_idx = img.get_index_of(&qctx.pack(&dest)).unwrap();
            let k = ctx.mul(&ctx.mul(&lifts[qi], g), &ctx.inverse(&lifts[dest_idx])?);
            if !set.contains(&ctx.pack(&k)) {
                let new_sym = symmetrize(ctx, std::slice::from_ref(&k))?;
                sym.extend(new_sym.iter().cloned());
                closure_extend(ctx, &mut set, &sym, &new_sym, cap)?;
            }
        }
    }
    Ok(set)
}

/// Set product `A * B` of two handles over the same ambient.
pub fn set_product(
    a: &SubgroupHandle,
    b: &SubgroupHandle,
    cap: usize,
) -> Result<IndexSet<Packed>, SubgroupError> {
    if !Arc::ptr_eq(&a.ctx, &b.ctx) {
        return Err(SubgroupError::MixedAmbient);
    }
    let (SetData::Full(sa), SetData::Full(sb)) = (&a.set, &b.set) else {
        return Err(SubgroupError::CapExceeded { seen: 0 });
    };
    let ctx = &a.ctx;
    let mut out = IndexSet::new();
    for pa in sa {
        let ma = ctx.unpack(pa);
        for pb in sb {
            let mb = ctx.unpack(pb);
            out.insert(ctx.pack(&ctx.mul(&ma, &mb)));
            if out.len() > cap {
                return Err(SubgroupError::CapExceeded { seen: out.len() });
            }
        }
    }
    Ok(out)
}

/// Mixed commutator subgroup `[H, K]`.
///
/// When both sets are materialized and small, the subgroup generated by all
/// element-pair commutators is closed directly; otherwise the generator-pair
/// commutators are closed under conjugation by the join's generators, with a
/// randomized validation pass.
pub fn mixed_commutator(
    h1: &SubgroupHandle,
    h2: &SubgroupHandle,
    cap: usize,
) -> Result<SubgroupHandle, SubgroupError> {
    if !Arc::ptr_eq(&h1.ctx, &h2.ctx) {
        return Err(SubgroupError::MixedAmbient);
    }
    let ctx = &h1.ctx;
    let label = format!("[{},{}]", h1.label, h2.label);
    if let (SetData::Full(s1), SetData::Full(s2)) = (&h1.set, &h2.set) {
        if s1.len().saturating_mul(s2.len()) <= PAIR_BUDGET {
            let mut seeds: IndexSet<Packed> = IndexSet::new();
            let mut seed_mats = Vec::new();
            for p1 in s1 {
                let a = ctx.unpack(p1);
                for p2 in s2 {
                    let b = ctx.unpack(p2);
                    let c = ctx.comm(&a, &b)?;
                    if !ctx.is_identity(&c) && seeds.insert(ctx.pack(&c)) {
                        seed_mats.push(c);
                    }
                }
            }
            let set = closure(ctx, &seed_mats, cap)?;
            return Ok(handle(ctx, label, seed_mats, SetData::Full(set)));
        }
    }
    // generator route
    let mut seeds = Vec::new();
    for g1 in &h1.gens {
        for g2 in &h2.gens {
            seeds.push(ctx.comm(g1, g2)?);
        }
    }
    let seeds = dedupe(ctx, seeds);
    let mut conj = h1.gens.clone();
    conj.extend(h2.gens.iter().cloned());
    let (set, gens) = normal_closure(ctx, &seeds, &conj, cap)?;
    // validation pass: random elements (or random generator words)
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let sample = |h: &SubgroupHandle, rng: &mut StdRng| -> Mat {
        match &h.set {
            SetData::Full(s) => ctx.unpack(s.get_index(rng.gen_range(0..s.len())).unwrap()),
            SetData::Capped { .. } => {
                let mut m = ctx.identity();
                for _ in 0..4 {
                    let g = &h.gens[rng.gen_range(0..h.gens.len())];
                    m = ctx.mul(&m, g);
                }
                m
            }
        }
    };
    for _ in 0..32 {
        let a = sample(h1, &mut rng);
        let b = sample(h2, &mut rng);
        let c = ctx.comm(&a, &b)?;
        assert!(
            set.contains(&ctx.pack(&c)),
            "mixed commutator validation failed: sampled commutator escapes the closure"
        );
    }
    Ok(handle(ctx, label, gens, SetData::Full(set)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevbasis::StructureTable;
    use crate::group::Representation;
    use crate::ring::FiniteRing;
    use crate::roots::RootSystem;

    fn ctx(spec: &str, ring: &str, kind: RepKind) -> Arc<GroupCtx> {
        let table = StructureTable::new(RootSystem::parse(spec).unwrap());
        let rep = match kind {
            RepKind::Adjoint => Representation::adjoint(table),
            RepKind::Natural => Representation::natural(table).unwrap(),
        };
        GroupCtx::new(rep, FiniteRing::parse(ring).unwrap())
    }

    #[test]
    fn trivial_closure() {
        let c = ctx("A2", "Z/4", RepKind::Natural);
        let set = closure(&c, &[c.identity()], 10).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn sl3_f2_order() {
        let c = ctx("A2", "GF(2)", RepKind::Natural);
        let e = elementary_level(&c, &Ideal::unit(c.ring.clone()), 100_000);
        assert_eq!(e.order(), Some(168));
        assert!(e.audit(16, 7));
    }

    #[test]
    fn cap_reports_partial() {
        let c = ctx("A2", "GF(2)", RepKind::Natural);
        let gens = ambient_e_gens(&c);
        match closure(&c, &gens, 50) {
            Err(SubgroupError::CapExceeded { seen }) => assert!(seen > 50),
            _ => panic!("expected cap"),
        }
    }

    #[test]
    fn level_vs_relative_z4() {
        let c = ctx("A2", "Z/4", RepKind::Natural);
        let a = Ideal::principal(c.ring.clone(), 2);
        let e_level = elementary_level(&c, &a, 100_000);
        let e_rel = relative_elementary(&c, &a, 100_000);
        // containment is strict here: 64 vs 256
        assert_eq!(e_level.order(), Some(64));
        assert_eq!(e_rel.order(), Some(256));
        assert_eq!(e_level.is_subset(&e_rel), Some(true));
        assert_eq!(e_rel.is_subset(&e_level), Some(false));
    }

    #[test]
    fn z_generators_generate_relative() {
        let c = ctx("A2", "Z/4", RepKind::Natural);
        let a = Ideal::principal(c.ring.clone(), 2);
        let e_rel = relative_elementary(&c, &a, 100_000);
        let zs = z_gens(&c, &a, &a);
        let zc = closure(&c, &zs, 100_000).unwrap();
        assert_eq!(Some(zc.len()), e_rel.order());
        if let SetData::Full(s) = &e_rel.set {
            assert!(zc.iter().all(|p| s.contains(p)));
        }
    }

    #[test]
    fn congruence_g_a2_z4() {
        let c = ctx("A2", "Z/4", RepKind::Natural);
        let a = Ideal::principal(c.ring.clone(), 2);
        let g = congruence_subgroup(&c, &a, 100_000).unwrap();
        assert_eq!(g.order(), Some(256));
        // agrees with the Schreier-kernel route
        let mut ambient = ambient_e_gens(&c);
        ambient.extend(torus_elements(&c).into_iter().map(|(m, _)| m));
        let k = congruence_kernel_schreier(&c, &ambient, &a, 10_000, 100_000).unwrap();
        assert_eq!(k.len(), 256);
        if let SetData::Full(s) = &g.set {
            assert!(k.iter().all(|p| s.contains(p)));
        }
    }

    #[test]
    fn pair_subgroup_collapses_on_diagonal() {
        let c = ctx("C2", "Z/4", RepKind::Adjoint);
        let a = Ideal::principal(c.ring.clone(), 2);
        let pair = relative_elementary_pair(&c, &a, &a, 200_000).unwrap();
        let rel = relative_elementary(&c, &a, 200_000);
        assert_eq!(pair.set_eq(&rel), Some(true));
        // inadmissible pair rejected
        let unit = Ideal::unit(c.ring.clone());
        assert!(matches!(
            relative_elementary_pair(&c, &a, &unit, 1000),
            Err(SubgroupError::NotAdmissible)
        ));
    }

    #[test]
    fn mixed_commutator_routes_agree() {
        let c = ctx("A2", "GF(2)", RepKind::Natural);
        let unit = Ideal::unit(c.ring.clone());
        let e = elementary_level(&c, &unit, 100_000);
        // all-pairs route
        let full = mixed_commutator(&e, &e, 100_000).unwrap();
        // forced generator route
        let lean = SubgroupHandle {
            ctx: c.clone(),
            label: e.label.clone(),
            gens: e.gens.clone(),
            set: SetData::Capped { seen: 0 },
        };
        let gen_route = mixed_commutator(&lean, &lean, 100_000).unwrap();
        assert_eq!(full.order(), Some(168)); // SL3(F2) is perfect
        assert_eq!(full.set_eq(&gen_route), Some(true));
    }

    #[test]
    fn commuting_levels_over_z6() {
        let c = ctx("A2", "Z/6", RepKind::Natural);
        let a = relative_elementary(&c, &Ideal::principal(c.ring.clone(), 2), 200_000);
        let b = relative_elementary(&c, &Ideal::principal(c.ring.clone(), 3), 200_000);
        assert_eq!(a.order(), Some(5616));
        assert_eq!(b.order(), Some(168));
        let comm = mixed_commutator(&a, &b, 1000).unwrap();
        assert_eq!(comm.order(), Some(1));
    }

    #[test]
    fn unipotent_and_torus_sizes() {
        let c = ctx("A2", "Z/4", RepKind::Natural);
        let a = Ideal::principal(c.ring.clone(), 2);
        assert_eq!(unipotent_set(&c, &a, true).len(), 8);
        let t = torus_elements(&c);
        assert_eq!(t.len(), 4); // diag(u, v, (uv)^-1), u,v in {1,3}
        let ta = torus_congruence(&c, &a);
        assert_eq!(ta.len(), 4); // all units are = 1 mod 2
    }

    #[test]
    fn ideal_add_gens_span() {
        let r = FiniteRing::parse("Z/4[x]/(x^2)").unwrap();
        let x = r.parse_elt("x").unwrap();
        let m = Ideal::new(r.clone(), vec![r.from_int(2), x]);
        let gens = ideal_add_gens(&m);
        // additive span check
        let span = Ideal::new(r.clone(), gens.clone());
        assert_eq!(span.elements(), m.elements());
        assert!(gens.len() <= 3);
    }
}
