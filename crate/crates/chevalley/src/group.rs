//! Exact matrix realizations of Chevalley group elements over finite
//! commutative rings.
//!
//! The adjoint representation is derived mechanically from the structure
//! table and works for every supported type. Natural representations are
//! built for `A_l` (dimension `l+1`) and `C_l` (dimension `2l`) from the
//! weight diagram of the vector module; their generator matrices satisfy the
//! same structure constants as the adjoint ones, which is asserted by a full
//! bracket check at build time.

use crate::chevbasis::poly::SparseMat;
use crate::chevbasis::StructureTable;
use crate::ring::{FiniteRing, Ideal, RingElt, RingMap};
use crate::roots::{Coweight, RootError, RootIdx, TypeLabel};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("parameter must be a unit")]
    NonUnit,
    #[error("weight elements exist in the adjoint representation only")]
    AdjointOnly,
    #[error("no natural representation for this type")]
    NaturalUnavailable,
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("matrix is not invertible")]
    NotInvertible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepKind {
    Adjoint,
    Natural,
}

impl std::fmt::Display for RepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RepKind::Adjoint => write!(f, "adjoint"),
            RepKind::Natural => write!(f, "natural"),
        }
    }
}

/// A matrix over a finite ring, row-major.
pub type Mat = Vec<RingElt>;

/// Canonical packed form of a matrix, for set storage.
pub type Packed = Box<[u64]>;

/// A representation: per-root divided powers of the generator action, over
/// the integers.
pub struct Representation {
    table: Arc<StructureTable>,
    kind: RepKind,
    dim: usize,
    /// `gen_pows[r][k] = X_r^{k+1} / (k+1)!` where `X_r` acts as `e_r`.
    gen_pows: Vec<Vec<SparseMat>>,
}

impl Representation {
    pub fn adjoint(table: Arc<StructureTable>) -> Arc<Representation> {
        let nr = table.root_system().num_roots();
        let dim = table.dim();
        let gen_pows = (0..nr).map(|r| table.ad_divided_powers(r).to_vec()).collect();
        Arc::new(Representation { table, kind: RepKind::Adjoint, dim, gen_pows })
    }

    /// Natural (vector) representation for `A_l` and `C_l`.
    pub fn natural(table: Arc<StructureTable>) -> Result<Arc<Representation>, GroupError> {
        let rs = table.root_system().clone();
        let l = rs.rank();
        let weights: Vec<Vec<i64>> = match rs.label() {
            TypeLabel::A => (0..=l)
                .map(|k| (0..l).map(|i| (k == i) as i64 - (k == i + 1) as i64).collect())
                .collect(),
            TypeLabel::C => {
                let eps = |k: usize| -> Vec<i64> {
                    (0..l)
                        .map(|i| {
                            if i + 1 < l {
                                (k == i) as i64 - (k == i + 1) as i64
                            } else {
                                (k == l - 1) as i64
                            }
                        })
                        .collect()
                };
                let mut w: Vec<Vec<i64>> = (0..l).map(eps).collect();
                for k in 0..l {
                    w.push(eps(k).iter().map(|x| -x).collect());
                }
                w
            }
            _ => return Err(GroupError::NaturalUnavailable),
        };
        let dense = build_module(&table, &weights);
        let dim = weights.len();
        let nr = rs.num_roots();
        let gen_pows: Vec<Vec<SparseMat>> =
            (0..nr).map(|r| divided_powers_of(&dense[r], dim)).collect();
        Ok(Arc::new(Representation { table, kind: RepKind::Natural, dim, gen_pows }))
    }

    pub fn kind(&self) -> RepKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn table(&self) -> &Arc<StructureTable> {
        &self.table
    }
}

/// Integer matrices for every `e_root` on a multiplicity-one weight module,
/// consistent with the structure table. Signs of the simple generators are
/// searched; the result is validated against the whole bracket table.
fn build_module(table: &Arc<StructureTable>, weights: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rs = table.root_system().clone();
    let l = rs.rank();
    let dim = weights.len();
    let nr = rs.num_roots();
    let widx = |w: &Vec<i64>| weights.iter().position(|x| x == w);

    let transitions: Vec<Vec<(usize, usize)>> = (0..l)
        .map(|i| {
            let row: Vec<i64> = (0..l).map(|j| rs.cartan()[i][j]).collect();
            (0..dim)
                .filter_map(|k| {
                    let target: Vec<i64> =
                        weights[k].iter().zip(&row).map(|(a, b)| a + b).collect();
                    widx(&target).map(|k2| (k, k2))
                })
                .collect()
        })
        .collect();
    for (i, trans) in transitions.iter().enumerate() {
        for &(_, to) in trans {
            assert!(
                !trans.iter().any(|&(f, _)| f == to),
                "weight string longer than 2 for simple root {i}"
            );
        }
    }

    let n_choices: usize = transitions.iter().map(|t| t.len()).sum();
    assert!(n_choices <= 20, "sign search space too large");
    let idx = |r: usize, c: usize| r * dim + c;
    let h_mat = |i: usize| -> Vec<i64> {
        let mut h = vec![0i64; dim * dim];
        for k in 0..dim {
            h[idx(k, k)] = weights[k][i];
        }
        h
    };

    'signs: for mask in 0u32..(1u32 << n_choices) {
        let mut simple_e: Vec<Vec<i64>> = Vec::with_capacity(l);
        let mut simple_f: Vec<Vec<i64>> = Vec::with_capacity(l);
        let mut bit = 0;
        for trans in &transitions {
            let mut e = vec![0i64; dim * dim];
            let mut f = vec![0i64; dim * dim];
            for &(from, to) in trans {
                let s: i64 = if mask >> bit & 1 == 1 { -1 } else { 1 };
                bit += 1;
                e[idx(to, from)] = s;
                // forces [e, f] = h on each 2-string
                f[idx(from, to)] = s;
            }
            simple_e.push(e);
            simple_f.push(f);
        }
        for i in 0..l {
            for j in 0..l {
                let br = mat_comm(&simple_e[i], &simple_f[j], dim);
                let expect = if i == j { h_mat(i) } else { vec![0i64; dim * dim] };
                if br != expect {
                    continue 'signs;
                }
            }
        }

        let mut rho: Vec<Option<Vec<i64>>> = vec![None; nr];
        for i in 0..l {
            rho[rs.fundamental()[i]] = Some(simple_e[i].clone());
            rho[rs.negate(rs.fundamental()[i])] = Some(simple_f[i].clone());
        }
        let mut positives: Vec<RootIdx> = rs.positive().to_vec();
        positives.sort_by_key(|&r| rs.root(r).height());
        let mut extendable = true;
        for &gamma in &positives {
            if rho[gamma].is_some() {
                continue;
            }
            let mut done = false;
            for i in 0..l {
                let alpha = rs.fundamental()[i];
                if let Some(beta) = rs.combination(gamma, 1, alpha, -1) {
                    if rs.is_positive(beta) && rho[beta].is_some() {
                        let n = table.n_const(alpha, beta).expect("bracket constant");
                        let br = mat_comm(&simple_e[i], rho[beta].as_ref().unwrap(), dim);
                        rho[gamma] = Some(div_mat(&br, n));
                        let ng = rs.negate(gamma);
                        let nb = rs.negate(beta);
                        let nn = table.n_const(rs.negate(alpha), nb).expect("bracket constant");
                        let brn = mat_comm(&simple_f[i], rho[nb].as_ref().unwrap(), dim);
                        rho[ng] = Some(div_mat(&brn, nn));
                        done = true;
                        break;
                    }
                }
            }
            if !done {
                extendable = false;
                break;
            }
        }
        if !extendable {
            continue 'signs;
        }
        let rho: Vec<Vec<i64>> = rho.into_iter().map(|m| m.unwrap()).collect();

        let mut ok = true;
        'check: for a in 0..nr {
            for b in 0..nr {
                if a == b {
                    continue;
                }
                let br = mat_comm(&rho[a], &rho[b], dim);
                let mut expect = vec![0i64; dim * dim];
                if rs.negate(a) == b {
                    for (i, &c) in table.coroot(a).iter().enumerate() {
                        for (k, v) in h_mat(i).into_iter().enumerate() {
                            expect[k] += c * v;
                        }
                    }
                } else if let Some(s) = rs.sum(a, b) {
                    let n = table.n_const(a, b).unwrap();
                    for (k, v) in rho[s].iter().enumerate() {
                        expect[k] = n * v;
                    }
                }
                if br != expect {
                    ok = false;
                    break 'check;
                }
            }
        }
        if ok {
            return rho;
        }
    }
    panic!("no consistent sign assignment for the natural module");
}

fn mat_mul_int(a: &[i64], b: &[i64], dim: usize) -> Vec<i64> {
    let mut out = vec![0i64; dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let v = a[i * dim + k];
            if v != 0 {
                for j in 0..dim {
                    out[i * dim + j] += v * b[k * dim + j];
                }
            }
        }
    }
    out
}

fn mat_comm(a: &[i64], b: &[i64], dim: usize) -> Vec<i64> {
    let ab = mat_mul_int(a, b, dim);
    let ba = mat_mul_int(b, a, dim);
    ab.iter().zip(&ba).map(|(x, y)| x - y).collect()
}

fn div_mat(m: &[i64], d: i64) -> Vec<i64> {
    m.iter()
        .map(|&v| {
            assert_eq!(v % d, 0, "module construction produced a fraction");
            v / d
        })
        .collect()
}

fn divided_powers_of(x: &[i64], dim: usize) -> Vec<SparseMat> {
    let to_sparse = |m: &[i64]| -> SparseMat {
        let mut s = SparseMat::zero(dim);
        for j in 0..dim {
            for i in 0..dim {
                if m[i * dim + j] != 0 {
                    s.cols[j].push((i, m[i * dim + j]));
                }
            }
        }
        s
    };
    let mut pows = vec![to_sparse(x)];
    let mut plain = x.to_vec();
    let mut factorial = 1i64;
    for k in 2..=8i64 {
        plain = mat_mul_int(&plain, x, dim);
        if plain.iter().all(|&v| v == 0) {
            return pows;
        }
        factorial *= k;
        let divided: Vec<i64> = plain
            .iter()
            .map(|&v| {
                assert_eq!(v % factorial, 0, "divided power is not integral");
                v / factorial
            })
            .collect();
        pows.push(to_sparse(&divided));
    }
    panic!("generator action is not nilpotent");
}

/// A generator symbol: a root element with its parameter. Words of these
/// evaluate in any representation over the same root system and ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gen {
    pub root: RootIdx,
    pub t: RingElt,
}

/// The computing context for one `(representation, ring)` pair.
pub struct GroupCtx {
    pub rep: Arc<Representation>,
    pub ring: Arc<FiniteRing>,
    bits: u32,
}

impl GroupCtx {
    pub fn new(rep: Arc<Representation>, ring: Arc<FiniteRing>) -> Arc<GroupCtx> {
        let bits = (usize::BITS - (ring.size() - 1).leading_zeros()).max(1);
        Arc::new(GroupCtx { rep, ring, bits })
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn identity(&self) -> Mat {
        let n = self.dim();
        let mut m = vec![self.ring.zero(); n * n];
        for i in 0..n {
            m[i * n + i] = self.ring.one();
        }
        m
    }

    pub fn is_identity(&self, m: &Mat) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { self.ring.one() } else { self.ring.zero() };
                if m[i * n + j] != want {
                    return false;
                }
            }
        }
        true
    }

    pub fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        let n = self.dim();
        let r = &*self.ring;
        let mut out = vec![r.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a[i * n + k];
                if x == 0 {
                    continue;
                }
                for j in 0..n {
                    let y = b[k * n + j];
                    if y != 0 {
                        out[i * n + j] = r.add(out[i * n + j], r.mul(x, y));
                    }
                }
            }
        }
        out
    }

    /// Inverse over the ring, by unit-pivot elimination per local factor.
    pub fn inverse(&self, m: &Mat) -> Result<Mat, GroupError> {
        if self.ring.is_local() {
            return gauss_inverse(&self.ring, m, self.dim());
        }
        let n = self.dim();
        let factors = self.ring.local_factors();
        let mut out = vec![self.ring.zero(); n * n];
        for f in factors {
            let proj: Mat = m.iter().map(|&x| f.project[x as usize]).collect();
            let inv = gauss_inverse(&f.ring, &proj, n)?;
            for (k, &v) in inv.iter().enumerate() {
                out[k] = self.ring.add(out[k], f.lift[v as usize]);
            }
        }
        Ok(out)
    }

    pub fn conj(&self, g: &Mat, x: &Mat) -> Result<Mat, GroupError> {
        let gi = self.inverse(g)?;
        Ok(self.mul(&self.mul(g, x), &gi))
    }

    pub fn comm(&self, x: &Mat, y: &Mat) -> Result<Mat, GroupError> {
        let xi = self.inverse(x)?;
        let yi = self.inverse(y)?;
        Ok(self.mul(&self.mul(x, y), &self.mul(&xi, &yi)))
    }

    /// Root unipotent `x_alpha(t)`.
    pub fn x_alpha(&self, alpha: RootIdx, t: RingElt) -> Mat {
        let n = self.dim();
        let r = &*self.ring;
        let mut m = self.identity();
        let mut tp = t;
        for pow in &self.rep.gen_pows[alpha] {
            if tp == 0 {
                break;
            }
            for (j, col) in pow.cols.iter().enumerate() {
                for &(i, v) in col {
                    let add = r.mul(r.from_int(v), tp);
                    m[i * n + j] = r.add(m[i * n + j], add);
                }
            }
            tp = r.mul(tp, t);
        }
        m
    }

    /// `w_alpha(t) = x_alpha(t) x_{-alpha}(-1/t) x_alpha(t)`; `t` must be a unit.
    pub fn w_alpha(&self, alpha: RootIdx, t: RingElt) -> Result<Mat, GroupError> {
        Ok(self.eval_word(&self.w_alpha_word(alpha, t)?))
    }

    /// `h_alpha(t) = w_alpha(t) w_alpha(1)^{-1}`.
    pub fn h_alpha(&self, alpha: RootIdx, t: RingElt) -> Result<Mat, GroupError> {
        Ok(self.eval_word(&self.h_alpha_word(alpha, t)?))
    }

    pub fn w_alpha_word(&self, alpha: RootIdx, t: RingElt) -> Result<Vec<Gen>, GroupError> {
        let ti = self.ring.inv(t).ok_or(GroupError::NonUnit)?;
        let na = self.rep.table.root_system().negate(alpha);
        Ok(vec![
            Gen { root: alpha, t },
            Gen { root: na, t: self.ring.neg(ti) },
            Gen { root: alpha, t },
        ])
    }

    pub fn h_alpha_word(&self, alpha: RootIdx, t: RingElt) -> Result<Vec<Gen>, GroupError> {
        let mut w = self.w_alpha_word(alpha, t)?;
        let back = self.w_alpha_word(alpha, self.ring.one())?;
        for g in back.into_iter().rev() {
            w.push(Gen { root: g.root, t: self.ring.neg(g.t) });
        }
        Ok(w)
    }

    /// Weight element `h_omega(eps)`: diagonal on the root spaces, identity
    /// on the Cartan block. Adjoint representation only.
    pub fn h_omega(&self, omega: &Coweight, eps: RingElt) -> Result<Mat, GroupError> {
        if self.rep.kind != RepKind::Adjoint {
            return Err(GroupError::AdjointOnly);
        }
        let ei = self.ring.inv(eps).ok_or(GroupError::NonUnit)?;
        let rs = self.rep.table.root_system().clone();
        let n = self.dim();
        let mut m = self.identity();
        for r in 0..rs.num_roots() {
            let k = rs.coweight_pairing(omega, r)?;
            m[r * n + r] = if k >= 0 {
                self.ring.pow(eps, k as usize)
            } else {
                self.ring.pow(ei, (-k) as usize)
            };
        }
        Ok(m)
    }

    /// Entrywise image of a matrix under a ring map.
    pub fn apply_ring_map(&self, map: &RingMap, m: &Mat) -> Mat {
        debug_assert!(*map.src() == self.ring);
        m.iter().map(|&x| map.apply(x)).collect()
    }

    /// Is every entry of `m - 1` inside the ideal?
    pub fn congruent_to_identity(&self, m: &Mat, a: &Ideal) -> bool {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { self.ring.one() } else { self.ring.zero() };
                if !a.contains(self.ring.sub(m[i * n + j], want)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn eval_word(&self, word: &[Gen]) -> Mat {
        let mut m = self.identity();
        for g in word {
            m = self.mul(&m, &self.x_alpha(g.root, g.t));
        }
        m
    }

    pub fn invert_word(word: &[Gen], ring: &FiniteRing) -> Vec<Gen> {
        word.iter().rev().map(|g| Gen { root: g.root, t: ring.neg(g.t) }).collect()
    }

    pub fn pack(&self, m: &Mat) -> Packed {
        let bits = self.bits;
        let total_bits = m.len() as u32 * bits;
        let words = total_bits.div_ceil(64) as usize;
        let mut out = vec![0u64; words];
        let mut pos = 0u32;
        for &x in m {
            let w = (pos / 64) as usize;
            let off = pos % 64;
            out[w] |= (x as u64) << off;
            if off + bits > 64 {
                out[w + 1] |= (x as u64) >> (64 - off);
            }
            pos += bits;
        }
        out.into_boxed_slice()
    }

    pub fn unpack(&self, p: &[u64]) -> Mat {
        let bits = self.bits;
        let n = self.dim() * self.dim();
        let mask = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        let mut out = Vec::with_capacity(n);
        let mut pos = 0u32;
        for _ in 0..n {
            let w = (pos / 64) as usize;
            let off = pos % 64;
            let mut v = p[w] >> off;
            if off + bits > 64 {
                v |= p[w + 1] << (64 - off);
            }
            out.push((v & mask) as RingElt);
            pos += bits;
        }
        out
    }

    /// Canonical text form: ring spec, representation kind, flat entries.
    pub fn canonical_text(&self, m: &Mat) -> String {
        let entries: Vec<&str> = m.iter().map(|&x| self.ring.name(x)).collect();
        format!("{}|{}|[{}]", self.ring.spec(), self.rep.kind(), entries.join(","))
    }
}

fn gauss_inverse(ring: &Arc<FiniteRing>, m: &Mat, n: usize) -> Result<Mat, GroupError> {
    let r = &**ring;
    let mut a = m.clone();
    let mut inv: Mat = {
        let mut id = vec![r.zero(); n * n];
        for i in 0..n {
            id[i * n + i] = r.one();
        }
        id
    };
    for col in 0..n {
        let pivot = (col..n)
            .find(|&row| r.is_unit(a[row * n + col]))
            .ok_or(GroupError::NotInvertible)?;
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
                inv.swap(col * n + j, pivot * n + j);
            }
        }
        let scale = r.inv(a[col * n + col]).unwrap();
        for j in 0..n {
            a[col * n + j] = r.mul(a[col * n + j], scale);
            inv[col * n + j] = r.mul(inv[col * n + j], scale);
        }
        for row in 0..n {
            if row == col {
                continue;
            }
            let factor = a[row * n + col];
            if factor == 0 {
                continue;
            }
            for j in 0..n {
                let sub_a = r.mul(factor, a[col * n + j]);
                a[row * n + j] = r.sub(a[row * n + j], sub_a);
                let sub_i = r.mul(factor, inv[col * n + j]);
                inv[row * n + j] = r.sub(inv[row * n + j], sub_i);
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chevbasis::StructureTable;
    use crate::roots::{LengthClass, RootSystem};

    fn ctx(spec: &str, ring: &str, kind: RepKind) -> Arc<GroupCtx> {
        let rs = RootSystem::parse(spec).unwrap();
        let table = StructureTable::new(rs);
        let rep = match kind {
            RepKind::Adjoint => Representation::adjoint(table),
            RepKind::Natural => Representation::natural(table).unwrap(),
        };
        GroupCtx::new(rep, FiniteRing::parse(ring).unwrap())
    }

    fn mul_ring(c: &GroupCtx, a: &Mat, b: &Mat) -> Mat {
        let n = c.dim();
        let r = &*c.ring;
        let mut out = vec![r.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                if a[i * n + k] == 0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] = r.add(out[i * n + j], r.mul(a[i * n + k], b[k * n + j]));
                }
            }
        }
        out
    }

    #[test]
    fn additivity() {
        let c = ctx("A2", "Z/8", RepKind::Adjoint);
        let rs = c.rep.table().root_system().clone();
        for alpha in 0..rs.num_roots() {
            assert!(c.is_identity(&c.x_alpha(alpha, 0)));
            for a in c.ring.elements() {
                for b in c.ring.elements() {
                    let lhs = c.mul(&c.x_alpha(alpha, a), &c.x_alpha(alpha, b));
                    assert_eq!(lhs, c.x_alpha(alpha, c.ring.add(a, b)));
                }
            }
        }
        let alpha = rs.fundamental()[0];
        assert_eq!(c.mul(&c.x_alpha(alpha, 2), &c.x_alpha(alpha, 3)), c.x_alpha(alpha, 5));
    }

    #[test]
    fn unipotency_a2_adjoint() {
        let c = ctx("A2", "Z/9", RepKind::Adjoint);
        let rs = c.rep.table().root_system().clone();
        for alpha in 0..rs.num_roots() {
            for t in c.ring.elements() {
                let x = c.x_alpha(alpha, t);
                let id = c.identity();
                let d: Mat = x.iter().zip(&id).map(|(&p, &q)| c.ring.sub(p, q)).collect();
                let d2 = mul_ring(&c, &d, &d);
                let d3 = mul_ring(&c, &d2, &d);
                assert!(d3.iter().all(|&v| v == 0));
            }
        }
    }

    #[test]
    fn commutator_formula_matches_expansion() {
        for (sys, ring, kind) in [
            ("A2", "Z/4", RepKind::Adjoint),
            ("A2", "Z/4", RepKind::Natural),
            ("C2", "Z/9", RepKind::Adjoint),
            ("C2", "GF(4)", RepKind::Natural),
            ("G2", "GF(4)", RepKind::Adjoint),
        ] {
            let c = ctx(sys, ring, kind);
            let table = c.rep.table().clone();
            let rs = table.root_system().clone();
            for a in 0..rs.num_roots() {
                for b in 0..rs.num_roots() {
                    if a == b || rs.negate(a) == b {
                        continue;
                    }
                    for s in c.ring.elements() {
                        for t in c.ring.elements() {
                            let lhs = c.comm(&c.x_alpha(a, s), &c.x_alpha(b, t)).unwrap();
                            let mut rhs = c.identity();
                            for (root, arg) in
                                table.commutator_expansion(&c.ring, a, b, s, t).unwrap()
                            {
                                rhs = c.mul(&rhs, &c.x_alpha(root, arg));
                            }
                            assert_eq!(lhs, rhs, "{sys}/{ring}/{kind:?} pair ({a},{b})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weyl_action() {
        let c = ctx("C2", "GF(4)", RepKind::Adjoint);
        let rs = c.rep.table().root_system().clone();
        for alpha in 0..rs.num_roots() {
            let w = c.w_alpha(alpha, c.ring.one()).unwrap();
            for beta in 0..rs.num_roots() {
                let target = rs.reflect(alpha, beta);
                for t in c.ring.elements() {
                    let conj = c.conj(&w, &c.x_alpha(beta, t)).unwrap();
                    let plus = c.x_alpha(target, t);
                    let minus = c.x_alpha(target, c.ring.neg(t));
                    assert!(conj == plus || conj == minus);
                }
            }
        }
    }

    #[test]
    fn torus_action() {
        let c = ctx("A2", "Z/9", RepKind::Adjoint);
        let rs = c.rep.table().root_system().clone();
        for alpha in 0..rs.num_roots() {
            assert!(c.is_identity(&c.h_alpha(alpha, c.ring.one()).unwrap()));
            for t in c.ring.units() {
                let h = c.h_alpha(alpha, t).unwrap();
                for xi in c.ring.elements() {
                    let lhs = c.conj(&h, &c.x_alpha(alpha, xi)).unwrap();
                    let t2 = c.ring.mul(t, t);
                    assert_eq!(lhs, c.x_alpha(alpha, c.ring.mul(t2, xi)));
                }
            }
        }
        assert_eq!(c.h_alpha(rs.fundamental()[0], 3).unwrap_err(), GroupError::NonUnit);
    }

    #[test]
    fn weight_element_action() {
        let c = ctx("C2", "Z/9", RepKind::Adjoint);
        let rs = c.rep.table().root_system().clone();
        let omega = rs.coweight("w2").unwrap();
        assert!(c.is_identity(&c.h_omega(&omega, c.ring.one()).unwrap()));
        for eps in c.ring.units() {
            let h = c.h_omega(&omega, eps).unwrap();
            for alpha in 0..rs.num_roots() {
                let k = rs.coweight_pairing(&omega, alpha).unwrap();
                for xi in c.ring.elements() {
                    let lhs = c.conj(&h, &c.x_alpha(alpha, xi)).unwrap();
                    let factor = if k >= 0 {
                        c.ring.pow(eps, k as usize)
                    } else {
                        c.ring.pow(c.ring.inv(eps).unwrap(), (-k) as usize)
                    };
                    assert_eq!(lhs, c.x_alpha(alpha, c.ring.mul(factor, xi)));
                }
                if rs.is_positive(alpha) && rs.root(alpha).length == LengthClass::Long {
                    assert_eq!(k, 1);
                }
            }
        }
        let cn = ctx("C2", "Z/9", RepKind::Natural);
        assert_eq!(cn.h_omega(&omega, 2).unwrap_err(), GroupError::AdjointOnly);
    }

    #[test]
    fn ring_map_is_homomorphism_on_generators() {
        let z4 = FiniteRing::parse("Z/4").unwrap();
        let two = Ideal::principal(z4.clone(), 2);
        let (_q, red) = z4.quotient(&two);
        let rs = RootSystem::parse("A2").unwrap();
        let rep = Representation::natural(StructureTable::new(rs.clone())).unwrap();
        let c4 = GroupCtx::new(rep.clone(), z4.clone());
        let cq = GroupCtx::new(rep, red.dst().clone());
        let alpha = rs.fundamental()[0];
        assert!(cq.is_identity(&c4.apply_ring_map(&red, &c4.x_alpha(alpha, 2))));
        for a in 0..rs.num_roots() {
            for t in z4.elements() {
                for b in 0..rs.num_roots() {
                    for u in z4.elements() {
                        let prod = c4.mul(&c4.x_alpha(a, t), &c4.x_alpha(b, u));
                        let img = c4.apply_ring_map(&red, &prod);
                        let prod_img = cq.mul(
                            &c4.apply_ring_map(&red, &c4.x_alpha(a, t)),
                            &c4.apply_ring_map(&red, &c4.x_alpha(b, u)),
                        );
                        assert_eq!(img, prod_img);
                    }
                }
            }
        }
    }

    #[test]
    fn congruence_test() {
        let c = ctx("A2", "Z/4", RepKind::Natural);
        let two = Ideal::principal(c.ring.clone(), 2);
        assert!(c.congruent_to_identity(&c.identity(), &two));
        let rs = c.rep.table().root_system().clone();
        let alpha = rs.fundamental()[0];
        assert!(c.congruent_to_identity(&c.x_alpha(alpha, 2), &two));
        assert!(!c.congruent_to_identity(&c.x_alpha(alpha, 1), &two));
    }

    #[test]
    fn inverse_over_product_ring() {
        let c = ctx("A2", "Z/6", RepKind::Natural);
        let rs = c.rep.table().root_system().clone();
        for alpha in 0..rs.num_roots() {
            for t in c.ring.elements() {
                let x = c.x_alpha(alpha, t);
                let xi = c.inverse(&x).unwrap();
                assert!(c.is_identity(&c.mul(&x, &xi)));
            }
        }
        let h = c.h_alpha(rs.fundamental()[1], 5).unwrap();
        let hi = c.inverse(&h).unwrap();
        assert!(c.is_identity(&c.mul(&h, &hi)));
    }

    #[test]
    fn pack_roundtrip() {
        let c = ctx("C2", "Z/9", RepKind::Adjoint);
        let rs = c.rep.table().root_system().clone();
        let m = c.mul(&c.x_alpha(3, 5), &c.x_alpha(rs.negate(3), 7));
        assert_eq!(c.unpack(&c.pack(&m)), m);
    }

    #[test]
    fn words_evaluate() {
        let c = ctx("A2", "Z/8", RepKind::Natural);
        let rs = c.rep.table().root_system().clone();
        let alpha = rs.fundamental()[0];
        let w = c.h_alpha_word(alpha, 3).unwrap();
        assert_eq!(c.eval_word(&w), c.h_alpha(alpha, 3).unwrap());
        let inv = GroupCtx::invert_word(&w, &c.ring);
        assert!(c.is_identity(&c.mul(&c.eval_word(&w), &c.eval_word(&inv))));
    }
}
