//! Chevalley basis of the simple Lie algebra of type Phi, with integer
//! structure constants, and the coefficient tables of the commutator formula.
//!
//! Constants are fixed by the usual convention: on extraspecial pairs the
//! constant is `+(p+1)`; everything else is forced from there. The commutator
//! coefficients `N_{ab,ij}` are not copied from any published table. They are
//! derived symbolically: the group commutator of two exponentials is computed
//! over `Z[a,b]` in the adjoint module and peeled into root factors in the
//! frozen root order, and the derivation asserts that the peeled product
//! multiplies back to the commutator exactly.

pub(crate) mod poly;

use crate::ring::{FiniteRing, RingElt};
use crate::roots::{LengthClass, RootError, RootIdx, RootSystem, TypeLabel};
use poly::{apply_exp, Poly2, PolyMat, SparseMat};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BasisError {
    #[error("the commutator formula does not apply to opposite roots")]
    OppositeRoots,
    #[error("cannot parse structure table dump: {0}")]
    ParseError(String),
}

/// One factor `x_{i a + j b}(coeff * a^i b^j)` of a commutator expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommTerm {
    pub i: usize,
    pub j: usize,
    pub root: RootIdx,
    pub coeff: i64,
}

/// Basis index space of the adjoint module: roots first (in the frozen root
/// order), then the Cartan elements `h_1 .. h_l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisElt {
    Root(RootIdx),
    Cartan(usize),
}

pub struct StructureTable {
    rs: Arc<RootSystem>,
    /// `N_{ab}` for ordered pairs with `a + b` a root.
    n: HashMap<(RootIdx, RootIdx), i64>,
    /// Coroot of each root over the simple coroot basis.
    coroot: Vec<Vec<i64>>,
    /// Divided powers of `ad e_a` per root: `pows[k] = (ad e_a)^{k+1}/(k+1)!`.
    ad_pows: Vec<Vec<SparseMat>>,
    comm: OnceLock<HashMap<(RootIdx, RootIdx), Vec<CommTerm>>>,
}

impl StructureTable {
    pub fn new(rs: Arc<RootSystem>) -> Arc<StructureTable> {
        let n = derive_constants(&rs);
        let nr = rs.num_roots();
        let coroot: Vec<Vec<i64>> = (0..nr)
            .map(|a| {
                let root = rs.root(a);
                let da = rs.d_of(a);
                (0..rs.rank())
                    .map(|i| {
                        let di = rs.inner(rs.fundamental()[i], rs.fundamental()[i]) / 2;
                        let num = root.coords[i] * di;
                        assert_eq!(num % da, 0, "coroot is not integral");
                        num / da
                    })
                    .collect()
            })
            .collect();
        let mut table = StructureTable { rs, n, coroot, ad_pows: Vec::new(), comm: OnceLock::new() };
        table.ad_pows = (0..nr).map(|a| table.divided_powers(a)).collect();
        Arc::new(table)
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    /// Adjoint dimension `|Phi| + rank`.
    pub fn dim(&self) -> usize {
        self.rs.num_roots() + self.rs.rank()
    }

    /// `N_{ab}` for a pair of roots whose sum is a root.
    pub fn n_const(&self, a: RootIdx, b: RootIdx) -> Option<i64> {
        self.n.get(&(a, b)).copied()
    }

    pub fn coroot(&self, a: RootIdx) -> &[i64] {
        &self.coroot[a]
    }

    /// Lie bracket of two basis elements, as a sparse combination.
    pub fn bracket(&self, x: BasisElt, y: BasisElt) -> Vec<(BasisElt, i64)> {
        match (x, y) {
            (BasisElt::Cartan(_), BasisElt::Cartan(_)) => Vec::new(),
            (BasisElt::Cartan(i), BasisElt::Root(b)) => {
                vec![(BasisElt::Root(b), self.rs.pairing_simple(b, i))]
            }
            (BasisElt::Root(b), BasisElt::Cartan(i)) => {
                vec![(BasisElt::Root(b), -self.rs.pairing_simple(b, i))]
            }
            (BasisElt::Root(a), BasisElt::Root(b)) => {
                if self.rs.negate(a) == b {
                    self.coroot[a]
                        .iter()
                        .enumerate()
                        .filter(|(_, &c)| c != 0)
                        .map(|(i, &c)| (BasisElt::Cartan(i), c))
                        .collect()
                } else if let Some(s) = self.rs.sum(a, b) {
                    vec![(BasisElt::Root(s), self.n[&(a, b)])]
                } else {
                    Vec::new()
                }
            }
        }
    }

    fn basis_index(&self, e: BasisElt) -> usize {
        match e {
            BasisElt::Root(r) => r,
            BasisElt::Cartan(i) => self.rs.num_roots() + i,
        }
    }

    fn basis_elt(&self, i: usize) -> BasisElt {
        if i < self.rs.num_roots() {
            BasisElt::Root(i)
        } else {
            BasisElt::Cartan(i - self.rs.num_roots())
        }
    }

    /// `ad e_a` as a sparse matrix on the adjoint basis.
    fn ad_matrix(&self, a: RootIdx) -> SparseMat {
        let dim = self.dim();
        let mut m = SparseMat::zero(dim);
        for j in 0..dim {
            for (e, v) in self.bracket(BasisElt::Root(a), self.basis_elt(j)) {
                m.cols[j].push((self.basis_index(e), v));
            }
        }
        m
    }

    /// Divided powers of `ad e_a`, asserting integrality. The list stops at
    /// the nilpotency degree.
    fn divided_powers(&self, a: RootIdx) -> Vec<SparseMat> {
        let ad = self.ad_matrix(a);
        let mut pows = vec![ad.clone()];
        let mut k = 1i64;
        loop {
            k += 1;
            let next = pows.last().unwrap().mul(&ad).div_exact(k);
            if next.is_zero() {
                break;
            }
            pows.push(next);
        }
        pows
    }

    pub fn ad_divided_powers(&self, a: RootIdx) -> &[SparseMat] {
        &self.ad_pows[a]
    }

    /// The full commutator coefficient table, derived on first use.
    pub fn comm_table(&self) -> &HashMap<(RootIdx, RootIdx), Vec<CommTerm>> {
        self.comm.get_or_init(|| {
            let nr = self.rs.num_roots();
            let mut out = HashMap::new();
            for a in 0..nr {
                for b in 0..nr {
                    if a == b || self.rs.negate(a) == b {
                        continue;
                    }
                    out.insert((a, b), self.derive_pair(a, b));
                }
            }
            out
        })
    }

    /// Ordered factors of `[x_a(s), x_b(t)]`, in the frozen root order.
    pub fn expansion(&self, a: RootIdx, b: RootIdx) -> Result<&[CommTerm], BasisError> {
        if a == b || self.rs.negate(a) == b {
            return Err(BasisError::OppositeRoots);
        }
        Ok(&self.comm_table()[&(a, b)])
    }

    /// Evaluate the right-hand side of the commutator formula over a ring:
    /// the ordered list of `(root, N * s^i * t^j)`.
    pub fn commutator_expansion(
        &self,
        ring: &FiniteRing,
        a: RootIdx,
        b: RootIdx,
        s: RingElt,
        t: RingElt,
    ) -> Result<Vec<(RootIdx, RingElt)>, BasisError> {
        Ok(self
            .expansion(a, b)?
            .iter()
            .map(|term| {
                let mut v = ring.from_int(term.coeff);
                for _ in 0..term.i {
                    v = ring.mul(v, s);
                }
                for _ in 0..term.j {
                    v = ring.mul(v, t);
                }
                (term.root, v)
            })
            .collect())
    }

    /// Candidate factor roots `i a + j b` for a pair, with `i, j >= 1`.
    fn factor_roots(&self, a: RootIdx, b: RootIdx) -> Vec<(usize, usize, RootIdx)> {
        let mut out = Vec::new();
        for i in 1..=3usize {
            for j in 1..=3usize {
                if let Some(r) = self.rs.combination(a, i as i64, b, j as i64) {
                    out.push((i, j, r));
                }
            }
        }
        out
    }

    /// Peel a unipotent poly-matrix into factors ordered by grade `(i+j, j)`.
    /// Returns the parameter polynomial per `(i, j)`; exact by construction.
    fn peel_grade(
        &self,
        factors: &[(usize, usize, RootIdx)],
        m: &PolyMat,
    ) -> HashMap<(usize, usize), Poly2> {
        let mut order: Vec<_> = factors.to_vec();
        order.sort_by_key(|&(i, j, _)| (i + j, j));
        let mut cur = m.clone();
        let mut out = HashMap::new();
        for &(i, j, gamma) in &order {
            let t = (0..self.rs.rank())
                .find(|&t| self.rs.pairing_simple(gamma, t) != 0)
                .expect("root pairs nontrivially with some simple coroot");
            let h_col = self.rs.num_roots() + t;
            let coeff = cur.cols[h_col]
                .iter()
                .find(|(row, _)| *row == gamma)
                .map(|(_, p)| p.clone())
                .unwrap_or_else(Poly2::zero);
            let param = coeff.div_exact(-self.rs.pairing_simple(gamma, t));
            if !param.is_zero() {
                // strip the factor from the left
                let neg = param.scale(-1);
                cur = apply_exp(self.dim(), &self.ad_pows[gamma], &neg, &cur);
            }
            out.insert((i, j), param);
        }
        assert!(cur.is_identity(), "grade peel did not exhaust the commutator");
        out
    }

    /// Product of root factors in a given order, as a poly-matrix.
    fn factor_product(
        &self,
        order: &[(usize, usize, RootIdx)],
        params: &HashMap<(usize, usize), Poly2>,
        invert: bool,
    ) -> PolyMat {
        let mut m = PolyMat::identity(self.dim());
        // Build by multiplying on the left in reverse order so the product
        // reads left-to-right along `order`.
        let seq: Vec<_> = if invert {
            order.to_vec()
        } else {
            order.iter().rev().cloned().collect()
        };
        for (i, j, gamma) in seq {
            let mut p = params[&(i, j)].clone();
            if invert {
                p = p.scale(-1);
            }
            if !p.is_zero() {
                m = apply_exp(self.dim(), &self.ad_pows[gamma], &p, &m);
            }
        }
        m
    }

    /// Derive the ordered coefficient list for one pair by symbolic peeling
    /// and refitting to the frozen root order.
    fn derive_pair(&self, a: RootIdx, b: RootIdx) -> Vec<CommTerm> {
        let dim = self.dim();
        let factors = self.factor_roots(a, b);

        // M = x_a(s) x_b(t) x_a(-s) x_b(-t) over Z[s,t].
        let s = Poly2::monomial(1, 1, 0);
        let t = Poly2::monomial(1, 0, 1);
        let mut m = PolyMat::identity(dim);
        m = apply_exp(dim, &self.ad_pows[b], &t.scale(-1), &m);
        m = apply_exp(dim, &self.ad_pows[a], &s.scale(-1), &m);
        m = apply_exp(dim, &self.ad_pows[b], &t, &m);
        m = apply_exp(dim, &self.ad_pows[a], &s, &m);

        if factors.is_empty() {
            assert!(m.is_identity(), "commuting pair expands nontrivially");
            return Vec::new();
        }

        // Target order: frozen root order of the factor roots.
        let mut order = factors.clone();
        order.sort_by_key(|&(_, _, r)| r);

        // Initial guess from a grade-ordered peel, then refit to the target
        // order; each round strictly deepens the matched filtration.
        let mut params = self.peel_grade(&factors, &m);
        for _round in 0..8 {
            let f_inv = self.factor_product(&order, &params, true);
            let residual = poly_mul(&f_inv, &m);
            if residual.is_identity() {
                break;
            }
            let delta = self.peel_grade(&factors, &residual);
            let mut changed = false;
            for (key, d) in delta {
                if !d.is_zero() {
                    params.get_mut(&key).unwrap().add_assign(&d);
                    changed = true;
                }
            }
            assert!(changed, "refit stalled");
        }
        let f_inv = self.factor_product(&order, &params, true);
        assert!(poly_mul(&f_inv, &m).is_identity(), "ordered refit failed to converge");

        order
            .iter()
            .map(|&(i, j, root)| {
                let p = &params[&(i, j)];
                let (v, ia, ib) = p
                    .as_monomial()
                    .expect("commutator coefficient is a monomial");
                assert_eq!((ia, ib), (i, j), "monomial degree mismatch");
                CommTerm { i, j, root, coeff: v }
            })
            .collect()
    }

    /// Canonical text dump of the table (golden-file format).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let rs = &self.rs;
        writeln!(out, "system {}", rs).unwrap();
        writeln!(out, "roots {}", rs.num_roots()).unwrap();
        for r in rs.roots() {
            let coords: Vec<String> = r.coords.iter().map(|c| c.to_string()).collect();
            writeln!(
                out,
                "root {} {}",
                coords.join(","),
                if r.length == LengthClass::Short { "short" } else { "long" }
            )
            .unwrap();
        }
        let mut pairs: Vec<_> = self.n.iter().collect();
        pairs.sort();
        for (&(a, b), &v) in pairs {
            writeln!(out, "N {} {} {}", a, b, v).unwrap();
        }
        let table = self.comm_table();
        let mut keys: Vec<_> = table.keys().copied().collect();
        keys.sort();
        for (a, b) in keys {
            let terms: Vec<String> = table[&(a, b)]
                .iter()
                .map(|t| format!("{}:{}:{}:{}", t.i, t.j, t.root, t.coeff))
                .collect();
            writeln!(out, "C {} {} {}", a, b, terms.join(" ")).unwrap();
        }
        out
    }

    /// Parse a dump back into `(N, comm)` maps and check it against this
    /// table. Used by golden-file regression tests.
    pub fn matches_dump(&self, dump: &str) -> Result<bool, BasisError> {
        let mut n = HashMap::new();
        let mut comm: HashMap<(RootIdx, RootIdx), Vec<CommTerm>> = HashMap::new();
        for line in dump.lines() {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.first() {
                Some(&"N") => {
                    if parts.len() != 4 {
                        return Err(BasisError::ParseError(line.into()));
                    }
                    let key = (
                        parts[1].parse().map_err(|_| BasisError::ParseError(line.into()))?,
                        parts[2].parse().map_err(|_| BasisError::ParseError(line.into()))?,
                    );
                    let v = parts[3].parse().map_err(|_| BasisError::ParseError(line.into()))?;
                    n.insert(key, v);
                }
                Some(&"C") => {
                    let a = parts[1].parse().map_err(|_| BasisError::ParseError(line.into()))?;
                    let b = parts[2].parse().map_err(|_| BasisError::ParseError(line.into()))?;
                    let mut terms = Vec::new();
                    for t in &parts[3..] {
                        let f: Vec<&str> = t.split(':').collect();
                        if f.len() != 4 {
                            return Err(BasisError::ParseError(line.into()));
                        }
                        terms.push(CommTerm {
                            i: f[0].parse().map_err(|_| BasisError::ParseError(line.into()))?,
                            j: f[1].parse().map_err(|_| BasisError::ParseError(line.into()))?,
                            root: f[2].parse().map_err(|_| BasisError::ParseError(line.into()))?,
                            coeff: f[3].parse().map_err(|_| BasisError::ParseError(line.into()))?,
                        });
                    }
                    comm.insert((a, b), terms);
                }
                _ => {}
            }
        }
        Ok(n == self.n && comm == *self.comm_table())
    }

    /// Jacobi identity on every basis triple; exhaustive.
    pub fn jacobi_holds(&self) -> bool {
        let dim = self.dim();
        let dense_bracket = |x: usize, y: usize| -> Vec<i64> {
            let mut out = vec![0i64; dim];
            for (e, v) in self.bracket(self.basis_elt(x), self.basis_elt(y)) {
                out[self.basis_index(e)] += v;
            }
            out
        };
        let bracket_vec = |v: &[i64], z: usize| -> Vec<i64> {
            let mut out = vec![0i64; dim];
            for (x, &c) in v.iter().enumerate() {
                if c != 0 {
                    for (e, w) in self.bracket(self.basis_elt(x), self.basis_elt(z)) {
                        out[self.basis_index(e)] += c * w;
                    }
                }
            }
            out
        };
        for x in 0..dim {
            for y in x..dim {
                let xy = dense_bracket(x, y);
                for z in y..dim {
                    let yz = dense_bracket(y, z);
                    let zx = dense_bracket(z, x);
                    let mut total = bracket_vec(&xy, z);
                    for (i, v) in bracket_vec(&yz, x).into_iter().enumerate() {
                        total[i] += v;
                    }
                    for (i, v) in bracket_vec(&zx, y).into_iter().enumerate() {
                        total[i] += v;
                    }
                    if total.iter().any(|&v| v != 0) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn poly_mul(a: &PolyMat, b: &PolyMat) -> PolyMat {
    let dim = a.dim;
    let mut out = PolyMat { dim, cols: Vec::with_capacity(dim) };
    for j in 0..dim {
        let mut col: poly::PolyVec = Vec::new();
        for (k, p) in &b.cols[j] {
            for (i, q) in &a.cols[*k] {
                poly::polyvec_add(&mut col, *i, &p.mul(q));
            }
        }
        out.cols.push(col);
    }
    out
}

/// Determine all constants `N_{ab}` from extraspecial-pair seeds.
fn derive_constants(rs: &Arc<RootSystem>) -> HashMap<(RootIdx, RootIdx), i64> {
    let mut n: HashMap<(RootIdx, RootIdx), i64> = HashMap::new();

    // index order on positive roots == frozen root order
    let mut positives: Vec<RootIdx> = rs.positive().to_vec();
    positives.sort();

    // rational helper: exact (num/den) * v
    let ratio = |num: i64, den: i64, v: i64| -> i64 {
        let prod = num * v;
        assert_eq!(prod % den, 0, "non-integral structure constant");
        prod / den
    };

    // n_any resolves an arbitrary-sign pair from already-known positive pairs
    fn n_any(
        rs: &RootSystem,
        n: &HashMap<(RootIdx, RootIdx), i64>,
        x: RootIdx,
        y: RootIdx,
    ) -> i64 {
        let pos = |r: RootIdx| rs.is_positive(r);
        if pos(x) && pos(y) {
            return *n.get(&(x, y)).expect("positive pair not yet derived");
        }
        if !pos(x) && !pos(y) {
            return -n_any(rs, n, rs.negate(x), rs.negate(y));
        }
        if !pos(x) {
            return -n_any(rs, n, y, x);
        }
        // x positive, y negative
        let xi = x;
        let eta = rs.negate(y);
        let sigma = rs.sum(x, y).expect("pair does not sum to a root");
        let exact = |num: i64, den: i64| -> i64 {
            assert_eq!(num % den, 0, "non-integral structure constant");
            num / den
        };
        if rs.is_positive(sigma) {
            let v = n_any(rs, n, eta, sigma);
            exact(-rs.inner(sigma, sigma) * v, rs.inner(xi, xi))
        } else {
            let sp = rs.negate(sigma);
            let v = n_any(rs, n, sp, xi);
            exact(rs.inner(sp, sp) * v, rs.inner(eta, eta))
        }
    }

    for &gamma in &positives {
        let decomps: Vec<(RootIdx, RootIdx)> = positives
            .iter()
            .filter_map(|&a| {
                let b = rs.combination(gamma, 1, a, -1)?;
                if rs.is_positive(b) && a < b {
                    Some((a, b))
                } else {
                    None
                }
            })
            .collect();
        if decomps.is_empty() {
            continue;
        }
        // extraspecial pair: minimal first component in the frozen order
        let &(a1, b1) = decomps.iter().min_by_key(|&&(a, _)| a).unwrap();
        let (p, _) = rs.root_string(a1, b1).unwrap();
        n.insert((a1, b1), p + 1);
        n.insert((b1, a1), -(p + 1));

        for &(a, b) in &decomps {
            if (a, b) == (a1, b1) {
                continue;
            }
            let denom = {
                // N_{gamma, -a1} via the cyclic rule: sums to b1
                let v = n[&(a1, b1)];
                ratio(-rs.inner(b1, b1), rs.inner(gamma, gamma), v)
            };
            let t1 = match rs.combination(b, 1, a1, -1) {
                Some(_) => {
                    let f1 = n_any(rs, &n, b, rs.negate(a1));
                    let bm = rs.combination(b, 1, a1, -1).unwrap();
                    let f2 = n_any(rs, &n, a, bm);
                    f1 * f2
                }
                None => 0,
            };
            let t2 = match rs.combination(a, 1, a1, -1) {
                Some(am) => {
                    let f1 = n_any(rs, &n, a, rs.negate(a1));
                    let f2 = n_any(rs, &n, b, am);
                    f1 * f2
                }
                None => 0,
            };
            let num = t1 - t2;
            assert_eq!(num % denom, 0, "Jacobi recursion yielded a fraction");
            let val = num / denom;
            assert!(val != 0, "vanishing constant for a root sum");
            n.insert((a, b), val);
            n.insert((b, a), -val);
        }
    }

    // fill all remaining (mixed and negative) pairs
    let nr = rs.num_roots();
    let mut full = n.clone();
    for x in 0..nr {
        for y in 0..nr {
            if x == y || rs.negate(x) == y || rs.sum(x, y).is_none() {
                continue;
            }
            full.entry((x, y)).or_insert_with(|| n_any(rs, &n, x, y));
        }
    }
    full
}

/// Witness for a decomposition of a root as a sum with unit coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumPairWitness {
    pub gamma: RootIdx,
    pub delta: RootIdx,
    pub mode: SumPairMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumPairMode {
    /// `beta = gamma + delta`, `N_{gamma delta} = 1`
    OneOne,
    /// `beta = gamma + 2 delta`, `N_{gamma delta, 12} = 1`
    OneTwo,
    /// `beta = 2 gamma + delta`, `N_{gamma delta, 21} = 1`
    TwoOne,
}

/// Decompose `beta` as a root sum with unit structure constant. For long
/// roots of `C_l` the decomposition uses a double step.
pub fn find_sum_pair(table: &StructureTable, beta: RootIdx) -> Result<SumPairWitness, RootError> {
    let rs = table.root_system();
    let long_c = rs.label() == TypeLabel::C && rs.root(beta).length == LengthClass::Long;
    let nr = rs.num_roots();
    if !long_c {
        for g in 0..nr {
            for d in 0..nr {
                if g == d || rs.negate(g) == d {
                    continue;
                }
                if rs.sum(g, d) == Some(beta) && table.n_const(g, d) == Some(1) {
                    return Ok(SumPairWitness { gamma: g, delta: d, mode: SumPairMode::OneOne });
                }
            }
        }
        return Err(RootError::NoSumPair);
    }
    for g in 0..nr {
        for d in 0..nr {
            if g == d || rs.negate(g) == d {
                continue;
            }
            if rs.combination(g, 1, d, 2) == Some(beta) {
                if let Ok(terms) = table.expansion(g, d) {
                    if terms.iter().any(|t| (t.i, t.j) == (1, 2) && t.coeff == 1 && t.root == beta)
                    {
                        return Ok(SumPairWitness { gamma: g, delta: d, mode: SumPairMode::OneTwo });
                    }
                }
            }
            if rs.combination(g, 2, d, 1) == Some(beta) {
                if let Ok(terms) = table.expansion(g, d) {
                    if terms.iter().any(|t| (t.i, t.j) == (2, 1) && t.coeff == 1 && t.root == beta)
                    {
                        return Ok(SumPairWitness { gamma: g, delta: d, mode: SumPairMode::TwoOne });
                    }
                }
            }
        }
    }
    Err(RootError::NoSumPair)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::RootSystem;

    fn table(spec: &str) -> Arc<StructureTable> {
        StructureTable::new(RootSystem::parse(spec).unwrap())
    }

    #[test]
    fn dimensions() {
        assert_eq!(table("A2").dim(), 8);
        assert_eq!(table("B2").dim(), 10);
        assert_eq!(table("G2").dim(), 14);
    }

    #[test]
    fn a2_constants_are_units() {
        let t = table("A2");
        assert!(t.n.values().all(|&v| v.abs() == 1));
    }

    #[test]
    fn g2_reaches_three() {
        let t = table("G2");
        assert!(t.n.values().any(|&v| v.abs() == 3));
    }

    #[test]
    fn antisymmetry_and_negation() {
        for spec in ["A2", "C2", "B3", "G2"] {
            let t = table(spec);
            let rs = t.root_system().clone();
            for (&(a, b), &v) in &t.n {
                assert_eq!(t.n[&(b, a)], -v);
                assert_eq!(t.n[&(rs.negate(a), rs.negate(b))], -v);
            }
        }
    }

    #[test]
    fn magnitude_law() {
        // |N_{ab}| = p + 1 where p is the length of the b-string below a
        // (equivalently the a-string below b; both are asserted).
        for spec in ["A2", "A3", "C2", "B3", "C3", "G2"] {
            let t = table(spec);
            let rs = t.root_system().clone();
            for (&(a, b), &v) in &t.n {
                let p_ab = rs.root_string(a, b).unwrap().0;
                let p_ba = rs.root_string(b, a).unwrap().0;
                assert_eq!(v.abs(), p_ab + 1, "{spec}");
                assert_eq!(v.abs(), p_ba + 1, "{spec}");
            }
        }
    }

    #[test]
    fn jacobi_small() {
        for spec in ["A2", "C2", "G2"] {
            assert!(table(spec).jacobi_holds(), "{spec}");
        }
    }

    #[test]
    fn divided_powers_terminate() {
        let t = table("G2");
        for a in 0..t.root_system().num_roots() {
            assert!(t.ad_divided_powers(a).len() <= 3);
        }
    }

    #[test]
    fn expansion_shapes() {
        let t = table("A2");
        let rs = t.root_system().clone();
        let f = rs.fundamental();
        let terms = t.expansion(f[0], f[1]).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].i, 1);
        assert_eq!(terms[0].j, 1);
        assert_eq!(terms[0].coeff.abs(), 1);

        // opposite roots rejected
        assert_eq!(t.expansion(f[0], rs.negate(f[0])).unwrap_err(), BasisError::OppositeRoots);

        // commuting pair: a root and itself shifted so no i a + j b is a root
        let g2 = table("G2");
        let rsg = g2.root_system().clone();
        let mut found_empty = false;
        for a in 0..rsg.num_roots() {
            for b in 0..rsg.num_roots() {
                if a == b || rsg.negate(a) == b {
                    continue;
                }
                if g2.expansion(a, b).unwrap().is_empty() {
                    found_empty = true;
                }
            }
        }
        assert!(found_empty);
    }

    #[test]
    fn g2_short_pair_coefficients() {
        let g2 = table("G2");
        let rs = g2.root_system().clone();
        // find two short roots at angle 2pi/3 (their sum is short)
        let mut checked = false;
        for a in 0..rs.num_roots() {
            for b in 0..rs.num_roots() {
                if a == b || rs.negate(a) == b {
                    continue;
                }
                use crate::roots::LengthClass::Short;
                if rs.root(a).length != Short || rs.root(b).length != Short {
                    continue;
                }
                let Some(s) = rs.sum(a, b) else { continue };
                if rs.root(s).length != Short {
                    continue;
                }
                let terms = g2.expansion(a, b).unwrap();
                let mut shapes: Vec<(usize, usize, i64)> =
                    terms.iter().map(|t| (t.i, t.j, t.coeff.abs())).collect();
                shapes.sort();
                assert_eq!(shapes, vec![(1, 1, 2), (1, 2, 3), (2, 1, 3)]);
                checked = true;
            }
        }
        assert!(checked);
    }

    #[test]
    fn extraspecial_positive() {
        // seeds carry positive sign: recompute the extraspecial pair per
        // positive non-simple root and check
        for spec in ["A3", "C2", "G2", "B3"] {
            let t = table(spec);
            let rs = t.root_system().clone();
            let mut positives: Vec<_> = rs.positive().to_vec();
            positives.sort();
            for &g in &positives {
                let decomps: Vec<_> = positives
                    .iter()
                    .filter_map(|&a| {
                        let b = rs.combination(g, 1, a, -1)?;
                        (rs.is_positive(b) && a < b).then_some((a, b))
                    })
                    .collect();
                if let Some(&(a, b)) = decomps.iter().min_by_key(|&&(a, _)| a) {
                    assert!(t.n_const(a, b).unwrap() > 0, "{spec}");
                }
            }
        }
    }

    #[test]
    fn sum_pairs_everywhere() {
        for spec in ["A2", "C2", "B3", "C3", "G2"] {
            let t = table(spec);
            let rs = t.root_system().clone();
            for beta in 0..rs.num_roots() {
                let w = find_sum_pair(&t, beta).unwrap_or_else(|_| {
                    panic!("{spec}: no sum pair for root {beta}");
                });
                match w.mode {
                    SumPairMode::OneOne => {
                        assert_eq!(rs.sum(w.gamma, w.delta), Some(beta));
                        assert_eq!(t.n_const(w.gamma, w.delta), Some(1));
                    }
                    SumPairMode::OneTwo => {
                        assert_eq!(rs.combination(w.gamma, 1, w.delta, 2), Some(beta));
                    }
                    SumPairMode::TwoOne => {
                        assert_eq!(rs.combination(w.gamma, 2, w.delta, 1), Some(beta));
                    }
                }
            }
        }
    }

    #[test]
    fn c2_long_root_uses_double_mode() {
        let t = table("C2");
        let rs = t.root_system().clone();
        for beta in 0..rs.num_roots() {
            if rs.root(beta).length == LengthClass::Long {
                let w = find_sum_pair(&t, beta).unwrap();
                assert!(matches!(w.mode, SumPairMode::OneTwo | SumPairMode::TwoOne));
            }
        }
    }

    #[test]
    fn b3_long_roots_use_unit_mode() {
        let t = table("B3");
        let rs = t.root_system().clone();
        for beta in 0..rs.num_roots() {
            if rs.root(beta).length == LengthClass::Long {
                assert_eq!(find_sum_pair(&t, beta).unwrap().mode, SumPairMode::OneOne);
            }
        }
    }

    #[test]
    fn dump_roundtrip() {
        let t = table("C2");
        let dump = t.dump();
        assert!(t.matches_dump(&dump).unwrap());
    }
}
