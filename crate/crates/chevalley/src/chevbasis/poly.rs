//! Tiny exact polynomial arithmetic in two variables, plus sparse integer
//! matrices, used to derive commutator coefficient tables symbolically.

/// Dense polynomial in `a`, `b` with i64 coefficients; `c[ia * (db+1) + ib]`
/// is the coefficient of `a^ia * b^ib`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly2 {
    pub da: usize,
    pub db: usize,
    pub c: Vec<i64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { da: 0, db: 0, c: vec![0] }
    }

    pub fn constant(v: i64) -> Self {
        Poly2 { da: 0, db: 0, c: vec![v] }
    }

    pub fn monomial(v: i64, ia: usize, ib: usize) -> Self {
        let mut p = Poly2 { da: ia, db: ib, c: vec![0; (ia + 1) * (ib + 1)] };
        p.c[ia * (ib + 1) + ib] = v;
        p
    }

    pub fn get(&self, ia: usize, ib: usize) -> i64 {
        if ia > self.da || ib > self.db {
            0
        } else {
            self.c[ia * (self.db + 1) + ib]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn trim(&mut self) {
        let mut da = 0;
        let mut db = 0;
        for ia in 0..=self.da {
            for ib in 0..=self.db {
                if self.get(ia, ib) != 0 {
                    da = da.max(ia);
                    db = db.max(ib);
                }
            }
        }
        if da != self.da || db != self.db {
            let mut c = vec![0; (da + 1) * (db + 1)];
            for (ia, row) in c.chunks_mut(db + 1).enumerate() {
                for (ib, v) in row.iter_mut().enumerate() {
                    *v = self.get(ia, ib);
                }
            }
            self.da = da;
            self.db = db;
            self.c = c;
        }
    }

    pub fn add_assign(&mut self, other: &Poly2) {
        let da = self.da.max(other.da);
        let db = self.db.max(other.db);
        let mut c = vec![0i64; (da + 1) * (db + 1)];
        for (ia, row) in c.chunks_mut(db + 1).enumerate() {
            for (ib, v) in row.iter_mut().enumerate() {
                *v = self.get(ia, ib) + other.get(ia, ib);
            }
        }
        self.da = da;
        self.db = db;
        self.c = c;
        self.trim();
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        if self.is_zero() || other.is_zero() {
            return Poly2::zero();
        }
        let da = self.da + other.da;
        let db = self.db + other.db;
        let mut out = Poly2 { da, db, c: vec![0; (da + 1) * (db + 1)] };
        for ia in 0..=self.da {
            for ib in 0..=self.db {
                let x = self.get(ia, ib);
                if x == 0 {
                    continue;
                }
                for ja in 0..=other.da {
                    for jb in 0..=other.db {
                        let y = other.get(ja, jb);
                        if y != 0 {
                            out.c[(ia + ja) * (db + 1) + (ib + jb)] += x * y;
                        }
                    }
                }
            }
        }
        out.trim();
        out
    }

    pub fn scale(&self, v: i64) -> Poly2 {
        let mut p = self.clone();
        for x in &mut p.c {
            *x *= v;
        }
        p.trim();
        p
    }

    /// Exact division by an integer; panics on remainder.
    pub fn div_exact(&self, v: i64) -> Poly2 {
        assert!(v != 0);
        let mut p = self.clone();
        for x in &mut p.c {
            assert_eq!(*x % v, 0, "non-exact division in symbolic table derivation");
            *x /= v;
        }
        p
    }

    #[allow(dead_code)]
    pub fn pow(&self, k: usize) -> Poly2 {
        let mut out = Poly2::constant(1);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// If the polynomial is `v * a^ia * b^ib` for a single monomial, return it.
    pub fn as_monomial(&self) -> Option<(i64, usize, usize)> {
        let mut found = None;
        for ia in 0..=self.da {
            for ib in 0..=self.db {
                let v = self.get(ia, ib);
                if v != 0 {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((v, ia, ib));
                }
            }
        }
        found
    }
}

/// Sparse integer matrix stored by columns: `cols[j]` lists `(row, value)`.
#[derive(Debug, Clone)]
pub struct SparseMat {
    pub dim: usize,
    pub cols: Vec<Vec<(usize, i64)>>,
}

impl SparseMat {
    pub fn zero(dim: usize) -> Self {
        SparseMat { dim, cols: vec![Vec::new(); dim] }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    /// `self * other` (both sparse, column-major).
    pub fn mul(&self, other: &SparseMat) -> SparseMat {
        let mut out = SparseMat::zero(self.dim);
        for j in 0..self.dim {
            let mut dense: Vec<i64> = vec![0; self.dim];
            for &(k, v) in &other.cols[j] {
                for &(i, w) in &self.cols[k] {
                    dense[i] += v * w;
                }
            }
            out.cols[j] = dense
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(i, &v)| (i, v))
                .collect();
        }
        out
    }

    pub fn div_exact(&self, v: i64) -> SparseMat {
        let mut out = self.clone();
        for col in &mut out.cols {
            for (_, x) in col.iter_mut() {
                assert_eq!(*x % v, 0, "divided power is not integral");
                *x /= v;
            }
        }
        out
    }
}

/// Sparse vector of polynomials, sorted by row index.
pub type PolyVec = Vec<(usize, Poly2)>;

pub fn polyvec_add(target: &mut PolyVec, row: usize, p: &Poly2) {
    if p.is_zero() {
        return;
    }
    match target.binary_search_by_key(&row, |e| e.0) {
        Ok(k) => {
            target[k].1.add_assign(p);
            if target[k].1.is_zero() {
                target.remove(k);
            }
        }
        Err(k) => target.insert(k, (row, p.clone())),
    }
}

/// A matrix over `Z[a,b]` stored as sparse polynomial columns.
#[derive(Debug, Clone)]
pub struct PolyMat {
    pub dim: usize,
    pub cols: Vec<PolyVec>,
}

impl PolyMat {
    pub fn identity(dim: usize) -> Self {
        PolyMat {
            dim,
            cols: (0..dim).map(|j| vec![(j, Poly2::constant(1))]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.cols.iter().enumerate().all(|(j, col)| {
            col.len() == 1 && col[0].0 == j && col[0].1 == Poly2::constant(1)
        })
    }

    #[allow(dead_code)]
    pub fn col(&self, j: usize) -> &PolyVec {
        &self.cols[j]
    }
}

/// One-parameter exponential `exp(param * X)` given the divided powers
/// `pows[k] = X^{k+1} / (k+1)!`, applied on the left: returns `exp * m`.
pub fn apply_exp(dim: usize, pows: &[SparseMat], param: &Poly2, m: &PolyMat) -> PolyMat {
    let mut powers: Vec<Poly2> = vec![Poly2::constant(1)];
    for k in 0..pows.len() {
        powers.push(powers[k].mul(param));
    }
    let mut out = PolyMat { dim, cols: Vec::with_capacity(dim) };
    for j in 0..dim {
        let mut col: PolyVec = m.cols[j].clone();
        for (k, x) in pows.iter().enumerate() {
            if powers[k + 1].is_zero() {
                continue;
            }
            for &(src, ref p) in &m.cols[j] {
                for &(row, v) in &x.cols[src] {
                    let add = p.mul(&powers[k + 1]).scale(v);
                    polyvec_add(&mut col, row, &add);
                }
            }
        }
        out.cols.push(col);
    }
    out
}
