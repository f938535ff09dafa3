//! Reduced irreducible root systems of rank >= 2.
//!
//! Roots are stored as integer coordinate vectors over the fundamental basis
//! (the root lattice), in a fixed deterministic order: ascending height, then
//! lexicographic on coordinates. All combinatorial queries needed by the rest
//! of the crate (root strings, pairings, reflections, length classes, coweight
//! pairings) are answered from this data with exact integer arithmetic.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootError {
    #[error("inadmissible root system {0}{1}: rank must be >= 2 and match the type")]
    InvalidType(char, usize),
    #[error("cannot parse root system spec `{0}`")]
    ParseError(String),
    #[error("root string is undefined for collinear roots")]
    CollinearRoots,
    #[error("coweight `{0}` is not available for this system")]
    UnsupportedWeight(String),
    #[error("no sum decomposition with unit coefficient exists for this root")]
    NoSumPair,
}

/// Length class of a root. Simply laced systems carry a single class, which
/// by convention is [`LengthClass::Long`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LengthClass {
    Short,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            TypeLabel::A => 'A',
            TypeLabel::B => 'B',
            TypeLabel::C => 'C',
            TypeLabel::D => 'D',
            TypeLabel::E => 'E',
            TypeLabel::F => 'F',
            TypeLabel::G => 'G',
        };
        write!(f, "{c}")
    }
}

/// A root, as integer coordinates over the fundamental basis of its system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root {
    pub coords: Vec<i64>,
    pub length: LengthClass,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.coords.iter().sum()
    }
}

/// Index of a root in the fixed order of its `RootSystem`.
pub type RootIdx = usize;

/// A fundamental coweight, identified by the simple root it pairs with.
///
/// The pairing of a root with the `i`-th fundamental coweight is the `i`-th
/// coordinate of the root over the fundamental basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coweight {
    pub label: String,
    pub simple: usize,
}

/// A reduced irreducible root system with a frozen root order.
pub struct RootSystem {
    label: TypeLabel,
    rank: usize,
    /// `cartan[i][j] = <alpha_i, alpha_j^vee>`.
    cartan: Vec<Vec<i64>>,
    /// Relative squared half-lengths of the simple roots, normalized so the
    /// shortest is 1. `(alpha_i, alpha_i) = 2 * d[i]`.
    d: Vec<i64>,
    roots: Vec<Root>,
    index: HashMap<Vec<i64>, RootIdx>,
    positive: Vec<RootIdx>,
    fundamental: Vec<RootIdx>,
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootSystem({}{}, {} roots)", self.label, self.rank, self.roots.len())
    }
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.label, self.rank)
    }
}

fn admissible(label: TypeLabel, rank: usize) -> bool {
    match label {
        TypeLabel::A => rank >= 2,
        TypeLabel::B | TypeLabel::C => rank >= 2,
        TypeLabel::D => rank >= 4,
        TypeLabel::E => (6..=8).contains(&rank),
        TypeLabel::F => rank == 4,
        TypeLabel::G => rank == 2,
    }
}

/// Cartan matrix in Bourbaki numbering, `c[i][j] = <alpha_i, alpha_j^vee>`.
fn cartan_matrix(label: TypeLabel, rank: usize) -> Vec<Vec<i64>> {
    let l = rank;
    let mut c = vec![vec![0i64; l]; l];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    let link = |c: &mut Vec<Vec<i64>>, i: usize, j: usize| {
        c[i][j] = -1;
        c[j][i] = -1;
    };
    match label {
        TypeLabel::A => {
            for i in 0..l - 1 {
                link(&mut c, i, i + 1);
            }
        }
        TypeLabel::B => {
            for i in 0..l - 1 {
                link(&mut c, i, i + 1);
            }
            // alpha_{l-1} long, alpha_l short
            c[l - 2][l - 1] = -2;
            c[l - 1][l - 2] = -1;
        }
        TypeLabel::C => {
            for i in 0..l - 1 {
                link(&mut c, i, i + 1);
            }
            // alpha_{l-1} short, alpha_l long
            c[l - 2][l - 1] = -1;
            c[l - 1][l - 2] = -2;
        }
        TypeLabel::D => {
            for i in 0..l - 2 {
                link(&mut c, i, i + 1);
            }
            link(&mut c, l - 3, l - 1);
        }
        TypeLabel::E => {
            // Bourbaki: chain 1-3-4-5-6(-7(-8)), node 2 attached to 4.
            link(&mut c, 0, 2);
            link(&mut c, 2, 3);
            link(&mut c, 1, 3);
            for i in 3..l - 1 {
                link(&mut c, i, i + 1);
            }
        }
        TypeLabel::F => {
            link(&mut c, 0, 1);
            link(&mut c, 2, 3);
            c[1][2] = -2;
            c[2][1] = -1;
        }
        TypeLabel::G => {
            c[0][1] = -1;
            c[1][0] = -3;
        }
    }
    c
}

/// Solve `c[i][j] * d[j] == c[j][i] * d[i]` over the Dynkin graph,
/// normalized to minimum 1.
fn length_vector(c: &[Vec<i64>]) -> Vec<i64> {
    let l = c.len();
    // Rational assignment via BFS, numerators over a common denominator.
    let mut num = vec![0i64; l];
    let mut den = vec![0i64; l];
    num[0] = 1;
    den[0] = 1;
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        for j in 0..l {
            if i != j && c[i][j] != 0 && den[j] == 0 {
                // d[j]/d[i] = c[j][i]/c[i][j]
                num[j] = num[i] * c[j][i];
                den[j] = den[i] * c[i][j];
                if num[j] < 0 && den[j] < 0 {
                    num[j] = -num[j];
                    den[j] = -den[j];
                }
                stack.push(j);
            }
        }
    }
    let lcm = den.iter().fold(1i64, |acc, &x| {
        let g = gcd(acc, x.abs());
        acc / g * x.abs()
    });
    let mut d: Vec<i64> = (0..l).map(|i| num[i] * (lcm / den[i])).collect();
    let g = d.iter().fold(0, |acc, &x| gcd(acc, x.abs()));
    for x in &mut d {
        *x /= g;
    }
    assert!(d.iter().all(|&x| x > 0));
    d
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

impl RootSystem {
    /// Build the system for `(label, rank)`. `B2` is canonicalized to `C2`;
    /// length labels then follow the `C2` convention.
    pub fn new(label: TypeLabel, rank: usize) -> Result<Arc<RootSystem>, RootError> {
        if !admissible(label, rank) {
            let ch = label.to_string().chars().next().unwrap();
            return Err(RootError::InvalidType(ch, rank));
        }
        let label = if label == TypeLabel::B && rank == 2 { TypeLabel::C } else { label };
        let cartan = cartan_matrix(label, rank);
        let d = length_vector(&cartan);

        // Positive roots by height induction.
        let mut coords_set: HashMap<Vec<i64>, ()> = HashMap::new();
        let mut by_height: Vec<Vec<Vec<i64>>> = vec![Vec::new()];
        let mut simples = Vec::new();
        for i in 0..rank {
            let mut v = vec![0i64; rank];
            v[i] = 1;
            coords_set.insert(v.clone(), ());
            simples.push(v.clone());
            by_height[0].push(v);
        }
        let pairing_simple = |beta: &[i64], i: usize| -> i64 {
            (0..rank).map(|j| beta[j] * cartan[j][i]).sum()
        };
        let mut h = 0;
        while !by_height[h].is_empty() {
            h += 1;
            by_height.push(Vec::new());
            let current = by_height[h - 1].clone();
            for beta in current {
                for i in 0..rank {
                    // p = max steps down by alpha_i staying inside the set
                    let mut p = 0i64;
                    loop {
                        let mut v = beta.clone();
                        v[i] -= p + 1;
                        if v.iter().all(|&x| x == 0) || !coords_set.contains_key(&v) {
                            break;
                        }
                        p += 1;
                    }
                    let q = p - pairing_simple(&beta, i);
                    if q >= 1 {
                        let mut v = beta.clone();
                        v[i] += 1;
                        if coords_set.insert(v.clone(), ()).is_none() {
                            by_height[h].push(v);
                        }
                    }
                }
            }
        }

        // Assemble all roots: positives and negatives, frozen order.
        let bilinear = |a: &[i64], b: &[i64]| -> i64 {
            let mut s = 0;
            for i in 0..rank {
                for j in 0..rank {
                    s += a[i] * b[j] * cartan[i][j] * d[j];
                }
            }
            s
        };
        let min_norm = 2 * d.iter().min().unwrap();
        let max_norm = 2 * d.iter().max().unwrap();
        let mut all: Vec<Root> = Vec::new();
        for v in coords_set.keys() {
            let norm = bilinear(v, v);
            assert!(norm == min_norm || norm == max_norm, "unexpected root norm");
            let length = if norm == max_norm { LengthClass::Long } else { LengthClass::Short };
            all.push(Root { coords: v.clone(), length });
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            all.push(Root { coords: neg, length });
        }
        all.sort_by(|a, b| (a.height(), &a.coords).cmp(&(b.height(), &b.coords)));

        let expected = match (label, rank) {
            (TypeLabel::A, l) => l * (l + 1),
            (TypeLabel::B | TypeLabel::C, l) => 2 * l * l,
            (TypeLabel::D, l) => 2 * l * (l - 1),
            (TypeLabel::E, 6) => 72,
            (TypeLabel::E, 7) => 126,
            (TypeLabel::E, 8) => 240,
            (TypeLabel::F, _) => 48,
            (TypeLabel::G, _) => 12,
            _ => unreachable!(),
        };
        assert_eq!(all.len(), expected, "root count mismatch for {label}{rank}");

        let index: HashMap<Vec<i64>, RootIdx> =
            all.iter().enumerate().map(|(i, r)| (r.coords.clone(), i)).collect();
        let positive: Vec<RootIdx> =
            (0..all.len()).filter(|&i| all[i].height() > 0).collect();
        let fundamental: Vec<RootIdx> = simples.iter().map(|v| index[v]).collect();

        Ok(Arc::new(RootSystem { label, rank, cartan, d, roots: all, index, positive, fundamental }))
    }

    /// Parse a spec like `"A2"`, `"b3"`, `"G2"` (case-insensitive).
    pub fn parse(spec: &str) -> Result<Arc<RootSystem>, RootError> {
        let s = spec.trim();
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(|| RootError::ParseError(s.into()))?;
        let rank: usize =
            chars.as_str().parse().map_err(|_| RootError::ParseError(s.into()))?;
        let label = match head.to_ascii_uppercase() {
            'A' => TypeLabel::A,
            'B' => TypeLabel::B,
            'C' => TypeLabel::C,
            'D' => TypeLabel::D,
            'E' => TypeLabel::E,
            'F' => TypeLabel::F,
            'G' => TypeLabel::G,
            _ => return Err(RootError::ParseError(s.into())),
        };
        RootSystem::new(label, rank)
    }

    pub fn label(&self) -> TypeLabel {
        self.label
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn num_roots(&self) -> usize {
        self.roots.len()
    }

    pub fn root(&self, i: RootIdx) -> &Root {
        &self.roots[i]
    }

    pub fn positive(&self) -> &[RootIdx] {
        &self.positive
    }

    pub fn fundamental(&self) -> &[RootIdx] {
        &self.fundamental
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn lookup(&self, coords: &[i64]) -> Option<RootIdx> {
        self.index.get(coords).copied()
    }

    pub fn negate(&self, i: RootIdx) -> RootIdx {
        let neg: Vec<i64> = self.roots[i].coords.iter().map(|x| -x).collect();
        self.index[&neg]
    }

    pub fn is_positive(&self, i: RootIdx) -> bool {
        self.roots[i].height() > 0
    }

    /// Index of `a + b` if it is a root.
    pub fn sum(&self, a: RootIdx, b: RootIdx) -> Option<RootIdx> {
        let v: Vec<i64> = self.roots[a]
            .coords
            .iter()
            .zip(&self.roots[b].coords)
            .map(|(x, y)| x + y)
            .collect();
        self.lookup(&v)
    }

    /// Index of `i*a + j*b` if it is a root.
    pub fn combination(&self, a: RootIdx, i: i64, b: RootIdx, j: i64) -> Option<RootIdx> {
        let v: Vec<i64> = self.roots[a]
            .coords
            .iter()
            .zip(&self.roots[b].coords)
            .map(|(x, y)| i * x + j * y)
            .collect();
        self.lookup(&v)
    }

    /// `(beta, alpha)` under the invariant form, with `(alpha_i, alpha_i) = 2 d_i`.
    pub fn inner(&self, beta: RootIdx, alpha: RootIdx) -> i64 {
        let a = &self.roots[alpha].coords;
        let b = &self.roots[beta].coords;
        let mut s = 0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += b[i] * a[j] * self.cartan[i][j] * self.d[j];
            }
        }
        s
    }

    /// Cartan pairing `<beta, alpha^vee> = 2 (beta, alpha) / (alpha, alpha)`.
    pub fn pairing(&self, beta: RootIdx, alpha: RootIdx) -> i64 {
        let num = 2 * self.inner(beta, alpha);
        let den = self.inner(alpha, alpha);
        assert_eq!(num % den, 0);
        num / den
    }

    /// Pairing of a root with a simple coroot, `<beta, alpha_i^vee>`.
    pub fn pairing_simple(&self, beta: RootIdx, i: usize) -> i64 {
        let b = &self.roots[beta].coords;
        (0..self.rank).map(|j| b[j] * self.cartan[j][i]).sum()
    }

    /// Reflection `s_alpha(beta)`.
    pub fn reflect(&self, alpha: RootIdx, beta: RootIdx) -> RootIdx {
        let k = self.pairing(beta, alpha);
        let v: Vec<i64> = self.roots[beta]
            .coords
            .iter()
            .zip(&self.roots[alpha].coords)
            .map(|(b, a)| b - k * a)
            .collect();
        self.index[&v]
    }

    /// The alpha-string through beta: `(p, q)` with
    /// `p = max{k : beta - k alpha in Phi}` and `q = max{k : beta + k alpha in Phi}`.
    pub fn root_string(&self, alpha: RootIdx, beta: RootIdx) -> Result<(i64, i64), RootError> {
        if alpha == beta || alpha == self.negate(beta) {
            return Err(RootError::CollinearRoots);
        }
        let walk = |dir: i64| -> i64 {
            let mut k = 0;
            while self.combination(beta, 1, alpha, dir * (k + 1)).is_some() {
                k += 1;
            }
            k
        };
        let p = walk(-1);
        let q = walk(1);
        Ok((p, q))
    }

    /// Largest multiple of a root occurring in an integral combination that is
    /// again a root: 1, 2 or 3 for simply, doubly, triply laced systems.
    pub fn max_multiplier(&self) -> i64 {
        *self.d.iter().max().unwrap()
    }

    pub fn simply_laced(&self) -> bool {
        self.max_multiplier() == 1
    }

    /// Fundamental coweights whose weight elements generate the adjoint torus
    /// together with the semisimple elements `h_alpha`.
    pub fn torus_coweights(&self) -> Vec<Coweight> {
        let mk = |i: usize| Coweight { label: format!("w{}", i + 1), simple: i };
        match self.label {
            TypeLabel::A | TypeLabel::B => vec![mk(0)],
            TypeLabel::C => vec![mk(self.rank - 1)],
            TypeLabel::D => vec![mk(0), mk(self.rank - 1)],
            TypeLabel::E if self.rank == 6 => vec![mk(0)],
            TypeLabel::E if self.rank == 7 => vec![mk(6)],
            _ => vec![],
        }
    }

    pub fn coweight(&self, label: &str) -> Result<Coweight, RootError> {
        self.torus_coweights()
            .into_iter()
            .find(|w| w.label == label)
            .ok_or_else(|| RootError::UnsupportedWeight(label.into()))
    }

    /// Integer pairing `(alpha, omega)` of a root with a fundamental coweight:
    /// the coefficient of the corresponding simple root.
    pub fn coweight_pairing(&self, omega: &Coweight, alpha: RootIdx) -> Result<i64, RootError> {
        if self.torus_coweights().iter().all(|w| w != omega) {
            return Err(RootError::UnsupportedWeight(omega.label.clone()));
        }
        Ok(self.roots[alpha].coords[omega.simple])
    }

    /// Half-length datum of a root: `(alpha, alpha) / (min norm)`.
    pub fn d_of(&self, alpha: RootIdx) -> i64 {
        self.inner(alpha, alpha) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_length_split() {
        let a2 = RootSystem::parse("A2").unwrap();
        assert_eq!(a2.num_roots(), 6);
        assert!(a2.roots().iter().all(|r| r.length == LengthClass::Long));

        let g2 = RootSystem::parse("G2").unwrap();
        assert_eq!(g2.num_roots(), 12);
        let short = g2.roots().iter().filter(|r| r.length == LengthClass::Short).count();
        assert_eq!(short, 6);

        for (spec, n) in [("A3", 12), ("B3", 18), ("C3", 18), ("D4", 24), ("F4", 48), ("E6", 72)] {
            assert_eq!(RootSystem::parse(spec).unwrap().num_roots(), n, "{spec}");
        }
    }

    #[test]
    fn b2_is_c2() {
        let b2 = RootSystem::parse("B2").unwrap();
        let c2 = RootSystem::parse("C2").unwrap();
        assert_eq!(b2.label(), TypeLabel::C);
        assert_eq!(b2.num_roots(), 8);
        assert_eq!(b2.cartan(), c2.cartan());
        // C2 convention: alpha_1 short, alpha_2 long.
        assert_eq!(b2.root(b2.fundamental()[0]).length, LengthClass::Short);
        assert_eq!(b2.root(b2.fundamental()[1]).length, LengthClass::Long);
    }

    #[test]
    fn inadmissible_pairs_rejected() {
        assert!(RootSystem::parse("A1").is_err());
        assert!(RootSystem::parse("D3").is_err());
        assert!(RootSystem::parse("E9").is_err());
        assert!(RootSystem::parse("F5").is_err());
        assert!(RootSystem::parse("G3").is_err());
        assert!(RootSystem::parse("Q7").is_err());
    }

    #[test]
    fn root_strings() {
        let a2 = RootSystem::parse("A2").unwrap();
        let f = a2.fundamental();
        assert_eq!(a2.root_string(f[0], f[1]).unwrap(), (0, 1));

        let g2 = RootSystem::parse("G2").unwrap();
        let f = g2.fundamental();
        // alpha_1 short, alpha_2 long
        assert_eq!(g2.root_string(f[0], f[1]).unwrap(), (0, 3));
        assert_eq!(g2.root_string(f[1], f[0]).unwrap(), (0, 1));

        let c2 = RootSystem::parse("B2").unwrap();
        // two orthogonal long roots: alpha_2 and its reflection
        let long = c2.fundamental()[1];
        let other = c2.reflect(c2.fundamental()[0], long);
        assert_eq!(c2.root_string(long, other).unwrap(), (0, 0));

        assert_eq!(a2.root_string(f[0], f[0]).unwrap_err(), RootError::CollinearRoots);
    }

    #[test]
    fn string_bound_and_oracle() {
        // p+q <= max multiplier, and (p,q) agrees with brute membership.
        for spec in ["A2", "A3", "C2", "B3", "C3", "G2", "F4", "D4"] {
            let rs = RootSystem::parse(spec).unwrap();
            let i_phi = rs.max_multiplier();
            for a in 0..rs.num_roots() {
                for b in 0..rs.num_roots() {
                    if a == b || rs.negate(a) == b {
                        continue;
                    }
                    let (p, q) = rs.root_string(a, b).unwrap();
                    assert!(p + q <= i_phi, "{spec}: string too long");
                    for k in -(p + 1)..=(q + 1) {
                        let member = rs.combination(b, 1, a, k).is_some();
                        assert_eq!(member, (-p..=q).contains(&k) , "{spec} string break");
                    }
                }
            }
        }
    }

    #[test]
    fn weyl_closure() {
        for spec in ["A2", "C2", "B3", "G2", "D4"] {
            let rs = RootSystem::parse(spec).unwrap();
            let mut seen: Vec<bool> = vec![false; rs.num_roots()];
            for &i in rs.fundamental() {
                seen[i] = true;
            }
            loop {
                let mut grew = false;
                for i in 0..rs.num_roots() {
                    if !seen[i] {
                        continue;
                    }
                    for &s in rs.fundamental() {
                        let j = rs.reflect(s, i);
                        if !seen[j] {
                            seen[j] = true;
                            grew = true;
                        }
                    }
                }
                if !grew {
                    break;
                }
            }
            assert!(seen.iter().all(|&x| x), "{spec}: Weyl orbit misses roots");
        }
    }

    #[test]
    fn max_multiplier_by_type() {
        assert_eq!(RootSystem::parse("A3").unwrap().max_multiplier(), 1);
        assert_eq!(RootSystem::parse("F4").unwrap().max_multiplier(), 2);
        assert_eq!(RootSystem::parse("G2").unwrap().max_multiplier(), 3);
    }

    #[test]
    fn coweight_pairings() {
        let c2 = RootSystem::parse("C2").unwrap();
        let w = c2.coweight("w2").unwrap();
        for i in 0..c2.num_roots() {
            let r = c2.root(i);
            let pairing = c2.coweight_pairing(&w, i).unwrap();
            if r.length == LengthClass::Long && c2.is_positive(i) {
                assert_eq!(pairing, 1, "positive long roots of C2 pair to 1 with w2");
            }
            let neg = c2.coweight_pairing(&w, c2.negate(i)).unwrap();
            assert_eq!(neg, -pairing);
        }

        let a2 = RootSystem::parse("A2").unwrap();
        let w1 = a2.coweight("w1").unwrap();
        assert_eq!(a2.coweight_pairing(&w1, a2.fundamental()[0]).unwrap(), 1);
        assert!(a2.coweight("w2").is_err());
    }
}
