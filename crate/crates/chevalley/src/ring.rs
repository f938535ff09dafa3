//! Exact arithmetic in finite commutative rings, their ideals, quotients and
//! localizations.
//!
//! A ring is a fully tabulated structure: elements are indices into a carrier
//! and all operations are table lookups. The parse grammar covers `Z/n`,
//! `GF(q)` for prime powers `q <= 64`, quotient polynomial rings
//! `<ring>[x]/(f)` with monic `f`, and products `Z/a x Z/b`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};
use thiserror::Error;

pub type RingElt = u16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("cannot parse ring spec `{0}`")]
    ParseError(String),
    #[error("ring would have {0} elements, above the cap of {1}")]
    SizeLimit(usize, usize),
    #[error("operands belong to different rings")]
    MixedRings,
    #[error("element is not a unit")]
    NonUnit,
    #[error("cannot parse element expression `{0}`")]
    BadElement(String),
}

/// Default cap on carrier size for parsed rings.
pub const DEFAULT_RING_CAP: usize = 4096;

pub struct FiniteRing {
    spec: String,
    n: usize,
    add: Vec<RingElt>,
    mul: Vec<RingElt>,
    neg: Vec<RingElt>,
    inv: Vec<Option<RingElt>>,
    names: Vec<String>,
    one: RingElt,
    add_gens: Vec<RingElt>,
    decomp: OnceLock<Vec<LocalFactor>>,
}

/// One local factor of the idempotent decomposition, with the projection map.
pub struct LocalFactor {
    pub idempotent: RingElt,
    pub ring: Arc<FiniteRing>,
    /// Projection `R -> factor` as an element table.
    pub project: Vec<RingElt>,
    /// Carrier of the factor inside `R` (`lift[i]` is the element of `R`
    /// representing factor element `i`).
    pub lift: Vec<RingElt>,
}

impl fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteRing({}, {} elements)", self.spec, self.n)
    }
}

impl fmt::Display for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec)
    }
}

impl PartialEq for FiniteRing {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
    }
}

impl FiniteRing {
    fn from_tables(
        spec: String,
        add: Vec<RingElt>,
        mul: Vec<RingElt>,
        names: Vec<String>,
        one: RingElt,
        add_gens: Vec<RingElt>,
    ) -> Arc<FiniteRing> {
        let n = names.len();
        let mut neg = vec![0 as RingElt; n];
        for x in 0..n {
            let mut found = None;
            for y in 0..n {
                if add[x * n + y] == 0 {
                    found = Some(y as RingElt);
                    break;
                }
            }
            neg[x] = found.expect("no additive inverse");
        }
        let mut inv = vec![None; n];
        for x in 0..n {
            for y in 0..n {
                if mul[x * n + y] == one {
                    inv[x] = Some(y as RingElt);
                    break;
                }
            }
        }
        Arc::new(FiniteRing {
            spec,
            n,
            add,
            mul,
            neg,
            inv,
            names,
            one,
            add_gens,
            decomp: OnceLock::new(),
        })
    }

    pub fn zmod(n: usize) -> Arc<FiniteRing> {
        assert!(n >= 1);
        let add: Vec<RingElt> = (0..n * n).map(|k| ((k / n + k % n) % n) as RingElt).collect();
        let mul: Vec<RingElt> = (0..n * n).map(|k| ((k / n) * (k % n) % n) as RingElt).collect();
        let names = (0..n).map(|i| i.to_string()).collect();
        let one = if n == 1 { 0 } else { 1 };
        let gens = if n == 1 { vec![] } else { vec![1] };
        FiniteRing::from_tables(format!("Z/{n}"), add, mul, names, one, gens)
    }

    /// Quotient `base[x]/(f)` for a monic `f` of degree `d >= 1`, given by its
    /// low coefficients `f_0 .. f_{d-1}` (the leading 1 is implicit).
    pub fn poly_quotient(
        base: &Arc<FiniteRing>,
        low_coeffs: Vec<RingElt>,
        spec: String,
    ) -> Arc<FiniteRing> {
        let d = low_coeffs.len();
        assert!(d >= 1);
        let nb = base.size();
        let n = nb.pow(d as u32);
        let decode = |mut idx: usize| -> Vec<RingElt> {
            let mut v = Vec::with_capacity(d);
            for _ in 0..d {
                v.push((idx % nb) as RingElt);
                idx /= nb;
            }
            v
        };
        let encode =
            |v: &[RingElt]| -> usize { v.iter().rev().fold(0usize, |acc, &c| acc * nb + c as usize) };
        let reduce = |mut poly: Vec<RingElt>| -> Vec<RingElt> {
            while poly.len() > d {
                let top = poly.pop().unwrap();
                if top != 0 {
                    let k = poly.len() - d;
                    for i in 0..d {
                        let sub = base.mul(top, low_coeffs[i]);
                        poly[k + i] = base.sub(poly[k + i], sub);
                    }
                }
            }
            poly.resize(d, 0);
            poly
        };
        let mut add = vec![0 as RingElt; n * n];
        let mut mul = vec![0 as RingElt; n * n];
        for x in 0..n {
            let px = decode(x);
            for y in 0..n {
                let py = decode(y);
                let s: Vec<RingElt> = (0..d).map(|i| base.add(px[i], py[i])).collect();
                add[x * n + y] = encode(&s) as RingElt;
                let mut prod = vec![0 as RingElt; 2 * d - 1];
                for i in 0..d {
                    for j in 0..d {
                        let t = base.mul(px[i], py[j]);
                        prod[i + j] = base.add(prod[i + j], t);
                    }
                }
                mul[x * n + y] = encode(&reduce(prod)) as RingElt;
            }
        }
        let names: Vec<String> = (0..n)
            .map(|x| {
                let p = decode(x);
                let mut parts = Vec::new();
                for i in (0..d).rev() {
                    if p[i] == 0 {
                        continue;
                    }
                    let c = base.name(p[i]);
                    let term = match i {
                        0 => c.to_string(),
                        1 if p[i] == base.one() => "x".into(),
                        1 => format!("{c}x"),
                        _ if p[i] == base.one() => format!("x^{i}"),
                        _ => format!("{c}x^{i}"),
                    };
                    parts.push(term);
                }
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join("+")
                }
            })
            .collect();
        let mut v_one = vec![0 as RingElt; d];
        v_one[0] = base.one();
        let one = encode(&v_one) as RingElt;
        let mut gens = Vec::new();
        for i in 0..d {
            for &g in base.add_gens() {
                let mut v = vec![0 as RingElt; d];
                v[i] = g;
                gens.push(encode(&v) as RingElt);
            }
        }
        FiniteRing::from_tables(spec, add, mul, names, one, gens)
    }

    /// `GF(q)` for a prime power `q`, via the lexicographically smallest
    /// monic irreducible polynomial over the prime field.
    pub fn galois(q: usize) -> Result<Arc<FiniteRing>, RingError> {
        let (p, k) = prime_power(q).ok_or_else(|| RingError::ParseError(format!("GF({q})")))?;
        let base = FiniteRing::zmod(p);
        if k == 1 {
            return Ok(FiniteRing::from_tables(
                format!("GF({q})"),
                base.add.clone(),
                base.mul.clone(),
                base.names.clone(),
                base.one,
                base.add_gens.clone(),
            ));
        }
        let f = smallest_irreducible(p, k);
        Ok(FiniteRing::poly_quotient(&base, f, format!("GF({q})")))
    }

    pub fn product(a: &Arc<FiniteRing>, b: &Arc<FiniteRing>) -> Arc<FiniteRing> {
        let (na, nb) = (a.size(), b.size());
        let n = na * nb;
        let enc = |x: usize, y: usize| x * nb + y;
        let mut add = vec![0 as RingElt; n * n];
        let mut mul = vec![0 as RingElt; n * n];
        for x1 in 0..na {
            for y1 in 0..nb {
                for x2 in 0..na {
                    for y2 in 0..nb {
                        let i = enc(x1, y1) * n + enc(x2, y2);
                        add[i] = enc(
                            a.add(x1 as RingElt, x2 as RingElt) as usize,
                            b.add(y1 as RingElt, y2 as RingElt) as usize,
                        ) as RingElt;
                        mul[i] = enc(
                            a.mul(x1 as RingElt, x2 as RingElt) as usize,
                            b.mul(y1 as RingElt, y2 as RingElt) as usize,
                        ) as RingElt;
                    }
                }
            }
        }
        let names = (0..n)
            .map(|i| format!("({},{})", a.name((i / nb) as RingElt), b.name((i % nb) as RingElt)))
            .collect();
        let one = enc(a.one() as usize, b.one() as usize) as RingElt;
        let mut gens = Vec::new();
        for &g in a.add_gens() {
            gens.push(enc(g as usize, 0) as RingElt);
        }
        for &g in b.add_gens() {
            gens.push(enc(0, g as usize) as RingElt);
        }
        FiniteRing::from_tables(format!("{} x {}", a.spec, b.spec), add, mul, names, one, gens)
    }

    pub fn parse(spec: &str) -> Result<Arc<FiniteRing>, RingError> {
        FiniteRing::parse_capped(spec, DEFAULT_RING_CAP)
    }

    pub fn parse_capped(spec: &str, cap: usize) -> Result<Arc<FiniteRing>, RingError> {
        let s = spec.trim();
        if let Some(pos) = find_product_split(s) {
            let left = FiniteRing::parse_capped(&s[..pos], cap)?;
            let right = FiniteRing::parse_capped(&s[pos + 3..], cap)?;
            let total = left.size() * right.size();
            if total > cap {
                return Err(RingError::SizeLimit(total, cap));
            }
            return Ok(FiniteRing::product(&left, &right));
        }
        if let Some(pos) = s.find("[x]/(") {
            if !s.ends_with(')') {
                return Err(RingError::ParseError(s.into()));
            }
            let base = FiniteRing::parse_capped(&s[..pos], cap)?;
            let poly_src = &s[pos + 5..s.len() - 1];
            let coeffs = parse_monic_poly(&base, poly_src)?;
            let total = base.size().pow(coeffs.len() as u32);
            if total > cap {
                return Err(RingError::SizeLimit(total, cap));
            }
            return Ok(FiniteRing::poly_quotient(&base, coeffs, s.to_string()));
        }
        let lower = s.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("z/") {
            let n: usize = rest.parse().map_err(|_| RingError::ParseError(s.into()))?;
            if n == 0 {
                return Err(RingError::ParseError(s.into()));
            }
            if n > cap {
                return Err(RingError::SizeLimit(n, cap));
            }
            return Ok(FiniteRing::zmod(n));
        }
        if let Some(rest) = lower.strip_prefix("gf(") {
            let inner = rest.strip_suffix(')').ok_or_else(|| RingError::ParseError(s.into()))?;
            let q: usize = inner.parse().map_err(|_| RingError::ParseError(s.into()))?;
            if q > 64 || q < 2 {
                return Err(RingError::ParseError(s.into()));
            }
            return FiniteRing::galois(q);
        }
        Err(RingError::ParseError(s.into()))
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> RingElt {
        0
    }

    pub fn one(&self) -> RingElt {
        self.one
    }

    pub fn is_zero_ring(&self) -> bool {
        self.n == 1
    }

    #[inline]
    pub fn add(&self, a: RingElt, b: RingElt) -> RingElt {
        self.add[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: RingElt, b: RingElt) -> RingElt {
        self.mul[a as usize * self.n + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: RingElt) -> RingElt {
        self.neg[a as usize]
    }

    pub fn sub(&self, a: RingElt, b: RingElt) -> RingElt {
        self.add(a, self.neg(b))
    }

    pub fn inv(&self, a: RingElt) -> Option<RingElt> {
        self.inv[a as usize]
    }

    pub fn is_unit(&self, a: RingElt) -> bool {
        self.inv[a as usize].is_some()
    }

    pub fn name(&self, a: RingElt) -> &str {
        &self.names[a as usize]
    }

    pub fn add_gens(&self) -> &[RingElt] {
        &self.add_gens
    }

    pub fn elements(&self) -> impl Iterator<Item = RingElt> + '_ {
        0..self.n as RingElt
    }

    pub fn units(&self) -> Vec<RingElt> {
        self.elements().filter(|&x| self.is_unit(x)).collect()
    }

    pub fn from_int(&self, k: i64) -> RingElt {
        let times = k.rem_euclid(self.additive_order_of_one());
        let mut v = 0 as RingElt;
        for _ in 0..times {
            v = self.add(v, self.one);
        }
        v
    }

    fn additive_order_of_one(&self) -> i64 {
        if self.n == 1 {
            return 1;
        }
        let mut v = self.one;
        let mut k = 1i64;
        while v != 0 {
            v = self.add(v, self.one);
            k += 1;
        }
        k - 0
    }

    pub fn pow(&self, a: RingElt, k: usize) -> RingElt {
        let mut out = self.one;
        for _ in 0..k {
            out = self.mul(out, a);
        }
        out
    }

    pub fn is_nilpotent(&self, a: RingElt) -> bool {
        let mut v = a;
        for _ in 0..=self.n {
            if v == 0 {
                return true;
            }
            v = self.mul(v, a);
        }
        false
    }

    /// Parse an element expression: sums and differences of terms `int`, `x`,
    /// `x^k`, `int x^k`; plain element names also match (covers product
    /// rings, whose names are `(u,v)` pairs).
    pub fn parse_elt(self: &Arc<Self>, src: &str) -> Result<RingElt, RingError> {
        let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(RingError::BadElement(src.into()));
        }
        if let Some(i) = self.names.iter().position(|n| n == &s) {
            return Ok(i as RingElt);
        }
        let mut total = self.zero();
        let chars: Vec<char> = s.chars().collect();
        let mut term = String::new();
        let mut sign = 1i64;
        let mut k = 0usize;
        while k <= chars.len() {
            let at_sign = k < chars.len() && (chars[k] == '+' || chars[k] == '-');
            if k == chars.len() || (at_sign && !term.is_empty()) {
                if !term.is_empty() {
                    let v = self.parse_term(&term)?;
                    let v = if sign < 0 { self.neg(v) } else { v };
                    total = self.add(total, v);
                    term.clear();
                }
                if k < chars.len() {
                    sign = if chars[k] == '-' { -1 } else { 1 };
                }
            } else if at_sign && term.is_empty() {
                if chars[k] == '-' {
                    sign = -sign;
                }
            } else {
                term.push(chars[k]);
            }
            k += 1;
        }
        Ok(total)
    }

    fn parse_term(self: &Arc<Self>, term: &str) -> Result<RingElt, RingError> {
        if term.is_empty() {
            return Err(RingError::BadElement(term.into()));
        }
        let (coeff_src, var_src) = match term.find('x') {
            Some(p) => (&term[..p], &term[p..]),
            None => (term, ""),
        };
        let coeff = if coeff_src.is_empty() {
            self.one()
        } else {
            let coeff_src = coeff_src.strip_suffix('*').unwrap_or(coeff_src);
            let k: i64 = coeff_src.parse().map_err(|_| RingError::BadElement(term.into()))?;
            self.from_int(k)
        };
        if var_src.is_empty() {
            return Ok(coeff);
        }
        let power: usize = if var_src == "x" {
            1
        } else {
            var_src
                .strip_prefix("x^")
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| RingError::BadElement(term.into()))?
        };
        let x = self
            .names
            .iter()
            .position(|n| n == "x")
            .ok_or_else(|| RingError::BadElement(term.into()))?;
        Ok(self.mul(coeff, self.pow(x as RingElt, power)))
    }

    /// Primitive idempotent decomposition into local factors.
    pub fn local_factors(self: &Arc<Self>) -> &[LocalFactor] {
        self.decomp.get_or_init(|| {
            let idems: Vec<RingElt> =
                self.elements().filter(|&e| self.mul(e, e) == e && e != 0).collect();
            let primitive: Vec<RingElt> = idems
                .iter()
                .copied()
                .filter(|&e| {
                    idems.iter().all(|&f| {
                        let ef = self.mul(e, f);
                        ef == 0 || ef == e
                    })
                })
                .collect();
            let mut total = self.zero();
            for &e in &primitive {
                total = self.add(total, e);
            }
            assert_eq!(total, self.one(), "primitive idempotents do not sum to 1");
            primitive
                .iter()
                .map(|&e| {
                    let carrier: Vec<RingElt> = {
                        let set: BTreeSet<RingElt> =
                            self.elements().map(|r| self.mul(e, r)).collect();
                        set.into_iter().collect()
                    };
                    let pos: HashMap<RingElt, RingElt> =
                        carrier.iter().enumerate().map(|(i, &r)| (r, i as RingElt)).collect();
                    let m = carrier.len();
                    let mut add = vec![0 as RingElt; m * m];
                    let mut mul = vec![0 as RingElt; m * m];
                    for (i, &x) in carrier.iter().enumerate() {
                        for (j, &y) in carrier.iter().enumerate() {
                            add[i * m + j] = pos[&self.add(x, y)];
                            mul[i * m + j] = pos[&self.mul(x, y)];
                        }
                    }
                    let names = carrier.iter().map(|&r| self.name(r).to_string()).collect();
                    let one = pos[&e];
                    let gens: Vec<RingElt> = {
                        let mut set = BTreeSet::new();
                        for &g in self.add_gens() {
                            let p = pos[&self.mul(e, g)];
                            if p != 0 {
                                set.insert(p);
                            }
                        }
                        set.into_iter().collect()
                    };
                    let ring = FiniteRing::from_tables(
                        format!("{}|e={}", self.spec, self.name(e)),
                        add,
                        mul,
                        names,
                        one,
                        gens,
                    );
                    let project: Vec<RingElt> =
                        self.elements().map(|r| pos[&self.mul(e, r)]).collect();
                    LocalFactor { idempotent: e, ring, project, lift: carrier }
                })
                .collect()
        })
    }

    pub fn is_local(self: &Arc<Self>) -> bool {
        self.local_factors().len() == 1
    }

    /// Jacobson radical; for a finite commutative ring this is the set of
    /// nilpotent elements.
    pub fn radical(self: &Arc<Self>) -> Ideal {
        let elems: Vec<RingElt> = self.elements().filter(|&r| self.is_nilpotent(r)).collect();
        Ideal::from_elements(self.clone(), elems)
    }

    /// Residue fields `R/m` over all maximal ideals, as `(label, size)`.
    pub fn residue_fields(self: &Arc<Self>) -> Vec<(String, usize)> {
        self.local_factors()
            .iter()
            .map(|f| {
                let m = f.ring.size() - f.ring.units().len();
                let q = f.ring.size() / m.max(1);
                let q = if m == 0 { f.ring.size() } else { q };
                (format!("F{q}"), q)
            })
            .collect()
    }

    pub fn has_f2_residue_field(self: &Arc<Self>) -> bool {
        self.residue_fields().iter().any(|&(_, q)| q == 2)
    }

    /// Does every `c` lie in the ideal generated by `c^2` and `2c`?
    pub fn condition_cl(self: &Arc<Self>) -> bool {
        self.elements().all(|c| {
            let c2 = self.mul(c, c);
            let twoc = self.mul(self.from_int(2), c);
            Ideal::new(self.clone(), vec![c2, twoc]).contains(c)
        })
    }

    /// Annihilator of an element, as an ideal.
    pub fn annihilator(self: &Arc<Self>, s: RingElt) -> Ideal {
        let elems: Vec<RingElt> = self.elements().filter(|&r| self.mul(r, s) == 0).collect();
        Ideal::from_elements(self.clone(), elems)
    }

    /// Stable annihilator `Ann(s^inf)` and its stabilization index (smallest
    /// `k` with `Ann(s^k) = Ann(s^{k+1})`).
    pub fn stable_annihilator(self: &Arc<Self>, s: RingElt) -> (Ideal, usize) {
        let mut k = 1usize;
        let mut power = s;
        let mut current = self.annihilator(power);
        loop {
            let next_power = self.mul(power, s);
            let next = self.annihilator(next_power);
            if next.elements() == current.elements() {
                return (current, k);
            }
            power = next_power;
            current = next;
            k += 1;
        }
    }

    /// Quotient by an ideal, with the reduction map.
    pub fn quotient(self: &Arc<Self>, a: &Ideal) -> (Arc<FiniteRing>, RingMap) {
        assert!(a.ring() == self, "ideal belongs to a different ring");
        let mut rep = vec![RingElt::MAX; self.n];
        let mut reps: Vec<RingElt> = Vec::new();
        for r in self.elements() {
            if rep[r as usize] != RingElt::MAX {
                continue;
            }
            let id = reps.len() as RingElt;
            for &i in a.elements() {
                rep[self.add(r, i) as usize] = id;
            }
            reps.push(r);
        }
        let m = reps.len();
        let mut add = vec![0 as RingElt; m * m];
        let mut mul = vec![0 as RingElt; m * m];
        for (i, &x) in reps.iter().enumerate() {
            for (j, &y) in reps.iter().enumerate() {
                add[i * m + j] = rep[self.add(x, y) as usize];
                mul[i * m + j] = rep[self.mul(x, y) as usize];
            }
        }
        let names = reps.iter().map(|&r| self.name(r).to_string()).collect();
        let one = rep[self.one() as usize];
        let gens: Vec<RingElt> = {
            let mut set = BTreeSet::new();
            for &g in self.add_gens() {
                let p = rep[g as usize];
                if p != 0 {
                    set.insert(p);
                }
            }
            set.into_iter().collect()
        };
        let ideal_gens: Vec<String> = a.gens().iter().map(|&g| self.name(g).to_string()).collect();
        let q = FiniteRing::from_tables(
            format!("{}/({})", self.spec, ideal_gens.join(",")),
            add,
            mul,
            names,
            one,
            gens,
        );
        let map = RingMap { src: self.clone(), dst: q.clone(), map: rep, kind: MapKind::Reduction };
        (q, map)
    }

    /// Localization at `s`: the quotient by `Ann(s^inf)`. The image of `s`
    /// is a unit unless the localized ring collapses to zero.
    pub fn localize(self: &Arc<Self>, s: RingElt) -> (Arc<FiniteRing>, RingMap) {
        let (ann, _) = self.stable_annihilator(s);
        let (q, mut map) = self.quotient(&ann);
        map.kind = MapKind::Localization;
        debug_assert!(q.is_zero_ring() || q.is_unit(map.apply(s)));
        (q, map)
    }

    /// Find `(u, v)` with `u*a1 + v*a2 = target`, if possible.
    pub fn solve_two(
        &self,
        target: RingElt,
        a1: RingElt,
        a2: RingElt,
    ) -> Option<(RingElt, RingElt)> {
        for u in 0..self.n as RingElt {
            let ua = self.mul(u, a1);
            for v in 0..self.n as RingElt {
                if self.add(ua, self.mul(v, a2)) == target {
                    return Some((u, v));
                }
            }
        }
        None
    }

    /// Express 1 as `sum r_i * vals[k_i]` if the values generate the unit
    /// ideal; returns the `(r_i, k_i)` pairs.
    pub fn one_as_combination(self: &Arc<Self>, vals: &[RingElt]) -> Option<Vec<(RingElt, usize)>> {
        let mut prov: Vec<Option<(RingElt, usize, RingElt)>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut frontier = vec![0 as RingElt];
        while let Some(x) = frontier.pop() {
            for (k, &v) in vals.iter().enumerate() {
                for r in self.elements() {
                    let y = self.add(x, self.mul(r, v));
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        prov[y as usize] = Some((x, k, r));
                        frontier.push(y);
                    }
                }
            }
        }
        if !seen[self.one() as usize] || self.n == 1 {
            return if self.n == 1 { Some(vec![]) } else { None };
        }
        let mut out = Vec::new();
        let mut cur = self.one();
        while cur != 0 {
            let (prev, k, r) = prov[cur as usize].unwrap();
            out.push((r, k));
            cur = prev;
        }
        let mut total = self.zero();
        for &(r, k) in &out {
            total = self.add(total, self.mul(r, vals[k]));
        }
        assert_eq!(total, self.one());
        Some(out)
    }
}

fn find_product_split(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    for i in 0..s.len() {
        match bytes[i] {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b'x' if depth == 0 && i >= 1 && i + 1 < s.len() => {
                if bytes[i - 1] == b' ' && bytes[i + 1] == b' ' {
                    return Some(i - 1);
                }
            }
            _ => {}
        }
    }
    None
}

/// Parse a monic polynomial like `x^2`, `x^2+x+1`, `x^3+2x+1` into its low
/// coefficients over `base`.
fn parse_monic_poly(base: &Arc<FiniteRing>, src: &str) -> Result<Vec<RingElt>, RingError> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    let mut terms: Vec<(usize, i64)> = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut cur = String::new();
    let mut sign = 1i64;
    let mut k = 0usize;
    while k <= chars.len() {
        let at_sign = k < chars.len() && (chars[k] == '+' || chars[k] == '-');
        if k == chars.len() || (at_sign && !cur.is_empty()) {
            if !cur.is_empty() {
                let (deg, coeff) =
                    parse_int_term(&cur).ok_or_else(|| RingError::ParseError(src.into()))?;
                terms.push((deg, sign * coeff));
                cur.clear();
            }
            if k < chars.len() {
                sign = if chars[k] == '-' { -1 } else { 1 };
            }
        } else if at_sign {
            if chars[k] == '-' {
                sign = -sign;
            }
        } else {
            cur.push(chars[k]);
        }
        k += 1;
    }
    let deg =
        terms.iter().map(|&(d, _)| d).max().ok_or_else(|| RingError::ParseError(src.into()))?;
    if deg == 0 {
        return Err(RingError::ParseError(src.into()));
    }
    let mut coeffs = vec![0i64; deg + 1];
    for (d, c) in terms {
        coeffs[d] += c;
    }
    if coeffs[deg] != 1 {
        return Err(RingError::ParseError(format!("{src}: polynomial must be monic")));
    }
    Ok(coeffs[..deg].iter().map(|&c| base.from_int(c)).collect())
}

fn parse_int_term(term: &str) -> Option<(usize, i64)> {
    if let Some(p) = term.find('x') {
        let coeff_src = &term[..p];
        let coeff = if coeff_src.is_empty() {
            1
        } else {
            coeff_src.strip_suffix('*').unwrap_or(coeff_src).parse().ok()?
        };
        let rest = &term[p + 1..];
        let deg = if rest.is_empty() { 1 } else { rest.strip_prefix('^')?.parse().ok()? };
        Some((deg, coeff))
    } else {
        Some((0, term.parse().ok()?))
    }
}

fn prime_power(q: usize) -> Option<(usize, usize)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&p| q % p == 0).unwrap();
    if (2..p).any(|d| p % d == 0) {
        return None;
    }
    let mut v = q;
    let mut k = 0;
    while v % p == 0 {
        v /= p;
        k += 1;
    }
    (v == 1).then_some((p, k))
}

/// Lexicographically smallest monic irreducible of degree `k` over `F_p`.
fn smallest_irreducible(p: usize, k: usize) -> Vec<RingElt> {
    let total = p.pow(k as u32);
    'outer: for idx in 0..total {
        let mut coeffs = Vec::with_capacity(k);
        let mut v = idx;
        for _ in 0..k {
            coeffs.push(v % p);
            v /= p;
        }
        let f: Vec<usize> = coeffs.iter().copied().chain(std::iter::once(1)).collect();
        for d in 1..=k / 2 {
            for di in 0..p.pow(d as u32) {
                let mut g = Vec::with_capacity(d + 1);
                let mut w = di;
                for _ in 0..d {
                    g.push(w % p);
                    w /= p;
                }
                g.push(1);
                if poly_divides(&g, &f, p) {
                    continue 'outer;
                }
            }
        }
        return coeffs.iter().map(|&c| c as RingElt).collect();
    }
    unreachable!("irreducible polynomial exists for every degree")
}

fn poly_divides(g: &[usize], f: &[usize], p: usize) -> bool {
    let mut rem: Vec<usize> = f.to_vec();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let k = rem.len() - 1 - dg;
            for i in 0..=dg {
                rem[k + i] = (rem[k + i] + p * p - lead * g[i] % p) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c % p == 0)
}

/// An ideal, stored as generators plus the full element set (sorted).
#[derive(Clone)]
pub struct Ideal {
    ring: Arc<FiniteRing>,
    gens: Vec<RingElt>,
    elems: Vec<RingElt>,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<&str> = self.gens.iter().map(|&g| self.ring.name(g)).collect();
        write!(f, "({})[{} elts]", gens.join(","), self.elems.len())
    }
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.elems == other.elems
    }
}

impl Ideal {
    pub fn new(ring: Arc<FiniteRing>, gens: Vec<RingElt>) -> Ideal {
        let mut seen = vec![false; ring.size()];
        seen[0] = true;
        let mut frontier = vec![0 as RingElt];
        while let Some(x) = frontier.pop() {
            for &g in &gens {
                for r in ring.elements() {
                    let y = ring.add(x, ring.mul(r, g));
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        frontier.push(y);
                    }
                }
            }
        }
        let elems: Vec<RingElt> =
            (0..ring.size() as RingElt).filter(|&x| seen[x as usize]).collect();
        Ideal { ring, gens, elems }
    }

    pub fn from_elements(ring: Arc<FiniteRing>, elems: Vec<RingElt>) -> Ideal {
        let mut sorted = elems;
        sorted.sort_unstable();
        sorted.dedup();
        Ideal { ring, gens: sorted.clone(), elems: sorted }
    }

    pub fn zero(ring: Arc<FiniteRing>) -> Ideal {
        Ideal::new(ring, vec![])
    }

    pub fn unit(ring: Arc<FiniteRing>) -> Ideal {
        let one = ring.one();
        Ideal::new(ring, vec![one])
    }

    pub fn principal(ring: Arc<FiniteRing>, g: RingElt) -> Ideal {
        Ideal::new(ring, vec![g])
    }

    pub fn ring(&self) -> &Arc<FiniteRing> {
        &self.ring
    }

    pub fn gens(&self) -> &[RingElt] {
        &self.gens
    }

    pub fn elements(&self) -> &[RingElt] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, x: RingElt) -> bool {
        self.elems.binary_search(&x).is_ok()
    }

    pub fn is_zero(&self) -> bool {
        self.elems.len() == 1
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.elems.len() == self.ring.size()
    }

    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal, RingError> {
        if self.ring != other.ring {
            return Err(RingError::MixedRings);
        }
        let mut gens = Vec::new();
        for &a in &self.gens {
            for &b in &other.gens {
                gens.push(self.ring.mul(a, b));
            }
        }
        Ok(Ideal::new(self.ring.clone(), gens))
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal, RingError> {
        if self.ring != other.ring {
            return Err(RingError::MixedRings);
        }
        let mut gens = self.gens.clone();
        gens.extend_from_slice(&other.gens);
        Ok(Ideal::new(self.ring.clone(), gens))
    }

    /// The ideal generated by the squares of all elements of `self`.
    pub fn square_gen(&self) -> Ideal {
        let gens: Vec<RingElt> = self.elems.iter().map(|&a| self.ring.mul(a, a)).collect();
        Ideal::new(self.ring.clone(), gens)
    }

    /// The ideal generated by `k*a` and `a^pow` over all `a` in `self`.
    pub fn scaled_power_gen(&self, k: i64, pow: usize) -> Ideal {
        let kk = self.ring.from_int(k);
        let mut gens: Vec<RingElt> = Vec::new();
        for &a in &self.elems {
            gens.push(self.ring.mul(kk, a));
            gens.push(self.ring.pow(a, pow));
        }
        Ideal::new(self.ring.clone(), gens)
    }

    pub fn comaximal(&self, other: &Ideal) -> Result<bool, RingError> {
        Ok(self.sum(other)?.is_unit_ideal())
    }

    /// Image under a ring map, as an ideal of the target.
    pub fn image(&self, map: &RingMap) -> Ideal {
        let gens: Vec<RingElt> = self.gens.iter().map(|&g| map.apply(g)).collect();
        Ideal::new(map.dst.clone(), gens)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Reduction,
    Localization,
}

/// A unital ring homomorphism, tabulated on elements.
pub struct RingMap {
    src: Arc<FiniteRing>,
    dst: Arc<FiniteRing>,
    map: Vec<RingElt>,
    kind: MapKind,
}

impl RingMap {
    pub fn src(&self) -> &Arc<FiniteRing> {
        &self.src
    }

    pub fn dst(&self) -> &Arc<FiniteRing> {
        &self.dst
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn apply(&self, x: RingElt) -> RingElt {
        self.map[x as usize]
    }

    pub fn compose(&self, then: &RingMap) -> RingMap {
        assert!(self.dst == then.src);
        RingMap {
            src: self.src.clone(),
            dst: then.dst.clone(),
            map: self.map.iter().map(|&x| then.apply(x)).collect(),
            kind: self.kind,
        }
    }

    pub fn kernel(&self) -> Ideal {
        let elems: Vec<RingElt> = self.src.elements().filter(|&x| self.apply(x) == 0).collect();
        Ideal::from_elements(self.src.clone(), elems)
    }

    pub fn is_homomorphism(&self) -> bool {
        if self.apply(self.src.zero()) != self.dst.zero()
            || self.apply(self.src.one()) != self.dst.one()
        {
            return false;
        }
        for x in self.src.elements() {
            for y in self.src.elements() {
                if self.apply(self.src.add(x, y)) != self.dst.add(self.apply(x), self.apply(y)) {
                    return false;
                }
                if self.apply(self.src.mul(x, y)) != self.dst.mul(self.apply(x), self.apply(y)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.dst.size()];
        for x in self.src.elements() {
            hit[self.apply(x) as usize] = true;
        }
        hit.iter().all(|&h| h)
    }
}

/// Two surjections out of the same ring with equal fibers have canonically
/// isomorphic targets (match `f(x)` with `g(x)`).
pub fn canonically_isomorphic(f: &RingMap, g: &RingMap) -> bool {
    assert!(f.src == g.src);
    if !f.is_surjective() || !g.is_surjective() {
        return false;
    }
    f.src.elements().all(|x| {
        f.src.elements().all(|y| (f.apply(x) == f.apply(y)) == (g.apply(x) == g.apply(y)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_basic() {
        let z6 = FiniteRing::parse("Z/6").unwrap();
        assert_eq!(z6.size(), 6);
        assert_eq!(z6.units(), vec![1, 5]);

        let gf4 = FiniteRing::parse("GF(4)").unwrap();
        assert_eq!(gf4.size(), 4);
        assert_eq!(gf4.units().len(), 3);

        let r = FiniteRing::parse("Z/4[x]/(x^2)").unwrap();
        assert_eq!(r.size(), 16);
        assert!(r.is_local());
        assert_eq!(r.size() - r.units().len(), 8);
        let two = r.from_int(2);
        let x = r.parse_elt("x").unwrap();
        let m = Ideal::new(r.clone(), vec![two, x]);
        assert_eq!(m.len(), 8);

        let prod = FiniteRing::parse("Z/2 x Z/3").unwrap();
        assert_eq!(prod.size(), 6);
        assert_eq!(prod.units().len(), 2);

        assert!(FiniteRing::parse("Z/0").is_err());
        assert!(FiniteRing::parse("F7").is_err());
        assert!(FiniteRing::parse("GF(6)").is_err());
        assert!(matches!(
            FiniteRing::parse_capped("Z/5000", 4096),
            Err(RingError::SizeLimit(5000, 4096))
        ));
    }

    #[test]
    fn ring_axioms_small() {
        for spec in ["Z/6", "GF(4)", "Z/4[x]/(x^2)", "Z/2 x Z/3", "GF(9)"] {
            let r = FiniteRing::parse(spec).unwrap();
            let n = r.size() as RingElt;
            for a in 0..n {
                assert_eq!(r.add(a, r.neg(a)), 0);
                assert_eq!(r.mul(a, r.one()), a);
                for b in 0..n {
                    assert_eq!(r.add(a, b), r.add(b, a));
                    assert_eq!(r.mul(a, b), r.mul(b, a));
                    for c in 0..n {
                        assert_eq!(r.add(r.add(a, b), c), r.add(a, r.add(b, c)));
                        assert_eq!(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c)));
                        assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
                    }
                }
            }
            for a in 0..n {
                let zero_divisor = (1..n).any(|b| r.mul(a, b) == 0);
                assert_eq!(r.is_unit(a), !zero_divisor, "{spec}: {a}");
            }
        }
    }

    #[test]
    fn ideal_arithmetic() {
        let z8 = FiniteRing::parse("Z/8").unwrap();
        let two = Ideal::principal(z8.clone(), 2);
        let four = two.product(&two).unwrap();
        assert_eq!(four, Ideal::principal(z8.clone(), 4));

        let z6 = FiniteRing::parse("Z/6").unwrap();
        let a = Ideal::principal(z6.clone(), 2);
        let b = Ideal::principal(z6.clone(), 3);
        assert!(a.sum(&b).unwrap().is_unit_ideal());
        assert!(a.comaximal(&b).unwrap());
        let z4 = FiniteRing::parse("Z/4").unwrap();
        let t = Ideal::principal(z4.clone(), 2);
        assert!(!t.comaximal(&t).unwrap());
        assert!(t.comaximal(&Ideal::unit(z4.clone())).unwrap());

        let i23 = a.product(&b).unwrap();
        assert!(i23.is_subset(&a) && i23.is_subset(&b));

        let z9 = FiniteRing::parse("Z/9").unwrap();
        assert!(a.sum(&Ideal::principal(z9, 3)).is_err());
    }

    #[test]
    fn square_gen_vs_square() {
        let r = FiniteRing::parse("Z/4[x]/(x^2)").unwrap();
        let x = r.parse_elt("x").unwrap();
        let ax = Ideal::principal(r.clone(), x);
        assert!(ax.product(&ax).unwrap().is_zero());
        assert!(ax.square_gen().is_zero());

        let two = r.from_int(2);
        let m = Ideal::new(r.clone(), vec![two, x]);
        let m2 = m.product(&m).unwrap();
        let msq = m.square_gen();
        assert!(msq.is_subset(&m2));
        assert!(msq.is_zero());
        assert!(!m2.is_zero());
    }

    #[test]
    fn residue_fields_and_condition() {
        let z6 = FiniteRing::parse("Z/6").unwrap();
        let mut fields = z6.residue_fields();
        fields.sort();
        assert_eq!(fields, vec![("F2".to_string(), 2), ("F3".to_string(), 3)]);

        let z9 = FiniteRing::parse("Z/9").unwrap();
        assert_eq!(z9.residue_fields(), vec![("F3".to_string(), 3)]);
        assert!(z9.condition_cl());

        let gf4 = FiniteRing::parse("GF(4)").unwrap();
        assert_eq!(gf4.residue_fields(), vec![("F4".to_string(), 4)]);
        assert!(gf4.condition_cl());
        assert!(!gf4.has_f2_residue_field());

        let z4 = FiniteRing::parse("Z/4").unwrap();
        assert!(!z4.condition_cl());
        assert!(z4.has_f2_residue_field());
    }

    #[test]
    fn localization() {
        let z12 = FiniteRing::parse("Z/12").unwrap();
        let (rs, f) = z12.localize(2);
        assert_eq!(rs.size(), 3);
        assert!(rs.is_unit(f.apply(2)));
        assert!(f.is_homomorphism());

        let (ru, fu) = z12.localize(7);
        assert_eq!(ru.size(), 12);
        assert!(fu.is_homomorphism());

        let (rz, _) = z12.localize(0);
        assert!(rz.is_zero_ring());
        let z16 = FiniteRing::parse("Z/16").unwrap();
        let (r2, _) = z16.localize(2);
        assert!(r2.is_zero_ring());
    }

    #[test]
    fn localization_composes() {
        let z12 = FiniteRing::parse("Z/12").unwrap();
        let (rs, fs) = z12.localize(2);
        let (rst, ft) = rs.localize(fs.apply(3));
        let (rt, gt) = z12.localize(3);
        let (rts, gs) = rt.localize(gt.apply(2));
        let f = fs.compose(&ft);
        let g = gt.compose(&gs);
        assert_eq!(rst.size(), rts.size());
        assert!(canonically_isomorphic(&f, &g));
    }

    #[test]
    fn stable_annihilator_shadow() {
        for spec in ["Z/12", "Z/8", "Z/6", "Z/4[x]/(x^2)"] {
            let r = FiniteRing::parse(spec).unwrap();
            for s in r.elements() {
                let (ann, k) = r.stable_annihilator(s);
                let sk = r.pow(s, k);
                let skr = Ideal::principal(r.clone(), sk);
                for &x in skr.elements() {
                    if ann.contains(x) {
                        assert_eq!(x, 0, "{spec}: ker meets s^k R nontrivially");
                    }
                }
            }
        }
    }

    #[test]
    fn quotient_universal_property() {
        let z12 = FiniteRing::parse("Z/12").unwrap();
        let (_rs, fs) = z12.localize(2);
        let three = Ideal::principal(z12.clone(), 3);
        let (_q, red) = z12.quotient(&three);
        assert!(canonically_isomorphic(&fs, &red));
    }

    #[test]
    fn element_expressions() {
        let r = FiniteRing::parse("Z/4[x]/(x^2)").unwrap();
        let e = r.parse_elt("2x+1").unwrap();
        let two = r.from_int(2);
        let x = r.parse_elt("x").unwrap();
        assert_eq!(e, r.add(r.mul(two, x), r.one()));
        assert_eq!(r.parse_elt("x^2").unwrap(), 0);
        assert_eq!(r.parse_elt("-1").unwrap(), r.neg(r.one()));
        assert!(r.parse_elt("y").is_err());
    }

    #[test]
    fn one_combination() {
        let z9 = FiniteRing::parse("Z/9").unwrap();
        let vals: Vec<RingElt> = z9.elements().map(|c| z9.sub(z9.mul(c, c), c)).collect();
        let combo = z9.one_as_combination(&vals).unwrap();
        assert!(!combo.is_empty());

        let z4 = FiniteRing::parse("Z/4").unwrap();
        let vals4: Vec<RingElt> = z4.elements().map(|c| z4.sub(z4.mul(c, c), c)).collect();
        assert!(z4.one_as_combination(&vals4).is_none());
    }

    #[test]
    fn local_decomposition() {
        let z12 = FiniteRing::parse("Z/12").unwrap();
        let factors = z12.local_factors();
        assert_eq!(factors.len(), 2);
        let mut sizes: Vec<usize> = factors.iter().map(|f| f.ring.size()).collect();
        sizes.sort();
        assert_eq!(sizes, vec![3, 4]);
        assert!(!z12.is_local());
        assert!(FiniteRing::parse("Z/9").unwrap().is_local());
    }

    #[test]
    fn radical_is_nilpotents() {
        let z12 = FiniteRing::parse("Z/12").unwrap();
        let rad = z12.radical();
        assert_eq!(rad.elements(), &[0, 6]);
    }
}
