//! Polynomials over a prime field `F_p` with small `p`.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::integer::prime_divisors_u64;

/// Polynomial over `F_p`, coefficients from the constant term upward, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "zero has no inverse mod {p}");
    pow_mod(a, p - 2, p)
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * a as u128 % p as u128) as u64;
        }
        a = (a as u128 * a as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

impl Poly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut c: Vec<u64> = coeffs.into_iter().map(|x| x % p).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { p, coeffs: c }
    }

    pub fn zero(p: u64) -> Self {
        Poly { p, coeffs: vec![] }
    }

    pub fn constant(p: u64, c: u64) -> Self {
        Self::new(p, vec![c])
    }

    pub fn one(p: u64) -> Self {
        Self::constant(p, 1)
    }

    /// The variable `t`.
    pub fn t(p: u64) -> Self {
        Self::new(p, vec![0, 1])
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lead(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(inv_mod(self.lead(), self.p))
    }

    pub fn scale(&self, k: u64) -> Poly {
        let p = self.p;
        Poly::new(p, self.coeffs.iter().map(|&c| c * (k % p) % p).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0) + o.coeffs.get(i).unwrap_or(&0))
            .collect();
        Poly::new(self.p, c)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let p = self.p;
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&0) + p - o.coeffs.get(i).unwrap_or(&0))
            .collect();
        Poly::new(p, c)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero(self.p);
        }
        let p = self.p;
        let mut c = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % p;
            }
        }
        Poly::new(p, c)
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let mut r = self.coeffs.clone();
        let dl = d.coeffs.len();
        if r.len() < dl {
            return (Poly::zero(p), self.clone());
        }
        let inv = inv_mod(d.lead(), p);
        let mut q = vec![0u64; r.len() - dl + 1];
        for k in (0..q.len()).rev() {
            let coef = r[k + dl - 1] * inv % p;
            q[k] = coef;
            if coef == 0 {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] = (r[k + j] + p - coef * dc % p) % p;
            }
        }
        (Poly::new(p, q), Poly::new(p, r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, o: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn pow_mod(&self, mut e: u128, m: &Poly) -> Poly {
        let mut base = self.rem(m);
        let mut r = Poly::one(self.p).rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        r
    }

    pub fn derivative(&self) -> Poly {
        let p = self.p;
        let c = self.coeffs.iter().enumerate().skip(1).map(|(i, &a)| (i as u64 % p) * a % p).collect();
        Poly::new(p, c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| (acc * x + c) % self.p)
    }

    /// Base-`p` encoding `Σ c_i p^i`; integer order on codes is graded-lex order.
    pub fn encode(&self) -> u64 {
        self.coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c)
    }

    pub fn decode(p: u64, mut code: u64) -> Poly {
        let mut c = Vec::new();
        while code > 0 {
            c.push(code % p);
            code /= p;
        }
        Poly::new(p, c)
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = self.degree();
        if self.is_zero() || n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let t = Poly::t(self.p);
        let frob = |k: usize| -> Poly {
            let mut x = t.clone();
            for _ in 0..k {
                x = x.pow_mod(self.p as u128, self);
            }
            x
        };
        if frob(n).sub(&t).rem(self) != Poly::zero(self.p) {
            return false;
        }
        prime_divisors_u64(n as u64)
            .into_iter()
            .all(|q| frob(n / q as usize).sub(&t).gcd(self).is_one())
    }

    /// Factorization into monic irreducibles: `(leading coefficient, [(factor, exponent)])`,
    /// factors sorted by place order. Input must be nonzero.
    pub fn factor(&self) -> (u64, Vec<(Poly, u32)>) {
        assert!(!self.is_zero(), "cannot factor the zero polynomial");
        let lead = self.lead();
        let f = self.monic();
        let mut out: Vec<(Poly, u32)> = Vec::new();
        for (sqf, mult) in squarefree(&f) {
            for (g, d) in distinct_degree(&sqf) {
                for h in equal_degree(&g, d) {
                    out.push((h, mult));
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Poly, u32)> = Vec::new();
        for (f, e) in out {
            match merged.last_mut() {
                Some((g, k)) if *g == f => *k += e,
                _ => merged.push((f, e)),
            }
        }
        (lead, merged)
    }
}

/// Square-free decomposition of a monic polynomial: pairs `(square-free part, multiplicity)`.
fn squarefree(f: &Poly) -> Vec<(Poly, u32)> {
    let p = f.p;
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let d = f.derivative();
    if d.is_zero() {
        // f = g(t^p) = g(t)^p over F_p
        let g = Poly::new(p, f.coeffs.iter().step_by(p as usize).copied().collect());
        for (h, m) in squarefree(&g) {
            out.push((h, m * p as u32));
        }
        return out;
    }
    let mut c = f.gcd(&d);
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c);
        let z = w.div_rem(&y).0;
        if !z.is_one() {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_rem(&w).0;
    }
    if !c.is_one() {
        let g = Poly::new(p, c.monic().coeffs.iter().step_by(p as usize).copied().collect());
        for (h, m) in squarefree(&g) {
            out.push((h, m * p as u32));
        }
    }
    out
}

/// Splits a square-free monic polynomial into products of irreducibles of equal degree.
fn distinct_degree(f: &Poly) -> Vec<(Poly, usize)> {
    let p = f.p;
    let t = Poly::t(p);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = t.clone();
    let mut d = 0;
    while rest.degree() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p as u128, &rest);
        let g = h.sub(&t).gcd(&rest);
        if !g.is_one() {
            out.push((g.clone(), d));
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
        }
    }
    if rest.degree() > 0 {
        let deg = rest.degree();
        out.push((rest, deg));
    }
    out
}

/// Cantor–Zassenhaus splitting with a fixed-seed generator, so results are reproducible.
fn equal_degree(f: &Poly, d: usize) -> Vec<Poly> {
    if f.degree() == d {
        return vec![f.clone()];
    }
    let p = f.p;
    let mut rng = ChaCha8Rng::seed_from_u64(f.encode_hash());
    loop {
        let a = Poly::new(p, (0..f.degree()).map(|_| rng.gen_range(0..p)).collect());
        if a.degree() == 0 {
            continue;
        }
        let g = if p == 2 {
            // trace map a + a^2 + ... + a^(2^(d-1))
            let mut acc = a.rem(f);
            let mut term = acc.clone();
            for _ in 1..d {
                term = term.mul(&term).rem(f);
                acc = acc.add(&term);
            }
            acc.gcd(f)
        } else {
            let e = ((p as u128).pow(d as u32) - 1) / 2;
            a.pow_mod(e, f).sub(&Poly::one(p)).gcd(f)
        };
        if !g.is_one() && g.degree() < f.degree() {
            let h = f.div_rem(&g).0;
            let mut out = equal_degree(&g, d);
            out.extend(equal_degree(&h.monic(), d));
            return out;
        }
    }
}

impl Poly {
    fn encode_hash(&self) -> u64 {
        self.coeffs.iter().fold(self.p, |acc, &c| acc.wrapping_mul(1_000_003).wrapping_add(c))
    }
}

impl Ord for Poly {
    /// Degree first, then coefficients from the top down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.p
            .cmp(&other.p)
            .then(self.coeffs.len().cmp(&other.coeffs.len()))
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => write!(f, "t")?,
                (1, c) => write!(f, "{c}*t")?,
                (i, 1) => write!(f, "t^{i}")?,
                (i, c) => write!(f, "{c}*t^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (mod {})", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(p: u64, c: &[u64]) -> Poly {
        Poly::new(p, c.to_vec())
    }

    #[test]
    fn arithmetic_roundtrip() {
        let a = poly(5, &[1, 2, 3]);
        let b = poly(5, &[4, 1]);
        let (q, r) = a.mul(&b).add(&poly(5, &[2])).div_rem(&b);
        assert_eq!(q, a);
        assert_eq!(r, poly(5, &[2]));
        assert_eq!(Poly::decode(5, a.encode()), a);
    }

    #[test]
    fn ordering_is_degree_then_top_coefficients() {
        let t = poly(3, &[0, 1]);
        let t1 = poly(3, &[1, 1]);
        let t2p1 = poly(3, &[1, 0, 1]);
        assert!(t < t1 && t1 < t2p1);
        assert!(t.encode() < t1.encode());
    }

    #[test]
    fn irreducibility() {
        assert!(poly(3, &[1, 0, 1]).is_irreducible()); // t^2+1 over F_3
        assert!(!poly(5, &[1, 0, 1]).is_irreducible()); // (t+2)(t+3) over F_5
        assert!(poly(2, &[1, 1, 1]).is_irreducible());
        assert!(!poly(2, &[1, 0, 1]).is_irreducible());
    }

    #[test]
    fn factor_example_over_f3() {
        // 2t^2 + 2t = 2 * t * (t+1)
        let (lead, f) = poly(3, &[0, 2, 2]).factor();
        assert_eq!(lead, 2);
        assert_eq!(f, vec![(poly(3, &[0, 1]), 1), (poly(3, &[1, 1]), 1)]);
    }

    #[test]
    fn factor_with_multiplicities_and_char_p_powers() {
        for p in [2u64, 3, 5, 7] {
            let a = poly(p, &[1, 1]);
            let b = Poly::t(p);
            let mut f = a.mul(&a).mul(&a).mul(&b);
            for _ in 0..p {
                f = f.mul(&poly(p, &[1, 0, 1]).add(&Poly::t(p)));
            }
            let (lead, fac) = f.factor();
            let mut rebuilt = Poly::constant(p, lead);
            for (g, e) in &fac {
                assert!(g.is_irreducible() && g.is_monic());
                for _ in 0..*e {
                    rebuilt = rebuilt.mul(g);
                }
            }
            assert_eq!(rebuilt, f, "p = {p}");
        }
    }

    #[test]
    fn equal_degree_split() {
        // product of all monic irreducible quadratics over F_3
        let quads: Vec<Poly> = (9..27).map(|c| Poly::decode(3, c)).filter(|q| q.is_monic() && q.is_irreducible()).collect();
        assert_eq!(quads.len(), 3);
        let f = quads.iter().fold(Poly::one(3), |acc, q| acc.mul(q));
        let (_, fac) = f.factor();
        assert_eq!(fac.into_iter().map(|x| x.0).collect::<Vec<_>>(), quads);
    }
}
