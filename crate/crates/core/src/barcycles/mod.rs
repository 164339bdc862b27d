//! Bar-resolution chains over `GL_n(Q)` and split tori: c-cycles, the Milnor
//! cycles built from the `A_{i,n}` matrices, the κ and χ′ chain formulas, and
//! the projection of torus chains to exterior powers.

mod formulas;
mod matrix;
mod torus;

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fields::Place;

pub use formulas::{
    a_gen, a_torus, chi_prime_data, diag_gen, diag_torus, kappa_block_check, kappa_chain, milnor_cycle,
    milnor_cycle_torus, splitting_chain, ChiPrimeData, KappaTerm,
};
pub use matrix::QMatrix;
pub use torus::TorusElement;

/// Group elements that can appear in bar tuples.
pub trait BarElement: Clone + Ord + Debug {
    fn op(&self, other: &Self) -> Self;
    /// Name of the ambient group, e.g. `GL_3(Q)`.
    fn ambient(&self) -> String;
    fn to_json(&self) -> Value;
}

impl BarElement for QMatrix {
    fn op(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn ambient(&self) -> String {
        format!("GL_{}(Q)", self.size())
    }

    fn to_json(&self) -> Value {
        QMatrix::to_json(self)
    }
}

impl BarElement for TorusElement {
    fn op(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn ambient(&self) -> String {
        format!("T_{}({})", self.rank(), self.field())
    }

    fn to_json(&self) -> Value {
        TorusElement::to_json(self)
    }
}

/// A rational combination of bar tuples `[g_1|...|g_k]` of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarChain<G: BarElement> {
    degree: usize,
    ambient: Option<String>,
    terms: BTreeMap<Vec<G>, BigRational>,
}

impl<G: BarElement> BarChain<G> {
    pub fn zero(degree: usize) -> Self {
        BarChain { degree, ambient: None, terms: BTreeMap::new() }
    }

    pub fn single(tuple: Vec<G>, coefficient: BigRational) -> Result<Self> {
        let mut c = Self::zero(tuple.len());
        c.add_term(tuple, coefficient)?;
        Ok(c)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn ambient(&self) -> Option<&str> {
        self.ambient.as_deref()
    }

    pub fn terms(&self) -> &BTreeMap<Vec<G>, BigRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, tuple: Vec<G>, coefficient: BigRational) -> Result<()> {
        if tuple.len() != self.degree {
            return Err(Error::invalid(format!("tuple of length {} in a degree-{} chain", tuple.len(), self.degree)));
        }
        for g in &tuple {
            let amb = g.ambient();
            match &self.ambient {
                Some(a) if *a != amb => return Err(Error::invalid(format!("element of {amb} in a chain over {a}"))),
                Some(_) => {}
                None => self.ambient = Some(amb),
            }
        }
        if coefficient.is_zero() {
            return Ok(());
        }
        let entry = self.terms.entry(tuple).or_insert_with(BigRational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
        Ok(())
    }

    pub fn add(&self, other: &BarChain<G>) -> Result<Self> {
        self.add_scaled(other, &BigRational::one())
    }

    pub fn add_scaled(&self, other: &BarChain<G>, k: &BigRational) -> Result<Self> {
        if other.degree != self.degree {
            return Err(Error::invalid("adding chains of different degree"));
        }
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c * k)?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero(self.degree);
        }
        BarChain {
            degree: self.degree,
            ambient: self.ambient.clone(),
            terms: self.terms.iter().map(|(t, c)| (t.clone(), c * k)).collect(),
        }
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator(&self) -> BigInt {
        self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    pub fn is_integral(&self) -> bool {
        self.denominator().is_one()
    }

    pub fn map<H: BarElement>(&self, f: impl Fn(&G) -> Result<H>) -> Result<BarChain<H>> {
        let mut out = BarChain::zero(self.degree);
        for (t, c) in &self.terms {
            out.add_term(t.iter().map(&f).collect::<Result<Vec<H>>>()?, c.clone())?;
        }
        Ok(out)
    }

    /// `{degree, ambient, terms: [{coefficient, tuple}]}`.
    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "ambient": self.ambient,
            "integral": self.is_integral(),
            "denominator": self.denominator().to_string(),
            "terms": self.terms.iter().map(|(t, c)| json!({
                "coefficient": c.to_string(),
                "tuple": t.iter().map(BarElement::to_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `∂[g_1|...|g_k] = [g_2|...|g_k] + Σ (-1)^i [...|g_i g_{i+1}|...] + (-1)^k [g_1|...|g_{k-1}]`.
pub fn bar_boundary<G: BarElement>(c: &BarChain<G>) -> Result<BarChain<G>> {
    let k = c.degree();
    if k == 0 {
        return Err(Error::invalid("the bar boundary needs degree at least 1"));
    }
    let mut out = BarChain::zero(k - 1);
    for (t, coef) in &c.terms {
        out.add_term(t[1..].to_vec(), coef.clone())?;
        for i in 1..k {
            let mut merged = Vec::with_capacity(k - 1);
            merged.extend_from_slice(&t[..i - 1]);
            merged.push(t[i - 1].op(&t[i]));
            merged.extend_from_slice(&t[i + 1..]);
            let s = if i % 2 == 0 { coef.clone() } else { -coef.clone() };
            out.add_term(merged, s)?;
        }
        let s = if k.is_multiple_of(2) { coef.clone() } else { -coef.clone() };
        out.add_term(t[..k - 1].to_vec(), s)?;
    }
    Ok(out)
}

/// All permutations of `0..n` in lexicographic order, with signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, i8)> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        out.push((p.clone(), if inversions % 2 == 0 { 1 } else { -1 }));
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
}

/// `c(g_1, ..., g_n) = Σ_σ sign(σ) [g_σ(1)|...|g_σ(n)]` for pairwise commuting elements.
pub fn c_cycle<G: BarElement>(gs: &[G]) -> Result<BarChain<G>> {
    for i in 0..gs.len() {
        for j in i + 1..gs.len() {
            if gs[i].op(&gs[j]) != gs[j].op(&gs[i]) {
                return Err(Error::invalid(format!("elements {i} and {j} do not commute")));
            }
        }
    }
    let mut out = BarChain::zero(gs.len());
    for (p, s) in permutations(gs.len()) {
        out.add_term(p.iter().map(|&i| gs[i].clone()).collect(), BigRational::from_integer(s.into()))?;
    }
    Ok(out)
}

/// Basis vector of the free quotient of a torus: `(slot, place)`.
pub type WedgeKey = (usize, Place);

/// An element of `Λ^n` of the free quotient of a torus, on sorted wedge monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorClass {
    degree: usize,
    terms: BTreeMap<Vec<WedgeKey>, BigRational>,
}

impl ExteriorClass {
    pub fn zero(degree: usize) -> Self {
        ExteriorClass { degree, terms: BTreeMap::new() }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<Vec<WedgeKey>, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_monomial(&mut self, mut keys: Vec<WedgeKey>, mut c: BigRational) {
        // bubble sort keeps track of the permutation sign
        for i in 0..keys.len() {
            for j in 0..keys.len() - 1 - i {
                if keys[j] > keys[j + 1] {
                    keys.swap(j, j + 1);
                    c = -c;
                }
            }
        }
        if keys.windows(2).any(|w| w[0] == w[1]) {
            return;
        }
        let e = self.terms.entry(keys).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&self, other: &ExteriorClass, k: &BigRational) -> ExteriorClass {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_monomial(m.clone(), c * k);
        }
        out
    }

    pub fn scale(&self, k: &BigRational) -> ExteriorClass {
        let mut out = ExteriorClass::zero(self.degree);
        if !k.is_zero() {
            out.terms = self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect();
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree,
            "terms": self.terms.iter().map(|(m, c)| json!({
                "coefficient": c.to_string(),
                "wedge": m.iter().map(|(s, p)| format!("e{}[{}]", s, p)).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Free coordinates of a torus element: `(slot, place) -> exponent`, torsion dropped.
fn free_coordinates(g: &TorusElement) -> Vec<(WedgeKey, BigInt)> {
    g.coords()
        .iter()
        .enumerate()
        .flat_map(|(s, u)| u.exponents().iter().map(move |(p, e)| ((s, p.clone()), e.clone())))
        .collect()
}

/// `g_1 ∧ ... ∧ g_n` in the exterior power of the free quotient.
pub fn wedge_of(gs: &[TorusElement]) -> ExteriorClass {
    let coords: Vec<Vec<(WedgeKey, BigInt)>> = gs.iter().map(free_coordinates).collect();
    // dense indices in key order, so sorted index lists are sorted key lists
    let keys: Vec<WedgeKey> = {
        let mut k: Vec<WedgeKey> = coords.iter().flatten().map(|(k, _)| k.clone()).collect();
        k.sort();
        k.dedup();
        k
    };
    let index = |k: &WedgeKey| keys.binary_search(k).expect("collected above") as u32;
    // partial wedges on sorted monomials, so equal terms merge as they appear
    let mut partial: BTreeMap<Vec<u32>, BigInt> = BTreeMap::from([(Vec::new(), BigInt::one())]);
    for v in &coords {
        let v: Vec<(u32, &BigInt)> = v.iter().map(|(k, e)| (index(k), e)).collect();
        let mut next: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (mono, c) in &partial {
            for &(k, e) in &v {
                let Err(pos) = mono.binary_search(&k) else { continue };
                let mut m = mono.clone();
                m.insert(pos, k);
                // moving k from the end to `pos` passes the keys after it
                let term = if (mono.len() - pos) % 2 == 0 { c * e } else { -(c * e) };
                *next.entry(m).or_default() += term;
            }
        }
        next.retain(|_, c| !c.is_zero());
        partial = next;
    }
    let mut out = ExteriorClass::zero(gs.len());
    out.terms = partial
        .into_iter()
        .map(|(m, c)| (m.iter().map(|&i| keys[i as usize].clone()).collect(), BigRational::from_integer(c)))
        .collect();
    out
}

/// Sorted copy of a tuple and the sign of the sorting permutation; `None` on a repeated entry.
fn sorted_with_sign(t: &[TorusElement]) -> Option<(Vec<TorusElement>, bool)> {
    let mut v = t.to_vec();
    let mut odd = false;
    for i in 0..v.len() {
        for j in 0..v.len().saturating_sub(1 + i) {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                odd = !odd;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, odd))
}

/// The projection `[g_1|...|g_n] -> g_1 ∧ ... ∧ g_n`, extended linearly.
pub fn exterior_class(c: &BarChain<TorusElement>) -> ExteriorClass {
    // wedges only depend on the tuple up to order and sign
    let mut grouped: BTreeMap<Vec<TorusElement>, BigRational> = BTreeMap::new();
    for (t, coef) in c.terms() {
        if let Some((sorted, odd)) = sorted_with_sign(t) {
            let e = grouped.entry(sorted).or_insert_with(BigRational::zero);
            if odd {
                *e -= coef;
            } else {
                *e += coef;
            }
        }
    }
    let mut out = ExteriorClass::zero(c.degree());
    for (t, coef) in grouped {
        if !coef.is_zero() {
            out = out.add_scaled(&wedge_of(&t), &coef);
        }
    }
    out
}

/// `n!` as a rational.
pub(crate) fn factorial(n: usize) -> BigRational {
    BigRational::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * k))
}

/// `(-1)^k`.
pub(crate) fn sign_power(k: usize) -> BigRational {
    if k.is_multiple_of(2) { BigRational::one() } else { -BigRational::one() }
}
