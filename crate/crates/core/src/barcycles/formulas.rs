//! The explicit matrices and chains: `D_{i,n}`, `A_{i,n}`, Milnor cycles, κ and χ′.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{c_cycle, factorial, sign_power, BarChain, QMatrix, TorusElement};
use crate::bncomplex::TruncatedBnComplex;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fgab::{axpy, SparseVec};
use crate::fields::{Field, UnitVector};
use crate::milnor::{MilnorExpression, MilnorSymbol};

fn check_index(i: usize, n: usize) -> Result<()> {
    if i == 0 || i > n {
        return Err(Error::invalid(format!("index {i} out of range 1..={n}")));
    }
    Ok(())
}

/// Diagonal entries of `A_{i,n}(a)`: `a` in slots `1..i-1`, `a^{-(i-1)}` in slot `i` (just `a` when `i = 1`), then ones.
fn a_diagonal<T: Clone>(i: usize, n: usize, a: &T, one: &T, pow: impl Fn(&T, i64) -> T) -> Vec<T> {
    let mut d = vec![one.clone(); n];
    if i == 1 {
        d[0] = a.clone();
    } else {
        for slot in d.iter_mut().take(i - 1) {
            *slot = a.clone();
        }
        d[i - 1] = pow(a, -(i as i64 - 1));
    }
    d
}

fn rational_pow(a: &BigRational, k: i64) -> BigRational {
    num_traits::pow::Pow::pow(a, k as i32)
}

/// `D_{i,n}(a)`: the identity with `a` at slot `i`.
pub fn diag_gen(i: usize, n: usize, a: &BigRational) -> Result<QMatrix> {
    check_index(i, n)?;
    if a.is_zero() {
        return Err(Error::invalid("entry must be nonzero"));
    }
    let mut d = vec![BigRational::one(); n];
    d[i - 1] = a.clone();
    QMatrix::diagonal(&d)
}

/// `A_{1,n}(a) = diag(a, I)`, `A_{i,n}(a) = diag(a, ..., a, a^{-(i-1)}, I)`.
pub fn a_gen(i: usize, n: usize, a: &BigRational) -> Result<QMatrix> {
    check_index(i, n)?;
    if a.is_zero() {
        return Err(Error::invalid("entry must be nonzero"));
    }
    QMatrix::diagonal(&a_diagonal(i, n, a, &BigRational::one(), rational_pow))
}

pub fn diag_torus(i: usize, n: usize, u: &UnitVector) -> Result<TorusElement> {
    check_index(i, n)?;
    let mut d = vec![UnitVector::one(u.field()); n];
    d[i - 1] = u.clone();
    TorusElement::new(u.field(), d)
}

pub fn a_torus(i: usize, n: usize, u: &UnitVector) -> Result<TorusElement> {
    check_index(i, n)?;
    let d = a_diagonal(i, n, u, &UnitVector::one(u.field()), |x, k| x.pow(&BigInt::from(k)));
    TorusElement::new(u.field(), d)
}

/// `[a_1, ..., a_n] = c(A_{1,n}(a_1), ..., A_{n,n}(a_n))`.
pub fn milnor_cycle(a: &[BigRational]) -> Result<BarChain<QMatrix>> {
    let n = a.len();
    let gs = a.iter().enumerate().map(|(i, x)| a_gen(i + 1, n, x)).collect::<Result<Vec<_>>>()?;
    c_cycle(&gs)
}

pub fn milnor_cycle_torus(u: &[UnitVector]) -> Result<BarChain<TorusElement>> {
    let n = u.len();
    let gs = u.iter().enumerate().map(|(i, x)| a_torus(i + 1, n, x)).collect::<Result<Vec<_>>>()?;
    c_cycle(&gs)
}

/// `((-1)^{n-1} / (n-1)!) [a_1, ..., a_n]`.
pub fn splitting_chain(a: &[BigRational], caps: &Caps) -> Result<BarChain<QMatrix>> {
    let n = a.len();
    if n == 0 {
        return Err(Error::invalid("need at least one entry"));
    }
    if n > caps.max_matrix_size {
        return Err(Error::CapExceeded(format!("matrix size {n} above cap {}", caps.max_matrix_size)));
    }
    Ok(milnor_cycle(a)?.scale(&(sign_power(n - 1) / factorial(n - 1))))
}

/// One summand `k · a ⊗ b ⊗ {c_1, ..., c_{n-2}}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KappaTerm {
    pub coefficient: BigInt,
    pub a: UnitVector,
    pub b: UnitVector,
    pub c: Vec<UnitVector>,
}

impl KappaTerm {
    pub fn to_json(&self) -> Value {
        json!({
            "coefficient": self.coefficient.to_string(),
            "a": self.a.to_element().to_string(),
            "b": self.b.to_element().to_string(),
            "c": self.c.iter().map(|u| u.to_element().to_string()).collect::<Vec<_>>(),
        })
    }
}

fn check_terms(n: usize, terms: &[KappaTerm], caps: &Caps) -> Result<Option<Field>> {
    if n < 3 {
        return Err(Error::invalid("n must be at least 3"));
    }
    if n > caps.max_matrix_size {
        return Err(Error::CapExceeded(format!("matrix size {n} above cap {}", caps.max_matrix_size)));
    }
    let mut field = None;
    for t in terms {
        if t.c.len() != n - 2 {
            return Err(Error::invalid(format!("symbol part needs {} entries, got {}", n - 2, t.c.len())));
        }
        for u in std::iter::once(&t.a).chain([&t.b]).chain(&t.c) {
            if *field.get_or_insert(u.field()) != u.field() {
                return Err(Error::invalid("entries from different fields"));
            }
        }
    }
    Ok(field)
}

/// `diag(I_{k}, x)`.
fn tail_unit(k: usize, x: &UnitVector) -> TorusElement {
    TorusElement::identity(x.field(), k).extend(std::slice::from_ref(x))
}

/// `diag(x I_k, 1)`.
fn head_scalar(k: usize, x: &UnitVector) -> TorusElement {
    TorusElement::scalar(x, k).extend(&[UnitVector::one(x.field())])
}

/// `-((-1)^{n-2}/(n-2)!) Σ [c(diag(I,b), diag(aI,1), C_1..C_{n-2}) + c(diag(I,a), diag(bI,1), C_1..C_{n-2})]`
/// in `GL_{n-1}`, with `C_i = A_{i,n-1}(c_i)`.
pub fn kappa_chain(n: usize, terms: &[KappaTerm], caps: &Caps) -> Result<BarChain<TorusElement>> {
    check_terms(n, terms, caps)?;
    let scale = -(sign_power(n - 2) / factorial(n - 2));
    let mut out = BarChain::zero(n);
    for t in terms {
        let cs = t.c.iter().enumerate().map(|(i, c)| a_torus(i + 1, n - 1, c)).collect::<Result<Vec<_>>>()?;
        for (x, y) in [(&t.b, &t.a), (&t.a, &t.b)] {
            let mut gs = vec![tail_unit(n - 2, x), head_scalar(n - 2, y)];
            gs.extend(cs.iter().cloned());
            let k = &scale * BigRational::from_integer(t.coefficient.clone());
            out = out.add_scaled(&c_cycle(&gs)?, &k)?;
        }
    }
    Ok(out)
}

/// Checks the block shape of a κ chain: every entry lives in `GL_{n-1}`, and from the
/// third slot on each entry is `diag(A_{i,n-2}(c), 1)`.
pub fn kappa_block_check(n: usize, chain: &BarChain<TorusElement>) -> bool {
    chain.terms().keys().all(|t| {
        t.iter().all(|g| g.rank() == n - 1)
            && t.iter().filter(|g| is_c_block(g, n)).count() >= n - 2
    })
}

/// `diag(A_{i,n-2}(c), 1)` for some `i` and `c`.
fn is_c_block(g: &TorusElement, n: usize) -> bool {
    let m = n - 2;
    let d = g.coords();
    if !d[m].is_one() {
        return false;
    }
    let c = &d[0];
    (1..=m).any(|i| a_torus(i, m, c).map(|a| a.coords() == &d[..m]).unwrap_or(false))
}

/// `u₃₁`, the decomposition of `x` and the certificate that `t₂″ = δ₂(x)` vanishes.
#[derive(Clone, Debug)]
pub struct ChiPrimeData {
    pub n: usize,
    pub terms: Vec<KappaTerm>,
    /// `unit ⊗ chain` summands, grouped by unit.
    pub u31: BTreeMap<UnitVector, BarChain<TorusElement>>,
    /// `t₂″` as an element of `P_1`.
    pub t2: SparseVec,
    pub certificate: bool,
}

impl ChiPrimeData {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "x": self.terms.iter().map(KappaTerm::to_json).collect::<Vec<_>>(),
            "u31": self.u31.iter().map(|(u, c)| json!({"unit": u.to_element().to_string(), "chain": c.to_json()})).collect::<Vec<_>>(),
            "t2_vanishes": self.certificate,
        })
    }
}

/// Split an element of `P_2` into `k · a ⊗ b ⊗ {c...}` terms over basis units.
pub fn decompose_p2(complex: &TruncatedBnComplex, x: &SparseVec) -> Result<Vec<KappaTerm>> {
    let n = complex.spec().n;
    let k = complex.k_group(n - 2);
    let basis = complex.spec().support.unit_basis();
    let mut terms = Vec::new();
    for (&idx, coef) in x {
        let (t, g) = complex.generator_label(2, idx);
        let lift = k.lift(&SparseVec::from([(g, BigInt::one())]))?;
        for (lc, sym) in lift.terms() {
            terms.push(KappaTerm {
                coefficient: coef * lc,
                a: basis[t[0]].clone(),
                b: basis[t[1]].clone(),
                c: sym.entries().to_vec(),
            });
        }
    }
    Ok(terms)
}

/// Builds `u₃₁` for `x ∈ ker δ₂` and certifies that `t₂″ = Σ (b ⊗ {a, c} + a ⊗ {b, c})` is zero.
pub fn chi_prime_data(complex: &TruncatedBnComplex, x: &SparseVec) -> Result<ChiPrimeData> {
    let n = complex.spec().n;
    if n < 3 {
        return Err(Error::invalid("n must be at least 3"));
    }
    let caps = complex.caps();
    let terms = decompose_p2(complex, x)?;
    check_terms(n, &terms, caps)?;
    let field = complex.spec().field();
    let k_next = complex.k_group(n - 1);

    let mut t2 = SparseVec::new();
    for t in &terms {
        for (outer, inner) in [(&t.b, &t.a), (&t.a, &t.b)] {
            let mut entries = vec![inner.clone()];
            entries.extend(t.c.iter().cloned());
            let sym = k_next.element_of(&MilnorExpression::symbol(MilnorSymbol::new(field, entries)?), caps)?;
            axpy(&mut t2, &t.coefficient, &complex.tensor_element(std::slice::from_ref(outer), &sym)?);
        }
    }
    let t2 = complex.position(1)?.reduce(&t2);
    if t2 != complex.delta(2, x)? {
        return Err(Error::invariant("t2'' disagrees with δ_2"));
    }
    if !t2.is_empty() {
        return Err(Error::invalid("x is not in the kernel of δ_2"));
    }

    let scale = sign_power(n - 2) / factorial(n - 2);
    let mut u31: BTreeMap<UnitVector, BarChain<TorusElement>> = BTreeMap::new();
    for t in &terms {
        let cs = t.c.iter().enumerate().map(|(i, c)| a_torus(i + 1, n - 2, c)).collect::<Result<Vec<_>>>()?;
        for (outer, inner) in [(&t.b, &t.a), (&t.a, &t.b)] {
            let mut gs = vec![TorusElement::scalar(inner, n - 2)];
            gs.extend(cs.iter().cloned());
            let k = &scale * BigRational::from_integer(t.coefficient.clone());
            let entry = u31.entry(outer.clone()).or_insert_with(|| BarChain::zero(n - 1));
            *entry = entry.add_scaled(&c_cycle(&gs)?, &k)?;
        }
    }
    u31.retain(|_, c| !c.is_zero());
    Ok(ChiPrimeData { n, terms, u31, t2, certificate: true })
}
