//! The complex `U^{⊗n} ⊗ K_0 -> ... -> U ⊗ K_{n-1} -> K_n` at S-unit truncation,
//! its homology `B_n`, the section of `δ_1`, the θ map and stabilization scans.

mod scan;

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fgab::{axpy, invariants_to_json, FgAbGroup, FgChainComplex, GroupMorphism, Homology, IntMatrix, Invariants, SparseVec};
use crate::fields::{Field, Support, UnitVector};
use crate::milnor::{K3IndLabel, KGroupProvider, MemoryKGroups, MilnorExpression, MilnorSymbol, TruncatedKGroup};

pub use scan::{stabilization_scan, InducedMap, ScanLevel, ScanReport};

/// Which complex: field (via the support), `n` and the support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BnComplexSpec {
    pub support: Support,
    pub n: usize,
}

impl BnComplexSpec {
    pub fn new(support: Support, n: usize, caps: &Caps) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if n > caps.max_n {
            return Err(Error::CapExceeded(format!("n = {n} above cap {}", caps.max_n)));
        }
        let s = support.finite_places().count();
        if s > caps.max_support {
            return Err(Error::CapExceeded(format!("support has {s} places, cap is {}", caps.max_support)));
        }
        Ok(BnComplexSpec { support, n })
    }

    pub fn field(&self) -> Field {
        self.support.field()
    }

    pub fn to_json(&self) -> Value {
        json!({"field": self.field().tag(), "support": self.support.to_string(), "n": self.n, "truncated": true})
    }
}

/// Lexicographic index of a tuple of basis indices.
fn tuple_index(tuple: &[usize], b: usize) -> usize {
    tuple.iter().fold(0, |acc, &t| acc * b + t)
}

fn tuple_of_index(mut idx: usize, len: usize, b: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % b;
        idx /= b;
    }
    out
}

/// A contiguous range of positions of the truncated complex, fully materialized.
#[derive(Debug)]
pub struct TruncatedBnComplex {
    spec: BnComplexSpec,
    caps: Caps,
    /// `k_groups[m]` is the truncated `K_m` for `m` in `0..=n`.
    k_groups: Vec<Arc<TruncatedKGroup>>,
    lo: usize,
    complex: FgChainComplex,
    timings: Vec<(String, f64)>,
}

impl TruncatedBnComplex {
    /// Every position `0..=n`.
    pub fn build(spec: &BnComplexSpec, provider: &dyn KGroupProvider) -> Result<Self> {
        Self::build_range(spec, 0, spec.n, provider)
    }

    /// Positions `lo..=hi` (clamped to `n`) with the differentials between them.
    pub fn build_range(spec: &BnComplexSpec, lo: usize, hi: usize, provider: &dyn KGroupProvider) -> Result<Self> {
        let caps = provider.caps().clone();
        let hi = hi.min(spec.n);
        if lo > hi {
            return Err(Error::invalid("empty position range"));
        }
        let mut timings = Vec::new();
        let t = Instant::now();
        let k_groups =
            (0..=spec.n).map(|m| provider.k_group(&spec.support, m)).collect::<Result<Vec<_>>>()?;
        timings.push(("k_groups".into(), t.elapsed().as_secs_f64() * 1e3));

        let t = Instant::now();
        let b = k_groups[0].basis_size();
        let positions: Vec<Arc<FgAbGroup>> =
            (lo..=hi).map(|i| Arc::new(position_group(&spec.support, b, i, &k_groups[spec.n - i]))).collect();
        let mut differentials = Vec::new();
        for i in lo + 1..=hi {
            let m = delta_matrix(&k_groups, spec.n, i, b, &caps)?;
            let src = positions[i - lo].clone();
            let dst = positions[i - 1 - lo].clone();
            differentials.push(GroupMorphism::new(src, dst, m)?);
        }
        timings.push(("differentials".into(), t.elapsed().as_secs_f64() * 1e3));
        let t = Instant::now();
        let complex = FgChainComplex::new(positions, differentials)?;
        timings.push(("d_squared_check".into(), t.elapsed().as_secs_f64() * 1e3));
        Ok(TruncatedBnComplex { spec: spec.clone(), caps, k_groups, lo, complex, timings })
    }

    pub fn spec(&self) -> &BnComplexSpec {
        &self.spec
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    pub fn k_group(&self, m: usize) -> &Arc<TruncatedKGroup> {
        &self.k_groups[m]
    }

    /// Size of the S-unit basis.
    pub fn basis_size(&self) -> usize {
        self.k_groups[0].basis_size()
    }

    /// Materialized positions.
    pub fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.lo + self.complex.len() - 1
    }

    fn check_position(&self, i: usize) -> Result<()> {
        if !self.range().contains(&i) {
            return Err(Error::invalid(format!("position {i} is outside the built range {:?}", self.range())));
        }
        Ok(())
    }

    pub fn position(&self, i: usize) -> Result<&Arc<FgAbGroup>> {
        self.check_position(i)?;
        Ok(self.complex.position(i - self.lo))
    }

    /// `δ_i : P_i -> P_{i-1}`.
    pub fn differential(&self, i: usize) -> Result<&GroupMorphism> {
        if i == 0 || i > self.spec.n {
            return Err(Error::invalid(format!("δ_{i} is not defined for n = {}", self.spec.n)));
        }
        self.check_position(i)?;
        self.check_position(i - 1)?;
        Ok(self.complex.differential(i - self.lo))
    }

    pub fn delta(&self, i: usize, x: &SparseVec) -> Result<SparseVec> {
        Ok(self.differential(i)?.apply(x))
    }

    /// Generator count of `P_i`, built or not.
    pub fn position_dim(&self, i: usize) -> usize {
        self.basis_size().pow(i as u32) * self.k_groups[self.spec.n - i].group().generators()
    }

    /// Unit-basis tuple and K-generator of a generator of `P_i`.
    pub fn generator_label(&self, i: usize, idx: usize) -> (Vec<usize>, usize) {
        let g = self.k_groups[self.spec.n - i].group().generators();
        (tuple_of_index(idx / g, i, self.basis_size()), idx % g)
    }

    /// `u_1 ⊗ ... ⊗ u_i ⊗ x` in `P_i`, expanding each unit over the basis.
    pub fn tensor_element(&self, units: &[UnitVector], x: &SparseVec) -> Result<SparseVec> {
        let i = units.len();
        self.check_position(i)?;
        let b = self.basis_size();
        let g = self.k_groups[self.spec.n - i].group().generators();
        let mut partial: Vec<(usize, BigInt)> = vec![(0, BigInt::one())];
        for u in units {
            let e = self.spec.support.coordinates(u)?;
            let mut next = Vec::new();
            for (idx, c) in &partial {
                for (j, ej) in e.iter().enumerate() {
                    if !ej.is_zero() {
                        next.push((idx * b + j, c * ej));
                    }
                }
            }
            partial = next;
        }
        let mut out = SparseVec::new();
        for (idx, c) in partial {
            for (&k, v) in x {
                *out.entry(idx * g + k).or_default() += &c * v;
            }
        }
        Ok(self.position(i)?.reduce(&out))
    }

    pub fn homology_at(&self, i: usize) -> Result<Homology> {
        self.check_position(i)?;
        self.complex.homology_at(i - self.lo)
    }

    /// `a_1 ⊗ {a_2, ..., a_n}` for a symbol of S-units.
    pub fn section_symbol(&self, s: &MilnorSymbol) -> Result<SparseVec> {
        let n = self.spec.n;
        if n < 3 {
            return Err(Error::invalid("the section of δ_1 is only defined for n >= 3"));
        }
        if s.degree() != n {
            return Err(Error::invalid(format!("symbol has degree {}, expected {n}", s.degree())));
        }
        let rest = MilnorSymbol::new(s.field(), s.entries()[1..].to_vec())?;
        let x = self.k_groups[n - 1].element_of(&MilnorExpression::symbol(rest), &self.caps)?;
        self.tensor_element(&s.entries()[..1], &x)
    }

    /// The section of `δ_1` on an element of the truncated `K_n`, via basis-tuple lifts.
    pub fn section_delta1(&self, x: &SparseVec) -> Result<SparseVec> {
        if self.spec.n < 3 {
            return Err(Error::invalid("the section of δ_1 is only defined for n >= 3"));
        }
        let lift = self.k_groups[self.spec.n].lift(x)?;
        let mut out = SparseVec::new();
        for (k, s) in lift.terms() {
            axpy(&mut out, k, &self.section_symbol(s)?);
        }
        Ok(self.position(1)?.reduce(&out))
    }

    /// `θ(c ⊗ a∧b) = -a ⊗ {b, c} + b ⊗ {a, c}` in `P_1`, for `n = 3`.
    pub fn theta(&self, c: &UnitVector, a: &UnitVector, b: &UnitVector) -> Result<SparseVec> {
        if self.spec.n != 3 {
            return Err(Error::invalid("θ lands in the n = 3 complex"));
        }
        let k2 = &self.k_groups[2];
        let field = self.spec.field();
        let sym = |x: &UnitVector, y: &UnitVector| -> Result<SparseVec> {
            let s = MilnorSymbol::new(field, vec![x.clone(), y.clone()])?;
            k2.element_of(&MilnorExpression::symbol(s), &self.caps)
        };
        let mut out = self.tensor_element(std::slice::from_ref(b), &sym(a, c)?)?;
        axpy(&mut out, &-BigInt::one(), &self.tensor_element(std::slice::from_ref(a), &sym(b, c)?)?);
        Ok(self.position(1)?.reduce(&out))
    }

    pub fn timings(&self) -> &[(String, f64)] {
        &self.timings
    }
}

/// `U^{⊗i} ⊗ K`: generator `(tuple, k)` has order the gcd of the unit orders and the order of `k`.
fn position_group(support: &Support, b: usize, i: usize, k: &TruncatedKGroup) -> FgAbGroup {
    let unit_orders = support.unit_orders();
    let k_orders = k.group().orders().expect("truncated K-groups are diagonal");
    let count = b.pow(i as u32);
    let mut orders = Vec::with_capacity(count * k_orders.len());
    for idx in 0..count {
        let t = tuple_of_index(idx, i, b);
        let g = t.iter().fold(BigInt::zero(), |acc, &j| acc.gcd(&unit_orders[j]));
        orders.extend(k_orders.iter().map(|d| g.gcd(d)));
    }
    FgAbGroup::cyclic_sum(orders)
}

/// Matrix of `δ_i` on generators, no signs.
fn delta_matrix(k_groups: &[Arc<TruncatedKGroup>], n: usize, i: usize, b: usize, caps: &Caps) -> Result<IntMatrix> {
    let src_k = &k_groups[n - i];
    let dst_k = &k_groups[n - i + 1];
    let g = src_k.group().generators();
    let g2 = dst_k.group().generators();
    let mult: Vec<IntMatrix> = (0..b).map(|j| src_k.multiplication_matrix(j, dst_k, caps)).collect::<Result<_>>()?;
    let count = b.pow(i as u32);
    let mut cols = Vec::with_capacity(count * g);
    let mut rest = Vec::with_capacity(i);
    for idx in 0..count {
        let t = tuple_of_index(idx, i, b);
        for k in 0..g {
            let mut col = SparseVec::new();
            for j in 0..i {
                rest.clear();
                rest.extend(t[..j].iter().chain(&t[j + 1..]));
                let base = tuple_index(&rest, b) * g2;
                for (&r, v) in mult[t[j]].column(k) {
                    *col.entry(base + r).or_default() += v;
                }
            }
            col.retain(|_, v| !v.is_zero());
            cols.push(col);
        }
    }
    Ok(IntMatrix::from_columns(b.pow(i as u32 - 1) * g2, cols))
}

/// Result of checking `ker δ_1 = im δ_2`.
#[derive(Clone, Debug)]
pub struct H1Check {
    pub passed: bool,
    pub homology: Invariants,
    /// A cycle at position 1 that is not a boundary, when the check fails.
    pub witness: Option<SparseVec>,
}

/// Summary of one truncated complex.
#[derive(Clone, Debug)]
pub struct BnReport {
    pub spec: BnComplexSpec,
    pub position_dims: Vec<usize>,
    /// `None` for `n = 2`, which is `K_3^ind` and not computed.
    pub h2: Option<Invariants>,
    pub h1: Invariants,
    /// `(i, kernel of δ_i, image of δ_i)` for the built differentials.
    pub kernel_image: Vec<(usize, Invariants, Invariants)>,
    pub timings_ms: Vec<(String, f64)>,
}

impl BnReport {
    pub fn to_json(&self, with_timings: bool) -> Value {
        let timings = if with_timings {
            Value::Object(self.timings_ms.iter().map(|(k, v)| (k.clone(), json!(v))).collect())
        } else {
            Value::Null
        };
        json!({
            "spec": self.spec.to_json(),
            "position_dims": self.position_dims,
            "invariant_factors_H2": match &self.h2 {
                Some(h) => invariants_to_json(h),
                None => json!({"not_computed": K3IndLabel.to_string()}),
            },
            "invariant_factors_H1": invariants_to_json(&self.h1),
            "kernel_image": self.kernel_image.iter().map(|(i, k, im)| json!({
                "position": i,
                "kernel": invariants_to_json(k),
                "image": invariants_to_json(im),
            })).collect::<Vec<_>>(),
            "induced_maps": [],
            "timings_ms": timings,
        })
    }
}

/// Positions needed for homology at 1 and 2.
fn low_range(spec: &BnComplexSpec, provider: &dyn KGroupProvider) -> Result<TruncatedBnComplex> {
    TruncatedBnComplex::build_range(spec, 0, 3, provider)
}

/// `B_n` at truncation: trivial for `n = 1`, refused for `n = 2`, `ker δ_2 / im δ_3` otherwise.
pub fn b_n(spec: &BnComplexSpec, provider: &dyn KGroupProvider) -> Result<Homology> {
    match spec.n {
        1 => {
            let trivial = Arc::new(FgAbGroup::trivial());
            Homology::compute(&GroupMorphism::zero(trivial.clone(), trivial.clone()), &GroupMorphism::zero(trivial.clone(), trivial))
        }
        2 => Err(Error::NotComputable(format!("B_2(F) is {K3IndLabel}, which has no algorithm here"))),
        _ => low_range(spec, provider)?.homology_at(2),
    }
}

/// `B_n` with the process-wide default K-group memo.
pub fn b_n_default(spec: &BnComplexSpec, caps: &Caps) -> Result<Homology> {
    b_n(spec, &MemoryKGroups::new(caps.clone()))
}

/// Checks that homology at position 1 vanishes, returning a witness otherwise.
pub fn h1_check(spec: &BnComplexSpec, provider: &dyn KGroupProvider) -> Result<H1Check> {
    if spec.n < 3 {
        return Err(Error::invalid("h1 check needs n >= 3"));
    }
    let c = low_range(spec, provider)?;
    let h = c.homology_at(1)?;
    let witness = h.generator_cycles().into_iter().next();
    Ok(H1Check { passed: h.invariants().is_trivial(), homology: h.invariants().clone(), witness })
}

/// Report with homology at positions 1 and 2 and kernel/image data of the built differentials.
pub fn report(spec: &BnComplexSpec, provider: &dyn KGroupProvider) -> Result<BnReport> {
    let start = Instant::now();
    let c = low_range(spec, provider)?;
    let h2 = match spec.n {
        1 => Some(Invariants::trivial()),
        2 => None,
        _ => Some(c.homology_at(2)?.invariants().clone()),
    };
    let h1 = c.homology_at(1)?.invariants().clone();
    if spec.n >= 3 && !h1.is_trivial() {
        return Err(Error::invariant(format!("homology at position 1 is {} for n = {}", h1.describe(), spec.n)));
    }
    let mut kernel_image = Vec::new();
    for i in 1..=c.range().end().to_owned() {
        let d = c.differential(i)?;
        kernel_image.push((i, d.kernel().group.invariants().clone(), d.image().group.invariants().clone()));
    }
    let mut timings_ms = c.timings().to_vec();
    timings_ms.push(("total".into(), start.elapsed().as_secs_f64() * 1e3));
    Ok(BnReport {
        spec: spec.clone(),
        position_dims: (0..=spec.n).map(|i| c.position_dim(i)).collect(),
        h2,
        h1,
        kernel_image,
        timings_ms,
    })
}

#[cfg(test)]
mod tests;
