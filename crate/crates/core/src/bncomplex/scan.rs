use std::sync::Arc;

use num_bigint::BigInt;
use serde_json::{json, Value};

use super::{b_n, low_range, BnComplexSpec, TruncatedBnComplex};
use crate::error::{Error, Result};
use crate::fgab::{axpy, invariants_to_json, matrix_to_json, FgAbGroup, GroupMorphism, Homology, IntMatrix, Invariants, SparseVec};
use crate::fields::Support;
use crate::milnor::KGroupProvider;

/// One support in a scan.
#[derive(Clone, Debug)]
pub struct ScanLevel {
    pub support: Support,
    pub invariants: Invariants,
    /// Orders of the canonical cyclic factors the induced maps are written against.
    pub factor_orders: Vec<BigInt>,
}

/// The map on truncated `B_n` induced by enlarging the support.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub from: usize,
    pub to: usize,
    /// Column `j` is the class of the image of factor `j`.
    pub matrix: IntMatrix,
    pub image: Invariants,
    pub kernel: Invariants,
    /// Factors of the source whose generator maps to zero.
    pub dying: Vec<usize>,
}

impl InducedMap {
    pub fn to_json(&self) -> Value {
        json!({
            "from": self.from,
            "to": self.to,
            "matrix": matrix_to_json(&self.matrix),
            "image": invariants_to_json(&self.image),
            "image_rank": self.image.num_summands(),
            "kernel": invariants_to_json(&self.kernel),
            "dying_generators": self.dying,
        })
    }
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub n: usize,
    pub levels: Vec<ScanLevel>,
    /// Maps between consecutive levels.
    pub steps: Vec<InducedMap>,
    /// Maps from each level into the last one.
    pub stable: Vec<InducedMap>,
}

impl ScanReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "truncated": true,
            "levels": self.levels.iter().map(|l| json!({
                "support": l.support.to_string(),
                "invariant_factors_H2": invariants_to_json(&l.invariants),
            })).collect::<Vec<_>>(),
            "induced_maps": self.steps.iter().map(InducedMap::to_json).collect::<Vec<_>>(),
            "stable_images": self.stable.iter().map(InducedMap::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Position of each source basis unit in the target basis.
fn basis_inclusion(small: &Support, big: &Support) -> Vec<usize> {
    let big_places: Vec<_> = big.finite_places().collect();
    let mut out = vec![0];
    out.extend(small.finite_places().map(|p| 1 + big_places.iter().position(|q| *q == p).expect("nested supports")));
    out
}

/// Image of an element of `P_2` under the inclusion of supports.
fn include_p2(src: &TruncatedBnComplex, dst: &TruncatedBnComplex, z: &SparseVec) -> Result<SparseVec> {
    let iota = basis_inclusion(&src.spec.support, &dst.spec.support);
    let n = src.spec.n;
    let k_src = src.k_group(n - 2);
    let k_dst = dst.k_group(n - 2);
    let b2 = dst.basis_size();
    let g2 = k_dst.group().generators();
    let mut out = SparseVec::new();
    for (&idx, c) in z {
        let (t, k) = src.generator_label(2, idx);
        let lift = k_src.lift(&SparseVec::from([(k, BigInt::from(1))]))?;
        let kx = k_dst.element_of(&lift, src.caps())?;
        let base = (iota[t[0]] * b2 + iota[t[1]]) * g2;
        let shifted: SparseVec = kx.into_iter().map(|(r, v)| (base + r, v)).collect();
        axpy(&mut out, c, &shifted);
    }
    Ok(dst.position(2)?.reduce(&out))
}

fn induced(
    from: usize,
    to: usize,
    src: &(TruncatedBnComplex, Homology),
    dst: &(TruncatedBnComplex, Homology),
) -> Result<InducedMap> {
    let source = Arc::new(FgAbGroup::cyclic_sum(src.1.factor_orders()));
    let target = Arc::new(FgAbGroup::cyclic_sum(dst.1.factor_orders()));
    let mut cols = Vec::new();
    for z in src.1.generator_cycles() {
        let img = include_p2(&src.0, &dst.0, &z)?;
        let class = dst.1.class_of(&img).ok_or_else(|| Error::invariant("included cycle is not a cycle"))?;
        cols.push(target.reduce(&class.into_iter().enumerate().filter(|(_, v)| v != &BigInt::from(0)).collect()));
    }
    let dying = cols.iter().enumerate().filter(|(_, c)| c.is_empty()).map(|(i, _)| i).collect();
    let matrix = IntMatrix::from_columns(target.generators(), cols);
    let f = GroupMorphism::new(source, target, matrix.clone())?;
    Ok(InducedMap {
        from,
        to,
        matrix,
        image: f.image().group.invariants().clone(),
        kernel: f.kernel().group.invariants().clone(),
        dying,
    })
}

/// Truncated `B_n` along a nested chain of supports with the induced maps.
pub fn stabilization_scan(n: usize, chain: &[Support], provider: &dyn KGroupProvider) -> Result<ScanReport> {
    if chain.is_empty() {
        return Err(Error::invalid("empty support chain"));
    }
    for w in chain.windows(2) {
        if !w[0].is_subset_of(&w[1]) {
            return Err(Error::invalid(format!("supports are not nested: {} then {}", w[0], w[1])));
        }
    }
    let caps = provider.caps();
    let mut built = Vec::new();
    for s in chain {
        let spec = BnComplexSpec::new(s.clone(), n, caps)?;
        let h = b_n(&spec, provider)?;
        let c = low_range(&spec, provider)?;
        built.push((c, h));
    }
    let levels = chain
        .iter()
        .zip(&built)
        .map(|(s, (_, h))| ScanLevel { support: s.clone(), invariants: h.invariants().clone(), factor_orders: h.factor_orders() })
        .collect();
    let (steps, stable) = if n < 3 {
        let trivial = |i, j| InducedMap {
            from: i,
            to: j,
            matrix: IntMatrix::zeros(0, 0),
            image: Invariants::trivial(),
            kernel: Invariants::trivial(),
            dying: Vec::new(),
        };
        let last = chain.len() - 1;
        ((1..chain.len()).map(|i| trivial(i - 1, i)).collect(), (0..chain.len()).map(|i| trivial(i, last)).collect())
    } else {
        let last = built.len() - 1;
        let steps = (1..built.len()).map(|i| induced(i - 1, i, &built[i - 1], &built[i])).collect::<Result<Vec<_>>>()?;
        let stable = (0..built.len()).map(|i| induced(i, last, &built[i], &built[last])).collect::<Result<Vec<_>>>()?;
        (steps, stable)
    };
    Ok(ScanReport { n, levels, steps, stable })
}
