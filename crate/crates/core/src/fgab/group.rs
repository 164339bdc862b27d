use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::linalg::{lattice_basis, IntSolver};
use super::matrix::{IntMatrix, SparseVec};
use super::snf::{smith_diagonal, smith_normal_form_with_inverses};
use crate::error::{Error, Result};

/// Invariant factors `d_1 | d_2 | ... ` (each at least 2) plus free rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Invariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl Invariants {
    pub fn trivial() -> Self {
        Invariants { torsion: vec![], free_rank: 0 }
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    /// Number of cyclic summands in the canonical decomposition.
    pub fn num_summands(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Invariants after tensoring with `Z[1/m]`: primes dividing `m` are removed.
    pub fn localize_away(&self, m: &BigInt) -> Invariants {
        let torsion = self
            .torsion
            .iter()
            .map(|d| {
                let mut d = d.clone();
                loop {
                    let g = d.gcd(m);
                    if g.is_one() {
                        break d;
                    }
                    d /= g;
                }
            })
            .filter(|d| !d.is_one())
            .collect();
        Invariants { torsion, free_rank: self.free_rank }
    }

    /// Human readable form such as `Z/2 + Z/12 + Z^3`.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// Invariants of a direct sum of cyclic groups of the given orders (0 = infinite).
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Invariants {
        let free_rank = orders.iter().filter(|d| d.is_zero()).count();
        let mut distinct: BTreeMap<BigInt, usize> = BTreeMap::new();
        for d in orders.iter().filter(|d| !d.is_zero()).map(|d| d.abs()) {
            if !d.is_one() {
                *distinct.entry(d).or_default() += 1;
            }
        }
        let base = coprime_base(distinct.keys().cloned().collect());
        // For each base element, the list of exponents occurring (with multiplicity).
        let mut powers: Vec<Vec<u32>> = vec![vec![]; base.len()];
        for (d, mult) in &distinct {
            let mut rest = d.clone();
            for (bi, b) in base.iter().enumerate() {
                let mut e = 0u32;
                while rest.is_multiple_of(b) {
                    rest /= b;
                    e += 1;
                }
                if e > 0 {
                    powers[bi].extend(std::iter::repeat_n(e, *mult));
                }
            }
            debug_assert!(rest.is_one());
        }
        for p in powers.iter_mut() {
            p.sort_unstable_by(|a, b| b.cmp(a));
        }
        let len = powers.iter().map(|p| p.len()).max().unwrap_or(0);
        let mut torsion: Vec<BigInt> = (0..len)
            .map(|k| {
                base.iter()
                    .zip(&powers)
                    .filter_map(|(b, p)| p.get(k).map(|&e| num_traits::pow(b.clone(), e as usize)))
                    .product()
            })
            .collect();
        torsion.reverse();
        Invariants { torsion, free_rank }
    }
}

/// Pairwise coprime set of integers > 1 whose multiplicative span contains every input.
fn coprime_base(mut items: Vec<BigInt>) -> Vec<BigInt> {
    items.retain(|x| !x.is_one());
    loop {
        let mut changed = false;
        'outer: for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                let g = items[i].gcd(&items[j]);
                if !g.is_one() {
                    let a = &items[i] / &g;
                    let b = &items[j] / &g;
                    let mut next: Vec<BigInt> = items
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i && k != j)
                        .map(|(_, x)| x.clone())
                        .collect();
                    next.extend([g, a, b].into_iter().filter(|x| !x.is_one()));
                    next.sort();
                    next.dedup();
                    items = next;
                    changed = true;
                    break 'outer;
                }
            }
        }
        if !changed {
            items.sort();
            return items;
        }
    }
}

/// A finitely generated abelian group `Z^generators / (column span of relations)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FgAbGroup {
    generators: usize,
    relations: IntMatrix,
    /// Cyclic orders per generator when the relations are diagonal (0 = free).
    orders: Option<Vec<BigInt>>,
    #[serde(skip)]
    invariants: OnceLock<Invariants>,
    #[serde(skip)]
    solver: OnceLock<Arc<IntSolver>>,
}

impl PartialEq for FgAbGroup {
    /// Isomorphism: equal invariant factors and free rank.
    fn eq(&self, other: &Self) -> bool {
        self.invariants() == other.invariants()
    }
}

impl FgAbGroup {
    pub fn new(generators: usize, relations: IntMatrix) -> Self {
        assert_eq!(relations.rows(), generators, "relation matrix must have one row per generator");
        let orders = detect_diagonal(generators, &relations);
        FgAbGroup { generators, relations, orders, invariants: OnceLock::new(), solver: OnceLock::new() }
    }

    /// `Z/d_1 + ... + Z/d_k`, with `0` standing for a free summand.
    pub fn cyclic_sum(orders: Vec<BigInt>) -> Self {
        let n = orders.len();
        let cols = orders
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero())
            .map(|(i, d)| SparseVec::from([(i, d.abs())]))
            .collect();
        let orders = orders.into_iter().map(|d| d.abs()).collect();
        FgAbGroup {
            generators: n,
            relations: IntMatrix::from_columns(n, cols),
            orders: Some(orders),
            invariants: OnceLock::new(),
            solver: OnceLock::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        Self::cyclic_sum(vec![BigInt::zero(); rank])
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn cyclic(order: impl Into<BigInt>) -> Self {
        Self::cyclic_sum(vec![order.into()])
    }

    pub fn generators(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    /// Per-generator orders when the presentation is diagonal.
    pub fn orders(&self) -> Option<&[BigInt]> {
        self.orders.as_deref()
    }

    pub fn invariants(&self) -> &Invariants {
        self.invariants.get_or_init(|| match &self.orders {
            Some(o) => Invariants::from_cyclic_orders(o),
            None => {
                let diag = smith_diagonal(&self.relations);
                let free_rank = self.generators - diag.len();
                let torsion = diag.into_iter().filter(|d| !d.is_one()).collect();
                Invariants { torsion, free_rank }
            }
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.invariants().is_trivial()
    }

    fn solver(&self) -> &IntSolver {
        self.solver.get_or_init(|| Arc::new(IntSolver::new(&self.relations)))
    }

    /// Canonical representative for diagonal presentations (coordinates reduced into
    /// `[0, d)`); other presentations are returned unchanged.
    pub fn reduce(&self, x: &SparseVec) -> SparseVec {
        match &self.orders {
            Some(o) => x
                .iter()
                .filter_map(|(&i, v)| {
                    let d = &o[i];
                    let r = if d.is_zero() { v.clone() } else { v.mod_floor(d) };
                    (!r.is_zero()).then_some((i, r))
                })
                .collect(),
            None => x.clone(),
        }
    }

    pub fn is_zero(&self, x: &SparseVec) -> bool {
        match &self.orders {
            Some(_) => self.reduce(x).is_empty(),
            None => x.is_empty() || self.solver().contains(x),
        }
    }

    pub fn elements_equal(&self, x: &SparseVec, y: &SparseVec) -> bool {
        let mut diff = x.clone();
        super::matrix::axpy(&mut diff, &-BigInt::one(), y);
        self.is_zero(&diff)
    }
}

fn detect_diagonal(generators: usize, relations: &IntMatrix) -> Option<Vec<BigInt>> {
    let mut orders = vec![BigInt::zero(); generators];
    for col in relations.columns() {
        if col.len() != 1 {
            if col.is_empty() {
                continue;
            }
            return None;
        }
        let (&i, v) = col.iter().next().unwrap();
        if !orders[i].is_zero() {
            orders[i] = orders[i].gcd(v);
        } else {
            orders[i] = v.abs();
        }
    }
    Some(orders)
}

/// A homomorphism given by its matrix on generators (column `j` is the image of generator `j`).
#[derive(Clone, Debug)]
pub struct GroupMorphism {
    source: Arc<FgAbGroup>,
    target: Arc<FgAbGroup>,
    matrix: IntMatrix,
}

impl GroupMorphism {
    /// Checks that every relator of the source maps into the relation lattice of the target.
    pub fn new(source: Arc<FgAbGroup>, target: Arc<FgAbGroup>, matrix: IntMatrix) -> Result<Self> {
        let f = Self::new_unchecked(source, target, matrix)?;
        for (k, rel) in f.source.relations().columns().enumerate() {
            let img = f.matrix.apply(rel);
            if !f.target.is_zero(&img) {
                return Err(Error::invariant(format!("relator {k} of the source does not map to zero")));
            }
        }
        Ok(f)
    }

    /// Only checks dimensions.
    pub fn new_unchecked(source: Arc<FgAbGroup>, target: Arc<FgAbGroup>, matrix: IntMatrix) -> Result<Self> {
        if matrix.cols() != source.generators() || matrix.rows() != target.generators() {
            return Err(Error::invalid(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.generators(),
                source.generators()
            )));
        }
        Ok(GroupMorphism { source, target, matrix })
    }

    pub fn zero(source: Arc<FgAbGroup>, target: Arc<FgAbGroup>) -> Self {
        let matrix = IntMatrix::zeros(target.generators(), source.generators());
        GroupMorphism { source, target, matrix }
    }

    pub fn identity(group: Arc<FgAbGroup>) -> Self {
        let matrix = IntMatrix::identity(group.generators());
        GroupMorphism { source: group.clone(), target: group, matrix }
    }

    pub fn source(&self) -> &Arc<FgAbGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FgAbGroup> {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &SparseVec) -> SparseVec {
        self.target.reduce(&self.matrix.apply(x))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupMorphism) -> Result<GroupMorphism> {
        if self.target.generators() != other.source.generators() {
            return Err(Error::invalid("composable morphisms need matching middle group"));
        }
        Ok(GroupMorphism {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: other.matrix.mul(&self.matrix),
        })
    }

    /// True if every generator maps to zero in the target.
    pub fn is_zero(&self) -> bool {
        self.matrix.columns().all(|c| self.target.is_zero(c))
    }

    /// `[F | R_target]`, whose integer kernel describes preimages of zero.
    fn augmented(&self) -> IntMatrix {
        self.matrix.hstack(self.target.relations())
    }

    /// Kernel with its inclusion into the source.
    pub fn kernel(&self) -> Subgroup {
        let n = self.source.generators();
        let cycles = kernel_lattice(self);
        let solver = IntSolver::new(&cycles);
        let rels: Vec<SparseVec> = self
            .source
            .relations()
            .columns()
            .map(|r| solver.solve(r).expect("relators of a well-defined map lie in its kernel"))
            .collect();
        let k = cycles.cols();
        let group = Arc::new(FgAbGroup::new(k, IntMatrix::from_columns(k, rels)));
        let inclusion = GroupMorphism { source: group.clone(), target: self.source.clone(), matrix: cycles };
        debug_assert_eq!(inclusion.target.generators(), n);
        Subgroup { group, inclusion }
    }

    /// Image, presented as the source modulo the kernel lattice, with its inclusion into the target.
    pub fn image(&self) -> Subgroup {
        let cycles = kernel_lattice(self);
        let group = Arc::new(FgAbGroup::new(self.source.generators(), cycles));
        let inclusion =
            GroupMorphism { source: group.clone(), target: self.target.clone(), matrix: self.matrix.clone() };
        Subgroup { group, inclusion }
    }

    /// A preimage of `y` if `y` lies in the image.
    pub fn element_in_image(&self, y: &SparseVec) -> Option<SparseVec> {
        ImageSolver::new(self).preimage(y)
    }
}

/// Repeated membership queries against the image of one morphism.
pub struct ImageSolver {
    n: usize,
    solver: IntSolver,
}

impl ImageSolver {
    pub fn new(f: &GroupMorphism) -> Self {
        ImageSolver { n: f.source.generators(), solver: IntSolver::new(&f.augmented()) }
    }

    pub fn preimage(&self, y: &SparseVec) -> Option<SparseVec> {
        self.solver.solve(y).map(|z| z.range(..self.n).map(|(&i, v)| (i, v.clone())).collect())
    }
}

/// Basis of `{x : F x ∈ relation lattice of the target}`.
fn kernel_lattice(f: &GroupMorphism) -> IntMatrix {
    let n = f.source.generators();
    let kb = IntSolver::new(&f.augmented()).kernel_basis();
    lattice_basis(&kb.truncate_rows(n))
}

#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: Arc<FgAbGroup>,
    pub inclusion: GroupMorphism,
}

/// Bilinear structure map `A x B -> A ⊗ B` on generator coordinates.
#[derive(Clone, Debug)]
pub struct TensorMap {
    pub left: usize,
    pub right: usize,
}

impl TensorMap {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.right + j
    }

    pub fn eval(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&i, a) in x {
            for (&j, b) in y {
                out.insert(self.index(i, j), a * b);
            }
        }
        out
    }
}

/// `A ⊗ B` with generators the pairs of generators, ordered lexicographically.
pub fn tensor(a: &FgAbGroup, b: &FgAbGroup) -> (FgAbGroup, TensorMap) {
    let map = TensorMap { left: a.generators(), right: b.generators() };
    if let (Some(oa), Some(ob)) = (a.orders(), b.orders()) {
        let orders = oa.iter().flat_map(|x| ob.iter().map(move |y| x.gcd(y))).collect();
        return (FgAbGroup::cyclic_sum(orders), map);
    }
    let n = a.generators() * b.generators();
    let mut cols = Vec::new();
    for r in a.relations().columns() {
        for j in 0..b.generators() {
            cols.push(r.iter().map(|(&i, v)| (map.index(i, j), v.clone())).collect());
        }
    }
    for i in 0..a.generators() {
        for s in b.relations().columns() {
            cols.push(s.iter().map(|(&j, v)| (map.index(i, j), v.clone())).collect());
        }
    }
    (FgAbGroup::new(n, IntMatrix::from_columns(n, cols)), map)
}

/// Index of `e_i ∧ e_j` (`i < j`) among the generators of the exterior square.
pub fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// `x ∧ y` in the generator coordinates of `exterior_square`.
pub fn wedge(n: usize, x: &SparseVec, y: &SparseVec) -> SparseVec {
    let mut out = SparseVec::new();
    for (&i, a) in x {
        for (&j, b) in y {
            if i == j {
                continue;
            }
            let (lo, hi, sign) = if i < j { (i, j, 1) } else { (j, i, -1) };
            let e = out.entry(wedge_index(n, lo, hi)).or_insert_with(BigInt::zero);
            *e += a * b * sign;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// `Λ²A` presented on `e_i ∧ e_j` (`i < j`) with relators `r ∧ e_j`.
pub fn exterior_square(a: &FgAbGroup) -> FgAbGroup {
    let n = a.generators();
    let m = n * n.saturating_sub(1) / 2;
    let mut cols = Vec::new();
    for r in a.relations().columns() {
        for j in 0..n {
            let c = wedge(n, r, &SparseVec::from([(j, BigInt::one())]));
            if !c.is_empty() {
                cols.push(c);
            }
        }
    }
    FgAbGroup::new(m, IntMatrix::from_columns(m, cols))
}

/// `ker(out) / im(into)` with explicit cycle representatives.
#[derive(Clone, Debug)]
pub struct Homology {
    ambient: usize,
    cycles: IntMatrix,
    cycle_solver: Arc<IntSolver>,
    /// `U` of the Smith form of the boundary coordinates.
    class_transform: IntMatrix,
    class_transform_inv: IntMatrix,
    /// Diagonal of that Smith form extended by zeros to the cycle rank.
    orders: Vec<BigInt>,
    group: Arc<FgAbGroup>,
}

impl Homology {
    /// Homology at the middle of `into: A -> B`, `out: B -> C`.
    pub fn compute(into: &GroupMorphism, out: &GroupMorphism) -> Result<Homology> {
        let middle = out.source();
        if into.target().generators() != middle.generators() {
            return Err(Error::invalid("morphisms do not meet at a common group"));
        }
        let n = middle.generators();
        let cycles = kernel_lattice(out);
        let k = cycles.cols();
        let cycle_solver = Arc::new(IntSolver::new(&cycles));
        let mut boundary_cols = Vec::new();
        for col in into.matrix().columns().chain(middle.relations().columns()) {
            match cycle_solver.solve(col) {
                Some(y) => boundary_cols.push(y),
                None => return Err(Error::invariant("boundary is not a cycle (composite of differentials is nonzero)")),
            }
        }
        let c = IntMatrix::from_columns(k, boundary_cols);
        let s = smith_normal_form_with_inverses(&c);
        let mut orders = s.diagonal();
        orders.resize(k, BigInt::zero());
        let group = Arc::new(FgAbGroup::new(k, c));
        Ok(Homology {
            ambient: n,
            cycles,
            cycle_solver,
            class_transform: s.u,
            class_transform_inv: s.u_inv.expect("inverse requested"),
            orders,
            group,
        })
    }

    pub fn invariants(&self) -> &Invariants {
        self.group.invariants()
    }

    /// The homology as `Z^k / boundaries`, `k` the cycle rank.
    pub fn group(&self) -> &Arc<FgAbGroup> {
        &self.group
    }

    /// Basis of the cycle lattice (columns in the ambient coordinates).
    pub fn cycle_basis(&self) -> &IntMatrix {
        &self.cycles
    }

    /// Orders of the nontrivial cyclic factors, in canonical order (0 = free).
    pub fn factor_orders(&self) -> Vec<BigInt> {
        self.orders.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    fn nontrivial_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.orders.iter().enumerate().filter(|(_, d)| !d.is_one()).map(|(i, _)| i)
    }

    /// Coordinates of the class of `z` along the canonical cyclic factors, or `None`
    /// when `z` is not a cycle.
    pub fn class_of(&self, z: &SparseVec) -> Option<Vec<BigInt>> {
        let y = self.cycle_solver.solve(z)?;
        let u = self.class_transform.apply(&y);
        Some(
            self.nontrivial_indices()
                .map(|i| {
                    let c = u.get(&i).cloned().unwrap_or_default();
                    let d = &self.orders[i];
                    if d.is_zero() { c } else { c.mod_floor(d) }
                })
                .collect(),
        )
    }

    pub fn is_boundary(&self, z: &SparseVec) -> Option<bool> {
        self.class_of(z).map(|c| c.iter().all(|x| x.is_zero()))
    }

    /// A cycle representing the generator of each nontrivial cyclic factor.
    pub fn generator_cycles(&self) -> Vec<SparseVec> {
        self.nontrivial_indices()
            .map(|i| self.cycles.apply(self.class_transform_inv.column(i)))
            .collect()
    }

    pub fn ambient_generators(&self) -> usize {
        self.ambient
    }
}

/// A chain complex of finitely generated abelian groups, indexed from position 0 upward.
#[derive(Clone, Debug)]
pub struct FgChainComplex {
    positions: Vec<Arc<FgAbGroup>>,
    /// `differentials[i - 1]` maps position `i` to position `i - 1`.
    differentials: Vec<GroupMorphism>,
}

impl FgChainComplex {
    /// Checks shapes and that consecutive differentials compose to zero.
    pub fn new(positions: Vec<Arc<FgAbGroup>>, differentials: Vec<GroupMorphism>) -> Result<Self> {
        if positions.is_empty() || differentials.len() + 1 != positions.len() {
            return Err(Error::invalid("need one differential between each pair of positions"));
        }
        for (i, d) in differentials.iter().enumerate() {
            if d.source().generators() != positions[i + 1].generators()
                || d.target().generators() != positions[i].generators()
            {
                return Err(Error::invalid(format!("differential {} has the wrong shape", i + 1)));
            }
        }
        let c = FgChainComplex { positions, differentials };
        if let Some(i) = c.first_nonzero_composite() {
            return Err(Error::invariant(format!("d_{} ∘ d_{} is not zero", i, i + 1)));
        }
        Ok(c)
    }

    /// Smallest `i` with `d_i ∘ d_{i+1} != 0`, if any.
    pub fn first_nonzero_composite(&self) -> Option<usize> {
        (1..self.differentials.len()).find(|&i| {
            let comp = self.differentials[i].then(&self.differentials[i - 1]).expect("shapes checked");
            !comp.is_zero()
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn position(&self, i: usize) -> &Arc<FgAbGroup> {
        &self.positions[i]
    }

    pub fn differential(&self, i: usize) -> &GroupMorphism {
        &self.differentials[i - 1]
    }

    /// Map into position `i` (zero map from the trivial group past the top).
    fn incoming(&self, i: usize) -> GroupMorphism {
        if i + 1 < self.positions.len() {
            self.differentials[i].clone()
        } else {
            GroupMorphism::zero(Arc::new(FgAbGroup::trivial()), self.positions[i].clone())
        }
    }

    fn outgoing(&self, i: usize) -> GroupMorphism {
        if i == 0 {
            GroupMorphism::zero(self.positions[0].clone(), Arc::new(FgAbGroup::trivial()))
        } else {
            self.differentials[i - 1].clone()
        }
    }

    pub fn homology_at(&self, i: usize) -> Result<Homology> {
        if i >= self.positions.len() {
            return Err(Error::invalid(format!("position {i} out of range")));
        }
        Homology::compute(&self.incoming(i), &self.outgoing(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn sv(x: &[(usize, i64)]) -> SparseVec {
        x.iter().map(|&(i, v)| (i, big(v))).collect()
    }

    fn inv(torsion: &[i64], free: usize) -> Invariants {
        Invariants { torsion: torsion.iter().map(|&d| big(d)).collect(), free_rank: free }
    }

    fn z() -> Arc<FgAbGroup> {
        Arc::new(FgAbGroup::free(1))
    }

    fn scalar(k: i64) -> IntMatrix {
        IntMatrix::from_dense(&[vec![k]])
    }

    #[test]
    fn cyclic_orders_combine_by_primes() {
        let got = Invariants::from_cyclic_orders(&[big(2), big(3), big(4), big(0), big(1), big(6)]);
        assert_eq!(got, inv(&[2, 6, 12], 1));
        let general = FgAbGroup::new(3, IntMatrix::from_dense(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 4]]));
        assert_eq!(general.invariants(), &inv(&[2, 12], 0));
    }

    #[test]
    fn identity_complex_is_exact() {
        let id = GroupMorphism::new(z(), z(), IntMatrix::identity(1)).unwrap();
        let c = FgChainComplex::new(vec![z(), z()], vec![id]).unwrap();
        assert!(c.homology_at(0).unwrap().invariants().is_trivial());
        assert!(c.homology_at(1).unwrap().invariants().is_trivial());
    }

    #[test]
    fn multiplication_by_two_gives_z2() {
        let two = GroupMorphism::new(z(), z(), scalar(2)).unwrap();
        let c = FgChainComplex::new(vec![z(), z()], vec![two]).unwrap();
        assert_eq!(c.homology_at(0).unwrap().invariants(), &inv(&[2], 0));
        assert!(c.homology_at(1).unwrap().invariants().is_trivial());
    }

    #[test]
    fn zero_differentials_return_positions() {
        let a = Arc::new(FgAbGroup::cyclic_sum(vec![big(2), big(0)]));
        let b = Arc::new(FgAbGroup::cyclic(6));
        let d = GroupMorphism::zero(a.clone(), b.clone());
        let c = FgChainComplex::new(vec![b.clone(), a.clone()], vec![d]).unwrap();
        assert_eq!(c.homology_at(1).unwrap().invariants(), a.invariants());
        assert_eq!(c.homology_at(0).unwrap().invariants(), b.invariants());
    }

    #[test]
    fn rejects_nonzero_composite() {
        let id = GroupMorphism::new(z(), z(), IntMatrix::identity(1)).unwrap();
        let err = FgChainComplex::new(vec![z(), z(), z()], vec![id.clone(), id]).unwrap_err();
        assert!(matches!(err, Error::Invariant(_)));
    }

    #[test]
    fn rejects_ill_defined_morphism() {
        let z2 = Arc::new(FgAbGroup::cyclic(2));
        assert!(GroupMorphism::new(z2.clone(), z(), scalar(1)).is_err());
        assert!(GroupMorphism::new(z(), z2, scalar(1)).is_ok());
    }

    #[test]
    fn tensor_examples() {
        let z2 = FgAbGroup::cyclic(2);
        let z3 = FgAbGroup::cyclic(3);
        assert!(tensor(&z2, &z3).0.is_trivial());
        assert_eq!(tensor(&z2, &z2).0.invariants(), &inv(&[2], 0));
        let a = FgAbGroup::cyclic_sum(vec![big(4), big(0)]);
        assert_eq!(tensor(&a, &FgAbGroup::free(1)).0, a);
        // general path agrees with the diagonal shortcut
        let g = FgAbGroup::new(1, IntMatrix::from_dense(&[vec![2, 4]]));
        assert!(g.orders().is_some());
        let h = FgAbGroup::new(2, IntMatrix::from_dense(&[vec![2], vec![2]]));
        assert!(h.orders().is_none());
        assert_eq!(tensor(&h, &z2).0.invariants(), &inv(&[2, 2], 0));
    }

    #[test]
    fn exterior_square_examples() {
        assert_eq!(exterior_square(&FgAbGroup::free(2)).invariants(), &inv(&[], 1));
        assert!(exterior_square(&FgAbGroup::cyclic(2)).is_trivial());
        assert_eq!(exterior_square(&FgAbGroup::free(3)).invariants(), &inv(&[], 3));
        let a = FgAbGroup::cyclic_sum(vec![big(2), big(4), big(0)]);
        // Z/2∧Z/4 = Z/2, Z/2∧Z = Z/2, Z/4∧Z = Z/4
        assert_eq!(exterior_square(&a).invariants(), &inv(&[2, 2, 4], 0));
    }

    #[test]
    fn kernel_image_membership() {
        let two = GroupMorphism::new(z(), z(), scalar(2)).unwrap();
        assert!(two.kernel().group.is_trivial());
        assert_eq!(two.image().group.invariants(), &inv(&[], 1));
        assert_eq!(two.element_in_image(&sv(&[(0, 3)])), None);
        assert_eq!(two.element_in_image(&sv(&[(0, 6)])), Some(sv(&[(0, 3)])));

        let zero = GroupMorphism::zero(z(), z());
        assert_eq!(zero.kernel().group.invariants(), &inv(&[], 1));
        assert!(zero.image().group.is_trivial());

        let proj = GroupMorphism::new(Arc::new(FgAbGroup::free(2)), z(), IntMatrix::from_dense(&[vec![1, 0]])).unwrap();
        let k = proj.kernel();
        assert_eq!(k.group.invariants(), &inv(&[], 1));
        assert!(k.inclusion.then(&proj).unwrap().is_zero());
    }

    #[test]
    fn homology_classes_and_generators() {
        // 0 -> Z --x4--> Z -> 0 at position 0: Z/4 generated by the class of 1
        let four = GroupMorphism::new(z(), z(), scalar(4)).unwrap();
        let out = GroupMorphism::zero(z(), Arc::new(FgAbGroup::trivial()));
        let h = Homology::compute(&four, &out).unwrap();
        assert_eq!(h.factor_orders(), vec![big(4)]);
        let g = h.generator_cycles();
        assert_eq!(g.len(), 1);
        let c1 = h.class_of(&g[0]).unwrap();
        assert_eq!(c1, vec![big(1)]);
        assert_eq!(h.is_boundary(&sv(&[(0, 8)])), Some(true));
        assert_eq!(h.is_boundary(&sv(&[(0, 2)])), Some(false));
    }

    #[test]
    fn localization_drops_primes() {
        assert_eq!(inv(&[2, 6, 12], 1).localize_away(&big(2)), inv(&[3, 3], 1));
        assert_eq!(inv(&[2, 4], 0).localize_away(&big(2)), inv(&[], 0));
    }
}
