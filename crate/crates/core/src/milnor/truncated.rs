//! `K_m^M` restricted to symbols of S-units, as a finitely generated abelian group.
//!
//! Every basis tuple of S-units maps to a coordinate vector in a finite target
//! (plus `Z` summands in degrees 0 and 1). The group is the image lattice modulo
//! the target moduli, put into diagonal form. Only a greedy spanning set of tuples
//! is kept as lifts, so the generator count stays small even when the number of
//! tuples is `(|S|+1)^m`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{normal_form, symbol_normal_form, KNormalForm, MilnorExpression, MilnorSymbol, Residue};
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fgab::{lattice_basis, smith_normal_form_with_inverses, FgAbGroup, IntMatrix, IntSolver, SparseVec};
use crate::fields::{residue_field, Field, Place, Support, Torsion, UnitVector};

/// Everything needed to rebuild a [`TruncatedKGroup`]; this is what gets cached on disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KGroupData {
    pub support: Support,
    pub degree: usize,
    /// Moduli of the coordinate target (0 for a `Z` coordinate).
    pub moduli: Vec<BigInt>,
    /// Basis tuples whose coordinates span the image, in enumeration order.
    pub selected: Vec<Vec<usize>>,
    /// Basis of the image lattice in coordinate space (columns).
    pub lattice: IntMatrix,
    /// Lattice coordinates to reduced generators.
    pub to_reduced: IntMatrix,
    /// Orders of the reduced generators (0 = free), none equal to 1.
    pub orders: Vec<BigInt>,
    /// Coordinates of each reduced generator (columns).
    pub generator_coords: IntMatrix,
    /// Each reduced generator as a combination of basis tuples.
    pub generator_lifts: Vec<Vec<(Vec<usize>, BigInt)>>,
}

/// The subgroup of `K_m^M(F)` generated by symbols of S-units, in diagonal form.
#[derive(Debug)]
pub struct TruncatedKGroup {
    data: KGroupData,
    basis: Vec<UnitVector>,
    group: Arc<FgAbGroup>,
    lattice_solver: IntSolver,
}

impl TruncatedKGroup {
    /// Build from scratch.
    pub fn compute(support: &Support, degree: usize, caps: &Caps) -> Result<Self> {
        check_caps(support, degree, caps)?;
        let data = compute_data(support, degree, caps)?;
        Self::from_data(data)
    }

    /// Rebuild from cached data, validating shapes.
    pub fn from_data(data: KGroupData) -> Result<Self> {
        let r = data.moduli.len();
        let k = data.orders.len();
        let bad = |what: &str| Err(Error::invalid(format!("inconsistent K-group data: {what}")));
        if data.lattice.rows() != r || data.generator_coords.rows() != r || data.generator_coords.cols() != k {
            return bad("coordinate dimensions");
        }
        if data.to_reduced.rows() != k || data.to_reduced.cols() != data.lattice.cols() {
            return bad("reduction matrix");
        }
        if data.generator_lifts.len() != k || data.orders.iter().any(|d| d.is_one()) {
            return bad("generators");
        }
        let basis = data.support.unit_basis();
        let group = Arc::new(FgAbGroup::cyclic_sum(data.orders.clone()));
        let lattice_solver = IntSolver::new(&data.lattice);
        Ok(TruncatedKGroup { data, basis, group, lattice_solver })
    }

    pub fn data(&self) -> &KGroupData {
        &self.data
    }

    pub fn support(&self) -> &Support {
        &self.data.support
    }

    pub fn field(&self) -> Field {
        self.data.support.field()
    }

    pub fn degree(&self) -> usize {
        self.data.degree
    }

    pub fn group(&self) -> &Arc<FgAbGroup> {
        &self.group
    }

    /// Size of the S-unit basis.
    pub fn basis_size(&self) -> usize {
        self.basis.len()
    }

    pub fn unit_basis(&self) -> &[UnitVector] {
        &self.basis
    }

    /// Number of basis tuples, `basis_size^degree`.
    pub fn tuple_count(&self) -> usize {
        self.basis.len().pow(self.degree() as u32)
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.data.moduli
    }

    /// The symbol of a basis tuple.
    pub fn tuple_symbol(&self, tuple: &[usize]) -> MilnorSymbol {
        MilnorSymbol::new(self.field(), tuple.iter().map(|&i| self.basis[i].clone()).collect())
            .expect("basis units share the field")
    }

    /// Reduced element for a coordinate vector, or an error if it is outside the image.
    pub fn reduce_coordinates(&self, coords: &[BigInt]) -> Result<SparseVec> {
        let c: SparseVec = coords.iter().cloned().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        let y = self
            .lattice_solver
            .solve(&c)
            .ok_or_else(|| Error::invalid("element is not generated by symbols of S-units"))?;
        Ok(self.group.reduce(&self.data.to_reduced.apply(&y)))
    }

    /// Reduced element of a basis tuple.
    pub fn reduce_tuple(&self, tuple: &[usize], caps: &Caps) -> Result<SparseVec> {
        let c = tuple_coordinates(&self.data.support, &self.basis, tuple, &self.data.moduli, caps)?;
        self.reduce_coordinates(&c)
    }

    /// Coordinates (reduced into `[0, d)`) of an element.
    pub fn coordinates(&self, x: &SparseVec) -> Vec<BigInt> {
        let c = self.data.generator_coords.apply(x);
        self.data
            .moduli
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let v = c.get(&i).cloned().unwrap_or_default();
                if d.is_zero() { v } else { v.mod_floor(d) }
            })
            .collect()
    }

    /// Normal form of an element.
    pub fn normal_form_of(&self, x: &SparseVec, caps: &Caps) -> Result<KNormalForm> {
        normal_form_from_coordinates(&self.data.support, self.degree(), &self.coordinates(x), caps)
    }

    /// The element of an expression whose symbols are S-units.
    pub fn element_of(&self, e: &MilnorExpression, caps: &Caps) -> Result<SparseVec> {
        if e.degree() != self.degree() || e.field() != self.field() {
            return Err(Error::invalid("expression has the wrong degree or field"));
        }
        let nf = normal_form(e, caps)?;
        self.reduce_coordinates(&normal_form_coordinates(&self.data.support, &nf)?)
    }

    /// A reduced element as a combination of basis-tuple symbols.
    pub fn lift(&self, x: &SparseVec) -> Result<MilnorExpression> {
        let mut acc: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
        for (&i, k) in x {
            for (t, c) in &self.data.generator_lifts[i] {
                *acc.entry(t.clone()).or_default() += k * c;
            }
        }
        let terms = acc.into_iter().filter(|(_, k)| !k.is_zero()).map(|(t, k)| (k, self.tuple_symbol(&t))).collect();
        MilnorExpression::from_terms(self.field(), self.degree(), terms)
    }

    /// Matrix of `x -> {basis[j]} * x` from this group to the next degree.
    pub fn multiplication_matrix(&self, j: usize, next: &TruncatedKGroup, caps: &Caps) -> Result<IntMatrix> {
        self.check_next(next)?;
        let mut cols = Vec::with_capacity(self.data.orders.len());
        for lift in &self.data.generator_lifts {
            let mut col = SparseVec::new();
            for (t, c) in lift {
                let mut tuple = Vec::with_capacity(t.len() + 1);
                tuple.push(j);
                tuple.extend_from_slice(t);
                crate::fgab::axpy(&mut col, c, &next.reduce_tuple(&tuple, caps)?);
            }
            cols.push(next.group.reduce(&col));
        }
        Ok(IntMatrix::from_columns(next.group.generators(), cols))
    }

    /// `{u} * x` for an S-unit `u`.
    pub fn multiply_unit(&self, u: &UnitVector, x: &SparseVec, next: &TruncatedKGroup, caps: &Caps) -> Result<SparseVec> {
        self.check_next(next)?;
        let e = self.data.support.coordinates(u)?;
        let mut out = SparseVec::new();
        for (j, ej) in e.iter().enumerate() {
            if ej.is_zero() {
                continue;
            }
            let m = self.multiplication_matrix(j, next, caps)?;
            crate::fgab::axpy(&mut out, ej, &m.apply(x));
        }
        Ok(next.group.reduce(&out))
    }

    fn check_next(&self, next: &TruncatedKGroup) -> Result<()> {
        if next.support() != self.support() || next.degree() != self.degree() + 1 {
            return Err(Error::invalid("target must be the next degree over the same support"));
        }
        Ok(())
    }
}

fn check_caps(support: &Support, degree: usize, caps: &Caps) -> Result<()> {
    let s = support.finite_places().count();
    if s > caps.max_support {
        return Err(Error::CapExceeded(format!("support has {s} places, cap is {}", caps.max_support)));
    }
    if degree > caps.max_n {
        return Err(Error::CapExceeded(format!("degree {degree} above cap {}", caps.max_n)));
    }
    Ok(())
}

/// Tame places of the support, in order.
fn tame_places(support: &Support) -> impl Iterator<Item = &Place> {
    support.places().iter().filter(|p| p.is_tame())
}

/// Moduli of the coordinate target for degree `m`.
fn coordinate_moduli(support: &Support, m: usize, caps: &Caps) -> Result<Vec<BigInt>> {
    Ok(match (support.field(), m) {
        (_, 0) => vec![BigInt::zero()],
        (_, 1) => support.unit_orders(),
        (field, 2) => {
            let mut out = Vec::new();
            if field == Field::Rational {
                out.push(BigInt::from(2));
            }
            for pl in tame_places(support) {
                out.push(BigInt::from(residue_field(pl, caps)?.unit_order()));
            }
            out
        }
        (Field::Rational, _) => vec![BigInt::from(2)],
        (Field::FunctionField(_), _) => Vec::new(),
    })
}

/// Coordinates of a normal form with respect to a support.
pub(crate) fn normal_form_coordinates(support: &Support, nf: &KNormalForm) -> Result<Vec<BigInt>> {
    let tame_coords = |tame: &BTreeMap<Place, Residue>, out: &mut Vec<BigInt>| -> Result<()> {
        if let Some(pl) = tame.keys().find(|p| !support.contains(p)) {
            return Err(Error::invalid(format!("symbol has a nonzero tame symbol at {pl}, outside the support")));
        }
        out.extend(tame_places(support).map(|pl| BigInt::from(tame.get(pl).map_or(0, |r| r.log))));
        Ok(())
    };
    Ok(match nf {
        KNormalForm::Integer(n) => vec![n.clone()],
        KNormalForm::Unit(u) => support.coordinates(u)?,
        KNormalForm::RationalK2 { dyadic, tame } => {
            let mut out = vec![BigInt::from(*dyadic)];
            tame_coords(tame, &mut out)?;
            out
        }
        KNormalForm::FunctionK2 { tame } => {
            let mut out = Vec::new();
            tame_coords(tame, &mut out)?;
            out
        }
        KNormalForm::RationalSign { sign, .. } => vec![BigInt::from(*sign)],
        KNormalForm::Trivial { .. } => Vec::new(),
    })
}

/// Inverse of [`normal_form_coordinates`].
pub(crate) fn normal_form_from_coordinates(
    support: &Support,
    degree: usize,
    c: &[BigInt],
    caps: &Caps,
) -> Result<KNormalForm> {
    let field = support.field();
    let tame = |c: &[BigInt]| -> Result<BTreeMap<Place, Residue>> {
        let mut out = BTreeMap::new();
        for (pl, v) in tame_places(support).zip(c) {
            let modulus = residue_field(pl, caps)?.unit_order();
            let log = v.mod_floor(&BigInt::from(modulus));
            if !log.is_zero() {
                out.insert(pl.clone(), Residue { log: log.try_into().unwrap(), modulus });
            }
        }
        Ok(out)
    };
    let bit = |v: &BigInt| if v.is_odd() { 1u8 } else { 0 };
    Ok(match (field, degree) {
        (_, 0) => KNormalForm::Integer(c[0].clone()),
        (_, 1) => KNormalForm::Unit(support.unit_from_coordinates(c)),
        (Field::Rational, 2) => KNormalForm::RationalK2 { dyadic: bit(&c[0]), tame: tame(&c[1..])? },
        (Field::FunctionField(_), 2) => KNormalForm::FunctionK2 { tame: tame(c)? },
        (Field::Rational, m) => KNormalForm::RationalSign { degree: m, sign: bit(&c[0]) },
        (f, m) => KNormalForm::Trivial { field: f, degree: m },
    })
}

/// Coordinates of a basis tuple, reduced modulo the target.
fn tuple_coordinates(
    support: &Support,
    basis: &[UnitVector],
    tuple: &[usize],
    moduli: &[BigInt],
    caps: &Caps,
) -> Result<Vec<BigInt>> {
    let field = support.field();
    let raw = match tuple.len() {
        0..=2 => {
            let sym = MilnorSymbol::new(field, tuple.iter().map(|&i| basis[i].clone()).collect())?;
            normal_form_coordinates(support, &symbol_normal_form(&sym, caps)?)?
        }
        // the sign rule only looks at the torsion entries
        _ => match field {
            Field::Rational => {
                let neg = tuple.iter().all(|&i| basis[i].torsion() == Torsion::Sign(-1));
                vec![BigInt::from(neg as u8)]
            }
            Field::FunctionField(_) => Vec::new(),
        },
    };
    Ok(raw
        .into_iter()
        .zip(moduli)
        .map(|(v, d)| if d.is_zero() { v } else { v.mod_floor(d) })
        .collect())
}

fn to_sparse(c: &[BigInt]) -> SparseVec {
    c.iter().cloned().enumerate().filter(|(_, v)| !v.is_zero()).collect()
}

fn compute_data(support: &Support, m: usize, caps: &Caps) -> Result<KGroupData> {
    let basis = support.unit_basis();
    let b = basis.len();
    let moduli = coordinate_moduli(support, m, caps)?;
    let r = moduli.len();
    let relations = IntMatrix::diagonal(r, r, &moduli);

    // Greedy spanning set over distinct coordinate vectors, in tuple order.
    let mut seen: HashSet<Vec<BigInt>> = HashSet::new();
    let mut selected: Vec<Vec<usize>> = Vec::new();
    let mut sel_cols: Vec<SparseVec> = Vec::new();
    let mut solver = IntSolver::new(&relations);
    let total = b.pow(m as u32);
    let mut tuple = vec![0usize; m];
    for idx in 0..total {
        let mut k = idx;
        for slot in tuple.iter_mut().rev() {
            *slot = k % b;
            k /= b;
        }
        let c = tuple_coordinates(support, &basis, &tuple, &moduli, caps)?;
        if c.iter().all(Zero::is_zero) || !seen.insert(c.clone()) {
            continue;
        }
        let c = to_sparse(&c);
        if !solver.contains(&c) {
            selected.push(tuple.clone());
            sel_cols.push(c);
            solver = IntSolver::new(&IntMatrix::from_columns(r, sel_cols.clone()).hstack(&relations));
            if solver.spans_everything() {
                break;
            }
        }
    }
    let s = selected.len();
    let spanning = IntMatrix::from_columns(r, sel_cols).hstack(&relations);
    let lattice = lattice_basis(&spanning);
    let lattice_solver = IntSolver::new(&lattice);
    let rp = lattice.cols();

    // Target relations rewritten in lattice coordinates, then diagonalized.
    let rel_cols: Vec<SparseVec> = relations
        .columns()
        .filter(|c| !c.is_empty())
        .map(|c| lattice_solver.solve(c).expect("relations lie in the image lattice"))
        .collect();
    let y = IntMatrix::from_columns(rp, rel_cols);
    let smith = smith_normal_form_with_inverses(&y);
    let mut diag = smith.diagonal();
    diag.resize(rp, BigInt::zero());
    let keep: Vec<usize> = (0..rp).filter(|&i| !diag[i].is_one()).collect();
    let orders: Vec<BigInt> = keep.iter().map(|&i| diag[i].clone()).collect();
    let u_t = smith.u.transpose();
    let to_reduced = u_t.select_columns(keep.iter().copied()).transpose();
    let u_inv = smith.u_inv.expect("inverse requested");
    let generator_coords = lattice.mul(&u_inv.select_columns(keep.iter().copied()));

    let mut generator_lifts = Vec::with_capacity(keep.len());
    for col in generator_coords.columns() {
        let x = solver.solve(col).expect("generators lie in the span of the selected tuples");
        let lift = x
            .into_iter()
            .filter(|(i, v)| *i < s && !v.is_zero())
            .map(|(i, v)| (selected[i].clone(), v))
            .collect();
        generator_lifts.push(lift);
    }
    Ok(KGroupData {
        support: support.clone(),
        degree: m,
        moduli,
        selected,
        lattice,
        to_reduced,
        orders,
        generator_coords,
        generator_lifts,
    })
}

/// Source of truncated K-groups, so callers can layer their own caches.
pub trait KGroupProvider: Send + Sync {
    fn caps(&self) -> &Caps;
    fn k_group(&self, support: &Support, degree: usize) -> Result<Arc<TruncatedKGroup>>;
}

/// In-memory memo keyed by `(support, degree)`.
#[derive(Debug, Default)]
pub struct MemoryKGroups {
    caps: Caps,
    groups: Mutex<HashMap<(Support, usize), Arc<TruncatedKGroup>>>,
}

impl MemoryKGroups {
    pub fn new(caps: Caps) -> Self {
        MemoryKGroups { caps, groups: Mutex::new(HashMap::new()) }
    }

    /// Insert a group built elsewhere (first insertion wins).
    pub fn insert(&self, g: TruncatedKGroup) -> Arc<TruncatedKGroup> {
        let key = (g.support().clone(), g.degree());
        self.groups.lock().unwrap().entry(key).or_insert_with(|| Arc::new(g)).clone()
    }

    pub fn get(&self, support: &Support, degree: usize) -> Option<Arc<TruncatedKGroup>> {
        self.groups.lock().unwrap().get(&(support.clone(), degree)).cloned()
    }
}

impl KGroupProvider for MemoryKGroups {
    fn caps(&self) -> &Caps {
        &self.caps
    }

    fn k_group(&self, support: &Support, degree: usize) -> Result<Arc<TruncatedKGroup>> {
        if let Some(g) = self.get(support, degree) {
            return Ok(g);
        }
        // built outside the lock; a concurrent duplicate is discarded
        let g = TruncatedKGroup::compute(support, degree, &self.caps)?;
        Ok(self.insert(g))
    }
}

/// Process-wide memoized truncated K-group.
pub fn truncated_k_group(support: &Support, degree: usize, caps: &Caps) -> Result<Arc<TruncatedKGroup>> {
    static CACHE: OnceLock<Mutex<HashMap<Caps, Arc<MemoryKGroups>>>> = OnceLock::new();
    let memo = CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap()
        .entry(caps.clone())
        .or_insert_with(|| Arc::new(MemoryKGroups::new(caps.clone())))
        .clone();
    memo.k_group(support, degree)
}
