//! Milnor K-theory of `Q` and `F_p(t)`: symbols, tame and dyadic coordinates,
//! canonical normal forms per degree and S-unit truncated K-groups.

mod symbol;
mod truncated;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fgab::big_to_json;
use crate::fields::{residue_field, residue_log, Field, FieldElement, Place, Torsion, UnitVector};

pub use symbol::{parse_expression, parse_symbol, MilnorExpression, MilnorSymbol};
pub use truncated::{truncated_k_group, KGroupData, KGroupProvider, MemoryKGroups, TruncatedKGroup};

/// Placeholder for `K_3^ind(F)`, which has no algorithm here and is never computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct K3IndLabel;

impl fmt::Display for K3IndLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("K_3^ind(F)")
    }
}

/// A discrete logarithm in `Z/modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Residue {
    pub log: u64,
    pub modulus: u64,
}

/// Canonical coordinates of an element of `K_m^M(F)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KNormalForm {
    /// `K_0 = Z`.
    Integer(BigInt),
    /// `K_1 = F^×`.
    Unit(UnitVector),
    /// `K_2(Q)`: the dyadic Hilbert bit and the tame logs at odd primes (zeros omitted).
    RationalK2 { dyadic: u8, tame: BTreeMap<Place, Residue> },
    /// `K_2(F_p(t))`: tame logs at monic irreducibles (zeros omitted).
    FunctionK2 { tame: BTreeMap<Place, Residue> },
    /// `K_m(Q)` for `m >= 3`, a single sign bit.
    RationalSign { degree: usize, sign: u8 },
    /// `K_m(F_p(t))` for `m >= 3`.
    Trivial { field: Field, degree: usize },
}

impl KNormalForm {
    pub fn zero(field: Field, degree: usize) -> Self {
        match (field, degree) {
            (_, 0) => KNormalForm::Integer(BigInt::zero()),
            (f, 1) => KNormalForm::Unit(UnitVector::one(f)),
            (Field::Rational, 2) => KNormalForm::RationalK2 { dyadic: 0, tame: BTreeMap::new() },
            (Field::FunctionField(_), 2) => KNormalForm::FunctionK2 { tame: BTreeMap::new() },
            (Field::Rational, m) => KNormalForm::RationalSign { degree: m, sign: 0 },
            (f, m) => KNormalForm::Trivial { field: f, degree: m },
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            KNormalForm::Integer(_) => 0,
            KNormalForm::Unit(_) => 1,
            KNormalForm::RationalK2 { .. } | KNormalForm::FunctionK2 { .. } => 2,
            KNormalForm::RationalSign { degree, .. } | KNormalForm::Trivial { degree, .. } => *degree,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            KNormalForm::Integer(n) => n.is_zero(),
            KNormalForm::Unit(u) => u.is_one(),
            KNormalForm::RationalK2 { dyadic, tame } => *dyadic == 0 && tame.is_empty(),
            KNormalForm::FunctionK2 { tame } => tame.is_empty(),
            KNormalForm::RationalSign { sign, .. } => *sign == 0,
            KNormalForm::Trivial { .. } => true,
        }
    }

    /// Sum of two normal forms of the same degree and field.
    pub fn add(&self, other: &KNormalForm) -> Result<KNormalForm> {
        self.add_scaled(other, &BigInt::one())
    }

    /// `self + k * other`.
    pub fn add_scaled(&self, other: &KNormalForm, k: &BigInt) -> Result<KNormalForm> {
        use KNormalForm::*;
        let mismatch = || Error::invalid("normal forms of different degree or field");
        Ok(match (self, other) {
            (Integer(a), Integer(b)) => Integer(a + k * b),
            (Unit(a), Unit(b)) => {
                if a.field() != b.field() {
                    return Err(mismatch());
                }
                Unit(a.mul(&b.pow(k)))
            }
            (RationalK2 { dyadic: a, tame: ta }, RationalK2 { dyadic: b, tame: tb }) => {
                RationalK2 { dyadic: (a + bit_times(*b, k)) % 2, tame: add_tame(ta, tb, k) }
            }
            (FunctionK2 { tame: ta }, FunctionK2 { tame: tb }) => FunctionK2 { tame: add_tame(ta, tb, k) },
            (RationalSign { degree: m, sign: a }, RationalSign { degree: n, sign: b }) if m == n => {
                RationalSign { degree: *m, sign: (a + bit_times(*b, k)) % 2 }
            }
            (Trivial { field: f, degree: m }, Trivial { field: g, degree: n }) if f == g && m == n => self.clone(),
            _ => return Err(mismatch()),
        })
    }

    /// JSON with place-keyed coordinate maps.
    pub fn to_json(&self) -> Value {
        fn tame_json(t: &BTreeMap<Place, Residue>) -> Value {
            let m: Map<String, Value> = t
                .iter()
                .map(|(p, r)| (p.to_string(), json!({"log": r.log, "modulus": r.modulus})))
                .collect();
            Value::Object(m)
        }
        match self {
            KNormalForm::Integer(n) => json!({"degree": 0, "value": big_to_json(n)}),
            KNormalForm::Unit(u) => {
                let torsion = match u.torsion() {
                    Torsion::Sign(s) => json!(s),
                    Torsion::Lead(c) => json!(c),
                };
                let exps: Map<String, Value> =
                    u.exponents().iter().map(|(p, e)| (p.to_string(), big_to_json(e))).collect();
                json!({"degree": 1, "field": u.field().tag(), "torsion": torsion, "exponents": exps})
            }
            KNormalForm::RationalK2 { dyadic, tame } => {
                json!({"degree": 2, "field": "Q", "dyadic": if *dyadic == 1 { -1 } else { 1 }, "tame": tame_json(tame)})
            }
            KNormalForm::FunctionK2 { tame } => json!({"degree": 2, "tame": tame_json(tame)}),
            KNormalForm::RationalSign { degree, sign } => json!({"degree": degree, "field": "Q", "sign": sign}),
            KNormalForm::Trivial { field, degree } => json!({"degree": degree, "field": field.tag(), "trivial": true}),
        }
    }
}

impl fmt::Display for KNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tame_str = |t: &BTreeMap<Place, Residue>| {
            t.iter().map(|(p, r)| format!("{p}: {} mod {}", r.log, r.modulus)).collect::<Vec<_>>().join(", ")
        };
        match self {
            KNormalForm::Integer(n) => write!(f, "{n}"),
            KNormalForm::Unit(u) => write!(f, "{u}"),
            _ if self.is_zero() => write!(f, "0"),
            KNormalForm::RationalK2 { dyadic, tame } => {
                write!(f, "dyadic {}, tame [{}]", if *dyadic == 1 { -1 } else { 1 }, tame_str(tame))
            }
            KNormalForm::FunctionK2 { tame } => write!(f, "tame [{}]", tame_str(tame)),
            KNormalForm::RationalSign { sign, .. } => write!(f, "{sign} mod 2"),
            KNormalForm::Trivial { .. } => write!(f, "0"),
        }
    }
}

fn bit_times(b: u8, k: &BigInt) -> u8 {
    if b == 1 && k.is_odd() { 1 } else { 0 }
}

fn add_tame(a: &BTreeMap<Place, Residue>, b: &BTreeMap<Place, Residue>, k: &BigInt) -> BTreeMap<Place, Residue> {
    let mut out = a.clone();
    for (p, r) in b {
        let km = k.mod_floor(&BigInt::from(r.modulus)).to_u64().unwrap();
        let add = (r.log as u128 * km as u128 % r.modulus as u128) as u64;
        let e = out.entry(p.clone()).or_insert(Residue { log: 0, modulus: r.modulus });
        e.log = (e.log + add) % r.modulus;
    }
    out.retain(|_, r| r.log != 0);
    out
}

/// Tame symbol `(a, b)_v`: the residue log of `(-1)^{v(a)v(b)} a^{v(b)} / b^{v(a)}`.
pub fn tame_symbol(a: &UnitVector, b: &UnitVector, place: &Place, caps: &Caps) -> Result<u64> {
    if !place.is_tame() {
        return Err(Error::invalid(format!("tame symbol is not defined at the {place} place")));
    }
    let va = a.valuation(place);
    let vb = b.valuation(place);
    let field = a.field();
    let w = UnitVector::minus_one(field).pow(&(&va * &vb)).mul(&a.pow(&vb)).mul(&b.pow(&-va));
    residue_log(place, &w, caps)
}

/// `(a, b)_p` read off the tame symbol at an odd prime: `(-1)^log`.
pub fn legendre_from_tame(a: &UnitVector, b: &UnitVector, place: &Place, caps: &Caps) -> Result<i8> {
    let l = tame_symbol(a, b, place, caps)?;
    Ok(if l % 2 == 1 { -1 } else { 1 })
}

/// `(alpha mod 2, u mod 8)` for a rational unit `2^alpha * u`.
fn dyadic_parts(u: &UnitVector) -> (u8, u8) {
    let mut unit: u32 = match u.torsion() {
        Torsion::Sign(-1) => 7,
        _ => 1,
    };
    let mut alpha = 0u8;
    for (pl, e) in u.exponents() {
        match pl {
            Place::Dyadic => alpha = e.is_odd() as u8,
            Place::OddPrime(p) if e.is_odd() => {
                let r = (p % 8u32).to_u32().unwrap();
                unit = unit * r % 8;
            }
            _ => {}
        }
    }
    (alpha, unit as u8)
}

/// Dyadic Hilbert symbol on factored rationals, as a bit (`1` means `-1`).
pub fn hilbert_dyadic_bit(a: &UnitVector, b: &UnitVector) -> u8 {
    let (alpha, u) = dyadic_parts(a);
    let (beta, v) = dyadic_parts(b);
    let eps = |x: u8| ((x - 1) / 2) & 1;
    let omega = |x: u8| (((x as u32 * x as u32 - 1) / 8) & 1) as u8;
    (eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)) & 1
}

/// Tame places where a symbol of these units can be nonzero.
fn tame_places<'a>(entries: impl IntoIterator<Item = &'a UnitVector>) -> Vec<Place> {
    let mut places: Vec<Place> =
        entries.into_iter().flat_map(|u| u.exponents().keys().filter(|p| p.is_tame()).cloned()).collect();
    places.sort();
    places.dedup();
    places
}

/// Normal form of one symbol.
pub fn symbol_normal_form(s: &MilnorSymbol, caps: &Caps) -> Result<KNormalForm> {
    let field = s.field();
    let e = s.entries();
    Ok(match (field, e.len()) {
        (_, 0) => KNormalForm::Integer(BigInt::one()),
        (_, 1) => KNormalForm::Unit(e[0].clone()),
        (_, 2) => {
            let mut tame = BTreeMap::new();
            for pl in tame_places(e) {
                let log = tame_symbol(&e[0], &e[1], &pl, caps)?;
                if log != 0 {
                    let modulus = residue_field(&pl, caps)?.unit_order();
                    tame.insert(pl, Residue { log, modulus });
                }
            }
            match field {
                Field::Rational => KNormalForm::RationalK2 { dyadic: hilbert_dyadic_bit(&e[0], &e[1]), tame },
                Field::FunctionField(_) => KNormalForm::FunctionK2 { tame },
            }
        }
        (Field::Rational, m) => {
            let neg = e.iter().all(|u| u.torsion() == Torsion::Sign(-1));
            KNormalForm::RationalSign { degree: m, sign: neg as u8 }
        }
        (f, m) => KNormalForm::Trivial { field: f, degree: m },
    })
}

/// Normal form of a formal combination of symbols; additive by construction.
pub fn normal_form(e: &MilnorExpression, caps: &Caps) -> Result<KNormalForm> {
    let mut acc = KNormalForm::zero(e.field(), e.degree());
    for (k, s) in e.terms() {
        acc = acc.add_scaled(&symbol_normal_form(s, caps)?, k)?;
    }
    Ok(acc)
}

/// Outcome of checking the defining relations of Milnor K-theory at one element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinbergReport {
    pub a: String,
    /// `{a, 1-a}` has zero normal form (`None` when `a = 1 - a` is outside the factoring bounds).
    pub one_minus: Option<bool>,
    /// `{a, -a}` has zero normal form.
    pub minus: bool,
    /// `{a, b} + {b, a}` vanishes, per sampled `b`.
    pub anticommute: Vec<(String, bool)>,
}

impl SteinbergReport {
    pub fn passed(&self) -> bool {
        self.one_minus != Some(false) && self.minus && self.anticommute.iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "a": self.a,
            "one_minus_a_vanishes": self.one_minus,
            "minus_a_vanishes": self.minus,
            "anticommutativity": self.anticommute.iter().map(|(b, ok)| json!({"b": b, "vanishes": ok})).collect::<Vec<_>>(),
            "passed": self.passed(),
        })
    }
}

/// Check `{a, 1-a} = 0`, `{a, -a} = 0` and `{a, b} + {b, a} = 0` in normal form.
pub fn steinberg_check(a: &FieldElement, samples: &[FieldElement], caps: &Caps) -> Result<SteinbergReport> {
    if a.is_zero() || a.equals(&FieldElement::one(a.field())) {
        return Err(Error::invalid("Steinberg relation needs a not in {0, 1}"));
    }
    let field = a.field();
    let ua = crate::fields::factor(a, caps)?;
    let pair_vanishes = |x: &UnitVector, y: &UnitVector| -> Result<bool> {
        let s = MilnorSymbol::new(field, vec![x.clone(), y.clone()])?;
        Ok(symbol_normal_form(&s, caps)?.is_zero())
    };
    let one_minus = match crate::fields::factor(&a.one_minus(), caps) {
        Ok(u) => Some(pair_vanishes(&ua, &u)?),
        Err(Error::FactorizationBound(_)) => None,
        Err(e) => return Err(e),
    };
    let minus = pair_vanishes(&ua, &crate::fields::factor(&a.neg(), caps)?)?;
    let mut anticommute = Vec::new();
    for b in samples {
        let ub = crate::fields::factor(b, caps)?;
        let e = MilnorExpression::from_terms(
            field,
            2,
            vec![
                (BigInt::one(), MilnorSymbol::new(field, vec![ua.clone(), ub.clone()])?),
                (BigInt::one(), MilnorSymbol::new(field, vec![ub, ua.clone()])?),
            ],
        )?;
        anticommute.push((b.to_string(), normal_form(&e, caps)?.is_zero()));
    }
    Ok(SteinbergReport { a: a.to_string(), one_minus, minus, anticommute })
}

#[cfg(test)]
mod tests;
