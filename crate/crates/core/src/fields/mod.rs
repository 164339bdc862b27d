//! The two supported infinite fields, `Q` and `F_p(t)`: elements, places,
//! factorization into units, residue fields and the archimedean/dyadic symbols.

pub mod integer;
mod parse;
pub mod poly;
mod residue;
mod symbols;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::config::Caps;
use crate::error::{Error, Result};
pub use parse::{parse_element, parse_support};
pub use poly::Poly;
pub use residue::{residue_field, residue_log, residue_log_of_element, ResidueField};
pub use symbols::{hilbert_dyadic, real_symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Field {
    Rational,
    /// `F_p(t)` for a prime `p`.
    FunctionField(u64),
}

impl Field {
    pub fn function_field(p: u64, caps: &Caps) -> Result<Field> {
        if p > caps.max_characteristic {
            return Err(Error::CapExceeded(format!("characteristic {p} above cap {}", caps.max_characteristic)));
        }
        if !integer::is_prime_u64(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(Field::FunctionField(p))
    }

    /// Order of the torsion of the unit group (`±1` for `Q`, `F_p^×` for `F_p(t)`).
    pub fn torsion_order(&self) -> u64 {
        match self {
            Field::Rational => 2,
            Field::FunctionField(p) => p - 1,
        }
    }

    /// Smallest generator of the torsion subgroup.
    pub fn torsion_generator(&self) -> u64 {
        match self {
            Field::Rational => 1,
            Field::FunctionField(p) => residue::primitive_root(*p),
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Field::Rational => "Q".into(),
            Field::FunctionField(p) => format!("F{p}(t)"),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// A place of one of the backend fields.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    RealSign,
    Dyadic,
    OddPrime(BigUint),
    MonicIrreducible(Poly),
}

impl Place {
    pub fn odd_prime(p: impl Into<BigUint>) -> Result<Place> {
        let p = p.into();
        if p == BigUint::from(2u32) {
            return Ok(Place::Dyadic);
        }
        if !integer::is_prime(&p)? {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        Ok(Place::OddPrime(p))
    }

    pub fn monic_irreducible(f: Poly) -> Result<Place> {
        if !f.is_monic() || !f.is_irreducible() {
            return Err(Error::invalid(format!("{f} is not monic irreducible over F_{}", f.characteristic())));
        }
        Ok(Place::MonicIrreducible(f))
    }

    /// Places carrying a valuation (everything except the real sign).
    pub fn is_finite(&self) -> bool {
        !matches!(self, Place::RealSign)
    }

    /// Places where tame symbols are defined.
    pub fn is_tame(&self) -> bool {
        matches!(self, Place::OddPrime(_) | Place::MonicIrreducible(_))
    }

    /// The prime or polynomial generating this place's ideal, as a field element.
    pub fn uniformizer(&self) -> Option<FieldElement> {
        match self {
            Place::RealSign => None,
            Place::Dyadic => Some(FieldElement::Rational(BigRational::from_integer(2.into()))),
            Place::OddPrime(p) => Some(FieldElement::Rational(BigRational::from_integer(BigInt::from(p.clone())))),
            Place::MonicIrreducible(f) => {
                Some(FieldElement::Function { num: f.clone(), den: Poly::one(f.characteristic()) })
            }
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::RealSign => write!(f, "real"),
            Place::Dyadic => write!(f, "2"),
            Place::OddPrime(p) => write!(f, "{p}"),
            Place::MonicIrreducible(g) => write!(f, "{g}"),
        }
    }
}

/// A nonzero element of `Q` or `F_p(t)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldElement {
    Rational(BigRational),
    /// `num / den`, not necessarily reduced.
    Function { num: Poly, den: Poly },
}

impl FieldElement {
    pub fn rational(n: i64, d: i64) -> FieldElement {
        FieldElement::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn field(&self) -> Field {
        match self {
            FieldElement::Rational(_) => Field::Rational,
            FieldElement::Function { num, .. } => Field::FunctionField(num.characteristic()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldElement::Rational(q) => q.is_zero(),
            FieldElement::Function { num, .. } => num.is_zero(),
        }
    }

    pub fn one(field: Field) -> FieldElement {
        match field {
            Field::Rational => FieldElement::Rational(BigRational::one()),
            Field::FunctionField(p) => FieldElement::Function { num: Poly::one(p), den: Poly::one(p) },
        }
    }

    /// Same field element, compared as fractions.
    pub fn equals(&self, other: &FieldElement) -> bool {
        match (self, other) {
            (FieldElement::Rational(a), FieldElement::Rational(b)) => a == b,
            (FieldElement::Function { num: a, den: b }, FieldElement::Function { num: c, den: d }) => {
                a.mul(d) == c.mul(b)
            }
            _ => false,
        }
    }

    pub fn one_minus(&self) -> FieldElement {
        match self {
            FieldElement::Rational(q) => FieldElement::Rational(BigRational::one() - q),
            FieldElement::Function { num, den } => FieldElement::Function { num: den.sub(num), den: den.clone() },
        }
    }

    pub fn neg(&self) -> FieldElement {
        match self {
            FieldElement::Rational(q) => FieldElement::Rational(-q.clone()),
            FieldElement::Function { num, den } => {
                FieldElement::Function { num: num.scale(num.characteristic() - 1), den: den.clone() }
            }
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldElement::Rational(q) => write!(f, "{q}"),
            FieldElement::Function { num, den } => {
                if den.is_one() {
                    write!(f, "{num}@p={}", num.characteristic())
                } else {
                    write!(f, "({num})/({den})@p={}", num.characteristic())
                }
            }
        }
    }
}

/// Torsion coordinate of a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Torsion {
    /// `+1` or `-1`.
    Sign(i8),
    /// Leading coefficient in `F_p^×`.
    Lead(u64),
}

/// An element of `F^×` in factored form: torsion part times prime powers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnitVector {
    field: Field,
    torsion: Torsion,
    exponents: BTreeMap<Place, BigInt>,
}

impl UnitVector {
    pub fn new(field: Field, torsion: Torsion, exponents: BTreeMap<Place, BigInt>) -> Result<Self> {
        match (field, torsion) {
            (Field::Rational, Torsion::Sign(s)) if s == 1 || s == -1 => {}
            (Field::FunctionField(p), Torsion::Lead(c)) if c > 0 && c < p => {}
            _ => return Err(Error::invalid("torsion part does not match the field")),
        }
        for pl in exponents.keys() {
            let ok = match (field, pl) {
                (Field::Rational, Place::Dyadic | Place::OddPrime(_)) => true,
                (Field::FunctionField(p), Place::MonicIrreducible(f)) => f.characteristic() == p,
                _ => false,
            };
            if !ok {
                return Err(Error::invalid(format!("place {pl} does not belong to {field}")));
            }
        }
        let exponents = exponents.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        Ok(UnitVector { field, torsion, exponents })
    }

    pub fn one(field: Field) -> Self {
        let torsion = match field {
            Field::Rational => Torsion::Sign(1),
            Field::FunctionField(_) => Torsion::Lead(1),
        };
        UnitVector { field, torsion, exponents: BTreeMap::new() }
    }

    pub fn minus_one(field: Field) -> Self {
        let torsion = match field {
            Field::Rational => Torsion::Sign(-1),
            Field::FunctionField(p) => Torsion::Lead(p - 1),
        };
        UnitVector { field, torsion, exponents: BTreeMap::new() }
    }

    /// A single place's uniformizer.
    pub fn of_place(field: Field, place: &Place) -> Result<Self> {
        Self::new(field, Self::one(field).torsion, BTreeMap::from([(place.clone(), BigInt::one())]))
    }

    /// The constant `c` in `F_p^×` (or the sign for `Q`).
    pub fn torsion_unit(field: Field, torsion: Torsion) -> Result<Self> {
        Self::new(field, torsion, BTreeMap::new())
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn torsion(&self) -> Torsion {
        self.torsion
    }

    pub fn exponents(&self) -> &BTreeMap<Place, BigInt> {
        &self.exponents
    }

    pub fn valuation(&self, place: &Place) -> BigInt {
        self.exponents.get(place).cloned().unwrap_or_default()
    }

    pub fn is_one(&self) -> bool {
        self.exponents.is_empty() && *self == Self::one(self.field)
    }

    pub fn mul(&self, o: &UnitVector) -> UnitVector {
        assert_eq!(self.field, o.field, "units from different fields");
        let torsion = match (self.torsion, o.torsion, self.field) {
            (Torsion::Sign(a), Torsion::Sign(b), _) => Torsion::Sign(a * b),
            (Torsion::Lead(a), Torsion::Lead(b), Field::FunctionField(p)) => Torsion::Lead(a * b % p),
            _ => unreachable!("torsion matches field by construction"),
        };
        let mut exponents = self.exponents.clone();
        for (pl, e) in &o.exponents {
            *exponents.entry(pl.clone()).or_default() += e;
        }
        exponents.retain(|_, e| !e.is_zero());
        UnitVector { field: self.field, torsion, exponents }
    }

    pub fn pow(&self, k: &BigInt) -> UnitVector {
        let torsion = match (self.torsion, self.field) {
            (Torsion::Sign(s), _) => Torsion::Sign(if s == -1 && k.is_odd() { -1 } else { 1 }),
            (Torsion::Lead(c), Field::FunctionField(p)) => {
                let e = k.mod_floor(&BigInt::from(p - 1)).to_u64().unwrap();
                Torsion::Lead(poly::pow_mod(c, e, p))
            }
            _ => unreachable!(),
        };
        let exponents = if k.is_zero() {
            BTreeMap::new()
        } else {
            self.exponents.iter().map(|(pl, e)| (pl.clone(), e * k)).collect()
        };
        UnitVector { field: self.field, torsion, exponents }
    }

    pub fn inverse(&self) -> UnitVector {
        self.pow(&BigInt::from(-1))
    }

    /// The field element this factorization describes.
    pub fn to_element(&self) -> FieldElement {
        match self.field {
            Field::Rational => {
                let mut num = BigInt::one();
                let mut den = BigInt::one();
                for (pl, e) in &self.exponents {
                    let base = match pl {
                        Place::Dyadic => BigInt::from(2),
                        Place::OddPrime(p) => BigInt::from(p.clone()),
                        _ => unreachable!(),
                    };
                    let pw = num_traits::pow(base, e.magnitude().to_usize().expect("exponent size"));
                    if e.is_positive() {
                        num *= pw;
                    } else {
                        den *= pw;
                    }
                }
                if self.torsion == Torsion::Sign(-1) {
                    num = -num;
                }
                FieldElement::Rational(BigRational::new(num, den))
            }
            Field::FunctionField(p) => {
                let Torsion::Lead(c) = self.torsion else { unreachable!() };
                let mut num = Poly::constant(p, c);
                let mut den = Poly::one(p);
                for (pl, e) in &self.exponents {
                    let Place::MonicIrreducible(f) = pl else { unreachable!() };
                    for _ in 0..e.magnitude().to_usize().expect("exponent size") {
                        if e.is_positive() {
                            num = num.mul(f);
                        } else {
                            den = den.mul(f);
                        }
                    }
                }
                FieldElement::Function { num, den }
            }
        }
    }
}

impl fmt::Display for UnitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.torsion {
            Torsion::Sign(s) => write!(f, "{}", if s < 0 { "-" } else { "+" })?,
            Torsion::Lead(c) => write!(f, "{c}")?,
        }
        let parts: Vec<String> = self.exponents.iter().map(|(p, e)| format!("{p}:{e}")).collect();
        write!(f, " {{{}}}", parts.join(", "))
    }
}

/// Factor a nonzero element into torsion part and place exponents.
pub fn factor(x: &FieldElement, caps: &Caps) -> Result<UnitVector> {
    if x.is_zero() {
        return Err(Error::invalid("zero has no factorization"));
    }
    match x {
        FieldElement::Rational(q) => {
            let sign = if q.is_negative() { -1 } else { 1 };
            let mut exponents: BTreeMap<Place, BigInt> = BTreeMap::new();
            for (part, sgn) in [(q.numer(), 1), (q.denom(), -1)] {
                for (p, e) in integer::factor(part.magnitude(), caps.trial_division)? {
                    let place = if p == BigUint::from(2u32) { Place::Dyadic } else { Place::OddPrime(p) };
                    *exponents.entry(place).or_default() += BigInt::from(e) * sgn;
                }
            }
            UnitVector::new(Field::Rational, Torsion::Sign(sign), exponents)
        }
        FieldElement::Function { num, den } => {
            if den.is_zero() {
                return Err(Error::invalid("zero denominator"));
            }
            let p = num.characteristic();
            let mut exponents: BTreeMap<Place, BigInt> = BTreeMap::new();
            let (ln, fnum) = num.factor();
            let (ld, fden) = den.factor();
            for (part, sgn) in [(fnum, 1), (fden, -1)] {
                for (g, e) in part {
                    if g.degree() > caps.max_irreducible_degree {
                        return Err(Error::FactorizationBound(format!(
                            "irreducible factor {g} has degree above {}",
                            caps.max_irreducible_degree
                        )));
                    }
                    *exponents.entry(Place::MonicIrreducible(g)).or_default() += BigInt::from(e) * sgn;
                }
            }
            let lead = ln * poly::inv_mod(ld, p) % p;
            UnitVector::new(Field::FunctionField(p), Torsion::Lead(lead), exponents)
        }
    }
}

/// A finite set of places defining the S-unit group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Support {
    field: Field,
    /// Sorted, distinct. For `Q` the real sign is always first.
    places: Vec<Place>,
}

impl Support {
    pub fn new(field: Field, places: impl IntoIterator<Item = Place>) -> Result<Self> {
        let mut places: Vec<Place> = places.into_iter().collect();
        if field == Field::Rational {
            places.push(Place::RealSign);
        }
        places.sort();
        places.dedup();
        for pl in &places {
            let ok = match (field, pl) {
                (Field::Rational, Place::RealSign | Place::Dyadic | Place::OddPrime(_)) => true,
                (Field::FunctionField(p), Place::MonicIrreducible(f)) => f.characteristic() == p,
                _ => false,
            };
            if !ok {
                return Err(Error::invalid(format!("place {pl} does not belong to {field}")));
            }
        }
        Ok(Support { field, places })
    }

    /// `Q` with sign and the given primes.
    pub fn rational(primes: &[u64]) -> Result<Self> {
        let places = primes.iter().map(|&p| Place::odd_prime(p)).collect::<Result<Vec<_>>>()?;
        Self::new(Field::Rational, places)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    /// Places with a valuation, in order.
    pub fn finite_places(&self) -> impl Iterator<Item = &Place> {
        self.places.iter().filter(|p| p.is_finite())
    }

    pub fn contains(&self, place: &Place) -> bool {
        self.places.binary_search(place).is_ok()
    }

    pub fn is_subset_of(&self, other: &Support) -> bool {
        self.field == other.field && self.places.iter().all(|p| other.contains(p))
    }

    /// Number of listed places, counting the real sign for `Q`.
    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    /// Basis of the S-unit group: the torsion generator first, then one uniformizer per finite place.
    pub fn unit_basis(&self) -> Vec<UnitVector> {
        let f = self.field;
        let mut out = vec![match f {
            Field::Rational => UnitVector::minus_one(f),
            Field::FunctionField(_) => UnitVector::torsion_unit(f, Torsion::Lead(f.torsion_generator())).unwrap(),
        }];
        out.extend(self.finite_places().map(|pl| UnitVector::of_place(f, pl).unwrap()));
        out
    }

    /// Orders of the basis units (torsion order, then 0 for each free generator).
    pub fn unit_orders(&self) -> Vec<BigInt> {
        let mut out = vec![BigInt::from(self.field.torsion_order())];
        out.extend(self.finite_places().map(|_| BigInt::zero()));
        out
    }

    /// Exponent vector of an S-unit over [`Support::unit_basis`].
    pub fn coordinates(&self, u: &UnitVector) -> Result<Vec<BigInt>> {
        if u.field != self.field {
            return Err(Error::invalid("unit from a different field"));
        }
        let torsion = match u.torsion {
            Torsion::Sign(s) => BigInt::from(if s < 0 { 1 } else { 0 }),
            Torsion::Lead(c) => {
                let Field::FunctionField(p) = self.field else { unreachable!() };
                BigInt::from(residue::discrete_log_mod_p(c, self.field.torsion_generator(), p))
            }
        };
        for pl in u.exponents.keys() {
            if !self.contains(pl) {
                return Err(Error::invalid(format!("unit {u} is not supported on S (place {pl})")));
            }
        }
        let mut out = vec![torsion];
        out.extend(self.finite_places().map(|pl| u.valuation(pl)));
        Ok(out)
    }

    /// The unit with the given basis exponents.
    pub fn unit_from_coordinates(&self, coords: &[BigInt]) -> UnitVector {
        self.unit_basis()
            .iter()
            .zip(coords)
            .fold(UnitVector::one(self.field), |acc, (b, e)| acc.mul(&b.pow(e)))
    }
}

impl fmt::Display for Support {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .places
            .iter()
            .map(|p| match p {
                Place::RealSign => "-1".to_string(),
                other => other.to_string(),
            })
            .collect();
        write!(f, "{}", parts.join(","))?;
        if let Field::FunctionField(p) = self.field {
            write!(f, "@p={p}")?;
        }
        Ok(())
    }
}
