//! Residue fields at tame places and exhaustive discrete logarithms.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{ToPrimitive, Zero};

use super::integer::prime_divisors_u64;
use super::poly::{pow_mod, Poly};
use super::{factor, FieldElement, Place, Torsion, UnitVector};
use crate::config::Caps;
use crate::error::{Error, Result};

/// `F_q` for a tame place, with a fixed generator and a full log table.
#[derive(Debug)]
pub struct ResidueField {
    p: u64,
    degree: usize,
    modulus: Option<Poly>,
    order: u64,
    /// Base-`p` code of the generator (the integer itself for prime fields).
    generator: u64,
    /// `logs[code]` is the discrete log of the element with that code; slot 0 unused.
    logs: Vec<u32>,
}

impl ResidueField {
    fn build(place: &Place, caps: &Caps) -> Result<Self> {
        let (p, modulus) = match place {
            Place::OddPrime(p) => {
                let p = p.to_u64().filter(|&p| p <= caps.residue_field_order).ok_or_else(|| {
                    Error::CapExceeded(format!("residue field at {place} exceeds order cap {}", caps.residue_field_order))
                })?;
                (p, None)
            }
            Place::MonicIrreducible(f) => (f.characteristic(), Some(f.clone())),
            _ => return Err(Error::invalid(format!("place {place} has no tame residue field"))),
        };
        let degree = modulus.as_ref().map_or(1, |f| f.degree());
        let order = (p as u128).checked_pow(degree as u32).filter(|&q| q <= caps.residue_field_order as u128);
        let Some(order) = order.map(|q| q as u64) else {
            return Err(Error::CapExceeded(format!(
                "residue field at {place} exceeds order cap {}",
                caps.residue_field_order
            )));
        };
        let mul = |a: u64, b: u64| -> u64 {
            match &modulus {
                None => (a as u128 * b as u128 % p as u128) as u64,
                Some(m) => Poly::decode(p, a).mul(&Poly::decode(p, b)).rem(m).encode(),
            }
        };
        let power = |a: u64, e: u64| -> u64 {
            match &modulus {
                None => pow_mod(a, e, p),
                Some(m) => Poly::decode(p, a).pow_mod(e as u128, m).encode(),
            }
        };
        let ells = prime_divisors_u64(order - 1);
        let generator = (1..order)
            .find(|&g| power(g, order - 1) == 1 && ells.iter().all(|&l| power(g, (order - 1) / l) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut logs = vec![u32::MAX; order as usize];
        let mut x = 1u64;
        for k in 0..order - 1 {
            logs[x as usize] = k as u32;
            x = mul(x, generator);
        }
        debug_assert_eq!(x, 1);
        Ok(ResidueField { p, degree, modulus, order, generator, logs })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> Option<&Poly> {
        self.modulus.as_ref()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Order of the unit group, `q - 1`.
    pub fn unit_order(&self) -> u64 {
        self.order - 1
    }

    pub fn generator_code(&self) -> u64 {
        self.generator
    }

    pub fn generator(&self) -> Poly {
        Poly::decode(self.p, self.generator)
    }

    /// Log of `-1`: `(q-1)/2`, or 0 in characteristic 2.
    pub fn log_minus_one(&self) -> u64 {
        if self.p == 2 { 0 } else { (self.order - 1) / 2 }
    }

    /// Log of a nonzero residue given by its code.
    pub fn log_code(&self, code: u64) -> Option<u64> {
        self.logs.get(code as usize).filter(|&&l| l != u32::MAX).map(|&l| l as u64)
    }

    /// Log of an integer not divisible by the characteristic.
    pub fn log_integer(&self, n: &num_bigint::BigInt) -> Option<u64> {
        let r = n.mod_floor_u64(self.p);
        self.log_code(r)
    }

    /// Log of a polynomial coprime to the modulus.
    pub fn log_poly(&self, f: &Poly) -> Option<u64> {
        let m = self.modulus.as_ref()?;
        self.log_code(f.rem(m).encode())
    }
}

trait ModU64 {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModU64 for num_bigint::BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        use num_integer::Integer;
        self.mod_floor(&num_bigint::BigInt::from(p)).to_u64().unwrap()
    }
}

type Cache = Mutex<HashMap<Place, Arc<ResidueField>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// The residue field at a tame place, built once per process.
pub fn residue_field(place: &Place, caps: &Caps) -> Result<Arc<ResidueField>> {
    if let Some(rf) = cache().lock().unwrap().get(place) {
        if rf.order <= caps.residue_field_order {
            return Ok(rf.clone());
        }
        return Err(Error::CapExceeded(format!(
            "residue field at {place} exceeds order cap {}",
            caps.residue_field_order
        )));
    }
    let rf = Arc::new(ResidueField::build(place, caps)?);
    Ok(cache().lock().unwrap().entry(place.clone()).or_insert(rf).clone())
}

/// Log of the residue of a prime or monic irreducible at a different place.
fn log_of_place(rf: &ResidueField, other: &Place) -> u64 {
    match other {
        Place::Dyadic => rf.log_integer(&2.into()),
        Place::OddPrime(q) => rf.log_integer(&num_bigint::BigInt::from(q.clone())),
        Place::MonicIrreducible(f) => rf.log_poly(f),
        Place::RealSign => None,
    }
    .expect("distinct places have unit residues")
}

/// Discrete log of a unit with zero valuation at `place`, computed additively from its factorization.
pub fn residue_log(place: &Place, u: &UnitVector, caps: &Caps) -> Result<u64> {
    if !u.valuation(place).is_zero() {
        return Err(Error::invalid(format!("unit {u} has nonzero valuation at {place}")));
    }
    let rf = residue_field(place, caps)?;
    let n = rf.unit_order();
    let mut acc: u128 = match u.torsion() {
        Torsion::Sign(s) => if s < 0 { rf.log_minus_one() as u128 } else { 0 },
        Torsion::Lead(c) => rf.log_code(c).expect("nonzero constant") as u128,
    };
    for (pl, e) in u.exponents() {
        let l = log_of_place(&rf, pl) as u128;
        let e = e.mod_floor_u64(n) as u128;
        acc = (acc + l * e) % n as u128;
    }
    Ok((acc % n as u128) as u64)
}

/// Discrete log of a field element at a place where it is a unit.
pub fn residue_log_of_element(place: &Place, x: &FieldElement, caps: &Caps) -> Result<u64> {
    residue_log(place, &factor(x, caps)?, caps)
}

/// Smallest primitive root modulo a prime.
pub(crate) fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let ells = prime_divisors_u64(p - 1);
    (2..p).find(|&g| ells.iter().all(|&l| pow_mod(g, (p - 1) / l, p) != 1)).unwrap()
}

/// Exhaustive log of `c` base `g` in `F_p^×`.
pub(crate) fn discrete_log_mod_p(c: u64, g: u64, p: u64) -> u64 {
    let mut x = 1 % p;
    for k in 0..p.max(2) - 1 {
        if x == c % p {
            return k;
        }
        x = x * g % p;
    }
    panic!("{c} is not a power of {g} mod {p}")
}
