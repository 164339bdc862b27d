//! Seeded generators for field elements, units, tori and matrices.

use kmilnor::barcycles::{QMatrix, TorusElement};
use kmilnor::config::Caps;
use kmilnor::fields::{factor, Field, FieldElement, Poly, UnitVector};
use kmilnor::Result;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

/// Nonzero `n/d` with `|n|, d <= height`.
pub fn rational<R: Rng>(rng: &mut R, height: i64) -> BigRational {
    let mut n = 0;
    while n == 0 {
        n = rng.gen_range(-height..=height);
    }
    BigRational::new(n.into(), rng.gen_range(1..=height).into())
}

fn poly<R: Rng>(rng: &mut R, p: u64, max_degree: usize) -> Poly {
    loop {
        let d = rng.gen_range(0..=max_degree);
        let f = Poly::new(p, (0..=d).map(|_| rng.gen_range(0..p)).collect());
        if !f.is_zero() {
            return f;
        }
    }
}

/// Nonzero element: height-bounded rational, or a ratio of low-degree polynomials.
pub fn element<R: Rng>(rng: &mut R, field: Field, height: i64) -> FieldElement {
    match field {
        Field::Rational => FieldElement::Rational(rational(rng, height)),
        Field::FunctionField(p) => FieldElement::Function { num: poly(rng, p, 3), den: poly(rng, p, 2) },
    }
}

/// Element outside `{0, 1}`.
pub fn non_trivial_element<R: Rng>(rng: &mut R, field: Field, height: i64) -> FieldElement {
    loop {
        let a = element(rng, field, height);
        if !a.equals(&FieldElement::one(field)) {
            return a;
        }
    }
}

/// A unit supported on `{-1, 2, 3, 5, 7}` (or on `t, t+1` over `F_p(t)`), small exponents.
pub fn small_unit<R: Rng>(rng: &mut R, field: Field, caps: &Caps) -> Result<UnitVector> {
    let x = match field {
        Field::Rational => {
            let mut num = BigInt::from(if rng.gen_bool(0.5) { -1 } else { 1 });
            let mut den = BigInt::from(1);
            for p in [2u32, 3, 5, 7] {
                let e: i32 = rng.gen_range(-2..=2);
                if e > 0 {
                    num *= BigInt::from(p).pow(e as u32);
                } else {
                    den *= BigInt::from(p).pow((-e) as u32);
                }
            }
            FieldElement::Rational(BigRational::new(num, den))
        }
        Field::FunctionField(p) => {
            let mut num = Poly::constant(p, rng.gen_range(1..p));
            let mut den = Poly::one(p);
            for f in [Poly::t(p), Poly::new(p, vec![1, 1])] {
                let e: i32 = rng.gen_range(-2..=2);
                for _ in 0..e.unsigned_abs() {
                    if e > 0 {
                        num = num.mul(&f);
                    } else {
                        den = den.mul(&f);
                    }
                }
            }
            FieldElement::Function { num, den }
        }
    };
    factor(&x, caps)
}

pub fn torus<R: Rng>(rng: &mut R, field: Field, rank: usize, caps: &Caps) -> Result<TorusElement> {
    TorusElement::new(field, (0..rank).map(|_| small_unit(rng, field, caps)).collect::<Result<_>>()?)
}

/// Invertible `n x n` matrix with entries in `-3..=3`.
pub fn gl_matrix<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    loop {
        let e = (0..n * n).map(|_| BigRational::from_integer(rng.gen_range(-3i64..=3).into())).collect();
        if let Ok(m) = QMatrix::new(n, e) {
            return m;
        }
    }
}

/// Diagonal `n x n` matrix with small rational entries.
pub fn diagonal_matrix<R: Rng>(rng: &mut R, n: usize) -> QMatrix {
    let d: Vec<BigRational> = (0..n).map(|_| rational(rng, 6)).collect();
    QMatrix::diagonal(&d).expect("nonzero diagonal")
}
