//! Archimedean and dyadic Hilbert symbols over `Q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Split `x = 2^alpha * u` and return `(alpha, u mod 8)`.
fn dyadic_split(x: &BigRational) -> (i64, u8) {
    let mut alpha = 0i64;
    let mut unit = BigInt::from(1);
    for (part, sgn) in [(x.numer(), 1i64), (x.denom(), -1)] {
        let tz = part.magnitude().trailing_zeros().unwrap_or(0) as i64;
        alpha += sgn * tz;
        // 1/d and d agree mod 8 for odd d
        unit *= part >> tz as usize;
    }
    (alpha, unit.mod_floor(&BigInt::from(8)).to_u8().unwrap())
}

fn eps(u: u8) -> u8 {
    ((u - 1) / 2) & 1
}

fn omega(u: u8) -> u8 {
    (((u as u32 * u as u32 - 1) / 8) & 1) as u8
}

/// The 2-adic Hilbert symbol `(a, b)_2` as `±1`.
pub fn hilbert_dyadic(a: &BigRational, b: &BigRational) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("Hilbert symbol of zero"));
    }
    let (alpha, u) = dyadic_split(a);
    let (beta, v) = dyadic_split(b);
    let e = eps(u) * eps(v) + ((alpha & 1) as u8) * omega(v) + ((beta & 1) as u8) * omega(u);
    Ok(if e & 1 == 1 { -1 } else { 1 })
}

/// The real symbol: `-1` iff both arguments are negative.
pub fn real_symbol(a: &BigRational, b: &BigRational) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("real symbol of zero"));
    }
    Ok(if a.is_negative() && b.is_negative() { -1 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn examples() {
        assert_eq!(hilbert_dyadic(&q(-1, 1), &q(-1, 1)).unwrap(), -1);
        assert_eq!(hilbert_dyadic(&q(2, 1), &q(-1, 1)).unwrap(), 1);
        assert_eq!(hilbert_dyadic(&q(3, 1), &q(-2, 1)).unwrap(), 1);
        assert_eq!(hilbert_dyadic(&q(2, 1), &q(3, 1)).unwrap(), -1);
        assert_eq!(hilbert_dyadic(&q(1, 1), &q(-7, 12)).unwrap(), 1);
        assert!(hilbert_dyadic(&q(0, 1), &q(3, 1)).is_err());
        assert_eq!(real_symbol(&q(-1, 1), &q(-1, 1)).unwrap(), -1);
        assert_eq!(real_symbol(&q(-1, 1), &q(2, 1)).unwrap(), 1);
        assert_eq!(real_symbol(&q(-3, 1), &q(-5, 1)).unwrap(), -1);
    }

    fn nonzero() -> impl Strategy<Value = BigRational> {
        (-500i64..500, 1i64..200).prop_filter("nonzero", |(n, _)| *n != 0).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn symmetric_and_bimultiplicative(a in nonzero(), b in nonzero(), c in nonzero()) {
            let h = |x: &BigRational, y: &BigRational| hilbert_dyadic(x, y).unwrap();
            prop_assert_eq!(h(&a, &b), h(&b, &a));
            prop_assert_eq!(h(&(&a * &b), &c), h(&a, &c) * h(&b, &c));
            prop_assert_eq!(h(&a, &(-&a)), 1);
        }
    }
}
