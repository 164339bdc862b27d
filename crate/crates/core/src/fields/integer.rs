//! Primality and factorization of arbitrary-precision integers.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Primes below 10^6, sieved once.
fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve(1_000_000))
}

pub fn sieve(limit: u32) -> Vec<u32> {
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

const WITNESSES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller–Rabin with the first 13 prime bases; deterministic below 3.3 * 10^24.
fn miller_rabin(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for &a in &WITNESSES {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Bound below which [`miller_rabin`] with the fixed bases is a proof.
fn certified_bound() -> BigUint {
    BigUint::parse_bytes(b"3317044064679887385961981", 10).unwrap()
}

/// Certified primality. Errors when `n` is a probable prime too large to certify.
pub fn is_prime(n: &BigUint) -> Result<bool> {
    if n < &BigUint::from(2u32) {
        return Ok(false);
    }
    for &p in small_primes().iter().take(200) {
        let p = BigUint::from(p);
        if n == &p {
            return Ok(true);
        }
        if (n % &p).is_zero() {
            return Ok(false);
        }
    }
    let probable = miller_rabin(n);
    if probable && n >= &certified_bound() {
        return Err(Error::FactorizationBound(format!("cannot certify primality of {n}")));
    }
    Ok(probable)
}

pub fn is_prime_u64(n: u64) -> bool {
    is_prime(&BigUint::from(n)).expect("u64 values are always certifiable")
}

/// Prime factorization `n = ∏ p^e` for `n >= 1`.
///
/// Trial division up to `trial_bound`, then Pollard rho on the cofactor; a
/// cofactor that resists is reported as an error rather than guessed.
pub fn factor(n: &BigUint, trial_bound: u64) -> Result<BTreeMap<BigUint, u32>> {
    let mut out = BTreeMap::new();
    if n.is_zero() {
        return Err(Error::invalid("cannot factor zero"));
    }
    let mut rest = n.clone();
    for &p in small_primes() {
        if u64::from(p) > trial_bound {
            break;
        }
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e > 0 {
            out.insert(pb, e);
        }
    }
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_prime(&m)? {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        if let Some(r) = m.sqrt().pow(2).eq(&m).then(|| m.sqrt()) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let d = pollard_rho(&m).ok_or_else(|| {
            Error::FactorizationBound(format!("Pollard rho could not split {m}"))
        })?;
        stack.push(&m / &d);
        stack.push(d);
    }
    Ok(out)
}

/// Brent's variant; returns a nontrivial divisor or `None` after the iteration budget.
fn pollard_rho(n: &BigUint) -> Option<BigUint> {
    if n.is_even() {
        return Some(BigUint::from(2u32));
    }
    const BUDGET: u64 = 1 << 20;
    for c in 1u32..=16 {
        let c = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut r = 1u64;
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut x = y.clone();
        let mut ys = y.clone();
        let mut steps = 0u64;
        while g.is_one() && steps < BUDGET {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0u64;
            while k < r && g.is_one() {
                ys = y.clone();
                for _ in 0..128.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = q * diff % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            steps += r;
            r *= 2;
        }
        if g == *n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Distinct prime divisors of a machine-size integer.
pub fn prime_divisors_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn to_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: u64) -> Vec<(u64, u32)> {
        factor(&BigUint::from(n), 1_000_000)
            .unwrap()
            .into_iter()
            .map(|(p, e)| (p.to_u64().unwrap(), e))
            .collect()
    }

    #[test]
    fn small_factorizations() {
        assert_eq!(fac(1), vec![]);
        assert_eq!(fac(12), vec![(2, 2), (3, 1)]);
        assert_eq!(fac(97), vec![(97, 1)]);
        assert_eq!(fac(1_000_003 * 1_000_033), vec![(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn rho_path_without_trial_division() {
        let n = 1_000_003u64 * 999_983;
        let got: Vec<_> = factor(&BigUint::from(n), 10).unwrap().into_iter().collect();
        assert_eq!(got.len(), 2);
        let sq = 1_000_003u64 * 1_000_003;
        let got = factor(&BigUint::from(sq), 10).unwrap();
        assert_eq!(got.get(&BigUint::from(1_000_003u64)), Some(&2));
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561));
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(3_215_031_751));
    }

    #[test]
    fn huge_probable_primes_are_refused() {
        // 2^89 - 1 is prime but beyond the certified range
        let m89 = (BigUint::one() << 89u32) - BigUint::one();
        assert!(is_prime(&m89).is_err());
    }

    #[test]
    fn divisors() {
        assert_eq!(prime_divisors_u64(8), vec![2]);
        assert_eq!(prime_divisors_u64(360), vec![2, 3, 5]);
    }
}
