//! Text syntax: `-12/5` for `Q`, `(2*t^2+2*t)/(t^2+1)@p=3` for `F_p(t)`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{Field, FieldElement, Place, Poly, Support};
use crate::error::{Error, Result};

/// Split off an `@p=N` suffix.
fn split_field(s: &str, default: Option<Field>) -> Result<(&str, Field)> {
    match s.rsplit_once('@') {
        Some((body, suffix)) => {
            let p = suffix
                .trim()
                .strip_prefix("p=")
                .and_then(|p| p.trim().parse::<u64>().ok())
                .ok_or_else(|| Error::invalid(format!("bad field suffix '@{suffix}'")))?;
            if !super::integer::is_prime_u64(p) {
                return Err(Error::invalid(format!("{p} is not prime")));
            }
            let field = Field::FunctionField(p);
            if let Some(d) = default {
                if d != field {
                    return Err(Error::invalid(format!("'{s}' is not in {d}")));
                }
            }
            Ok((body.trim(), field))
        }
        None => Ok((s.trim(), default.unwrap_or(Field::Rational))),
    }
}

/// Parse a polynomial in `t` with integer coefficients reduced mod `p`.
pub(crate) fn parse_poly(s: &str, p: u64) -> Result<Poly> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let s = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(&s);
    if s.is_empty() {
        return Err(Error::invalid("empty polynomial"));
    }
    let bad = || Error::invalid(format!("cannot parse polynomial '{s}'"));
    let mut coeffs: Vec<u64> = Vec::new();
    let mut terms: Vec<(bool, &str)> = Vec::new();
    let mut start = 0;
    let mut neg = false;
    for (i, ch) in s.char_indices() {
        if (ch == '+' || ch == '-') && i > 0 {
            terms.push((neg, &s[start..i]));
            start = i + 1;
            neg = ch == '-';
        } else if ch == '-' && i == 0 {
            neg = true;
            start = 1;
        } else if ch == '+' && i == 0 {
            start = 1;
        }
    }
    terms.push((neg, &s[start..]));
    for (neg, term) in terms {
        if term.is_empty() {
            return Err(bad());
        }
        let (coef, power) = match term.find('t') {
            None => (term, 0usize),
            Some(k) => {
                let c = term[..k].strip_suffix('*').unwrap_or(&term[..k]);
                let c = if c.is_empty() { "1" } else { c };
                let rest = &term[k + 1..];
                let e = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').and_then(|e| e.parse::<usize>().ok()).ok_or_else(bad)?
                };
                (c, e)
            }
        };
        let c: BigInt = coef.parse().map_err(|_| bad())?;
        let c = if neg { -c } else { c };
        let c = c.mod_floor(&BigInt::from(p)).to_u64().unwrap();
        if coeffs.len() <= power {
            coeffs.resize(power + 1, 0);
        }
        coeffs[power] = (coeffs[power] + c) % p;
    }
    Ok(Poly::new(p, coeffs))
}

/// Parse a field element; `default` picks the field when no `@p=` suffix is present.
pub fn parse_element(s: &str, default: Option<Field>) -> Result<FieldElement> {
    let (body, field) = split_field(s, default)?;
    let x = match field {
        Field::Rational => {
            let body: String = body.chars().filter(|c| !c.is_whitespace()).collect();
            let q = match body.split_once('/') {
                Some((n, d)) => {
                    let n: BigInt = n.trim_start_matches('+').parse().map_err(|_| Error::invalid(format!("bad rational '{s}'")))?;
                    let d: BigInt = d.parse().map_err(|_| Error::invalid(format!("bad rational '{s}'")))?;
                    if d.is_zero() {
                        return Err(Error::invalid("zero denominator"));
                    }
                    BigRational::new(n, d)
                }
                None => BigRational::from_integer(
                    body.trim_start_matches('+').parse().map_err(|_| Error::invalid(format!("bad rational '{s}'")))?,
                ),
            };
            FieldElement::Rational(q)
        }
        Field::FunctionField(p) => {
            let (num, den) = split_fraction(body);
            let num = parse_poly(num, p)?;
            let den = match den {
                Some(d) => parse_poly(d, p)?,
                None => Poly::one(p),
            };
            if den.is_zero() {
                return Err(Error::invalid("zero denominator"));
            }
            FieldElement::Function { num, den }
        }
    };
    if x.is_zero() {
        return Err(Error::invalid("zero is not a unit"));
    }
    Ok(x)
}

/// Split `A/B` at the top-level slash.
fn split_fraction(s: &str) -> (&str, Option<&str>) {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return (&s[..i], Some(&s[i + 1..])),
            _ => {}
        }
    }
    (s, None)
}

/// Parse a support: `-1,2,3,5` over `Q` (the sign is always present) or `t,t+1@p=3`.
pub fn parse_support(s: &str, default: Option<Field>) -> Result<Support> {
    let (body, field) = split_field(s, default)?;
    let items = body.split(',').map(str::trim).filter(|x| !x.is_empty());
    let mut places = Vec::new();
    for item in items {
        match field {
            Field::Rational => {
                if item == "-1" {
                    continue;
                }
                let n: BigUint = item.parse().map_err(|_| Error::invalid(format!("bad prime '{item}'")))?;
                places.push(Place::odd_prime(n)?);
            }
            Field::FunctionField(p) => places.push(Place::monic_irreducible(parse_poly(item, p)?)?),
        }
    }
    Support::new(field, places)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polys() {
        assert_eq!(parse_poly("2*t^2+2*t", 3).unwrap(), Poly::new(3, vec![0, 2, 2]));
        assert_eq!(parse_poly("t^2 - 1", 3).unwrap(), Poly::new(3, vec![2, 0, 1]));
        assert_eq!(parse_poly("-t", 5).unwrap(), Poly::new(5, vec![0, 4]));
        assert_eq!(parse_poly("7", 5).unwrap(), Poly::new(5, vec![2]));
        assert!(parse_poly("t^", 5).is_err());
        assert!(parse_poly("x+1", 5).is_err());
    }

    #[test]
    fn elements_round_trip() {
        for s in ["-12/5", "3", "(2*t^2+2*t)/(t^2+1)@p=3", "t+1@p=2"] {
            let x = parse_element(s, None).unwrap();
            let y = parse_element(&x.to_string(), None).unwrap();
            assert!(x.equals(&y), "{s}");
        }
        assert!(parse_element("0", None).is_err());
        assert!(parse_element("1/0", None).is_err());
        assert!(parse_element("t@p=4", None).is_err());
    }

    #[test]
    fn supports() {
        let s = parse_support("-1,3,2", None).unwrap();
        assert_eq!(s.to_string(), "-1,2,3");
        assert!(parse_support("4", None).is_err());
        assert!(parse_support("t^2+1@p=2", None).is_err());
        let f = parse_support("t^2+1,t@p=3", None).unwrap();
        assert_eq!(f.to_string(), "t,t^2+1@p=3");
    }
}
