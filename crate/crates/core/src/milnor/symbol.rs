use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fields::{factor, parse_element, Field, UnitVector};

/// `{u_1, ..., u_m}` with nonzero entries from one field.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MilnorSymbol {
    field: Field,
    entries: Vec<UnitVector>,
}

impl MilnorSymbol {
    pub fn new(field: Field, entries: Vec<UnitVector>) -> Result<Self> {
        if let Some(u) = entries.iter().find(|u| u.field() != field) {
            return Err(Error::invalid(format!("entry {u} is not in {field}")));
        }
        Ok(MilnorSymbol { field, entries })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[UnitVector] {
        &self.entries
    }

    /// `{u, self...}`.
    pub fn prepend(&self, u: &UnitVector) -> Result<Self> {
        let mut entries = Vec::with_capacity(self.entries.len() + 1);
        entries.push(u.clone());
        entries.extend(self.entries.iter().cloned());
        MilnorSymbol::new(self.field, entries)
    }
}

impl fmt::Display for MilnorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|u| u.to_element().to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A formal integer combination of symbols of one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilnorExpression {
    field: Field,
    degree: usize,
    terms: Vec<(BigInt, MilnorSymbol)>,
}

impl MilnorExpression {
    pub fn zero(field: Field, degree: usize) -> Self {
        MilnorExpression { field, degree, terms: Vec::new() }
    }

    pub fn from_terms(field: Field, degree: usize, terms: Vec<(BigInt, MilnorSymbol)>) -> Result<Self> {
        for (_, s) in &terms {
            if s.field() != field || s.degree() != degree {
                return Err(Error::invalid(format!("symbol {s} does not have degree {degree} over {field}")));
            }
        }
        Ok(MilnorExpression { field, degree, terms })
    }

    pub fn symbol(s: MilnorSymbol) -> Self {
        MilnorExpression { field: s.field(), degree: s.degree(), terms: vec![(BigInt::one(), s)] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[(BigInt, MilnorSymbol)] {
        &self.terms
    }

    pub fn push(&mut self, k: BigInt, s: MilnorSymbol) -> Result<()> {
        if s.field() != self.field || s.degree() != self.degree {
            return Err(Error::invalid("mixed degrees or fields in one expression"));
        }
        if !k.is_zero() {
            self.terms.push((k, s));
        }
        Ok(())
    }

    pub fn add(&self, other: &MilnorExpression) -> Result<Self> {
        let mut out = self.clone();
        for (k, s) in &other.terms {
            out.push(k.clone(), s.clone())?;
        }
        Ok(out)
    }
}

impl fmt::Display for MilnorExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, s)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if k.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "{k}*{s}")?;
            }
        }
        Ok(())
    }
}

/// Parse `{a, b, c}`; entries use the field-element syntax and must agree on the field.
pub fn parse_symbol(s: &str, default: Option<Field>, caps: &Caps) -> Result<MilnorSymbol> {
    let body = s
        .trim()
        .strip_prefix('{')
        .and_then(|x| x.strip_suffix('}'))
        .ok_or_else(|| Error::invalid(format!("symbol '{s}' must be written as {{a, b, ...}}")))?;
    // a trailing field suffix applies to every entry
    let (body, default) = match body.rsplit_once('@') {
        Some((b, suffix)) if !suffix.contains(',') => {
            let f = parse_element(&format!("1@{suffix}"), None)?.field();
            (b, Some(f))
        }
        _ => (body, default),
    };
    let items: Vec<&str> = body.split(',').map(str::trim).filter(|x| !x.is_empty()).collect();
    let mut entries = Vec::new();
    let mut field = default;
    for item in items {
        let x = parse_element(item, field)?;
        field = Some(x.field());
        entries.push(factor(&x, caps)?);
    }
    MilnorSymbol::new(field.unwrap_or(Field::Rational), entries)
}

/// Parse `2*{a, b} - {c, d} + ...`.
pub fn parse_expression(s: &str, default: Option<Field>, caps: &Caps) -> Result<MilnorExpression> {
    let mut terms = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let mut sign = BigInt::one();
    let chars: Vec<(usize, char)> = s.char_indices().collect();
    for &(i, ch) in &chars {
        match ch {
            '{' => depth += 1,
            '}' => depth -= 1,
            '+' | '-' if depth == 0 => {
                if !s[start..i].trim().is_empty() {
                    terms.push((sign.clone(), &s[start..i]));
                }
                sign = if ch == '-' { -BigInt::one() } else { BigInt::one() };
                start = i + 1;
            }
            _ => {}
        }
    }
    terms.push((sign, &s[start..]));
    let mut out: Option<MilnorExpression> = None;
    let mut field = default;
    for (sign, t) in terms {
        let t = t.trim();
        let (k, sym) = match t.split_once('*') {
            Some((k, rest)) if !k.contains('{') => {
                (k.trim().parse::<BigInt>().map_err(|_| Error::invalid(format!("bad coefficient in '{t}'")))?, rest)
            }
            _ => (BigInt::one(), t),
        };
        let sym = parse_symbol(sym, field, caps)?;
        field = Some(sym.field());
        let e = out.get_or_insert_with(|| MilnorExpression::zero(sym.field(), sym.degree()));
        e.push(sign * k, sym)?;
    }
    out.ok_or_else(|| Error::invalid("empty expression"))
}
