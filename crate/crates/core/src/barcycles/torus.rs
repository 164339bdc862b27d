use std::fmt;

use num_rational::BigRational;
use serde_json::Value;

use super::QMatrix;
use crate::config::Caps;
use crate::error::{Error, Result};
use crate::fields::{factor, Field, FieldElement, UnitVector};

/// A point of the split torus `(F^×)^k`, i.e. a diagonal matrix given by factored entries.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TorusElement {
    field: Field,
    coords: Vec<UnitVector>,
}

impl TorusElement {
    pub fn new(field: Field, coords: Vec<UnitVector>) -> Result<Self> {
        if let Some(u) = coords.iter().find(|u| u.field() != field) {
            return Err(Error::invalid(format!("coordinate {u} is not in {field}")));
        }
        Ok(TorusElement { field, coords })
    }

    pub fn identity(field: Field, rank: usize) -> Self {
        TorusElement { field, coords: vec![UnitVector::one(field); rank] }
    }

    /// `u` repeated `rank` times.
    pub fn scalar(u: &UnitVector, rank: usize) -> Self {
        TorusElement { field: u.field(), coords: vec![u.clone(); rank] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[UnitVector] {
        &self.coords
    }

    pub fn mul(&self, o: &TorusElement) -> TorusElement {
        assert_eq!(self.rank(), o.rank(), "torus ranks differ");
        TorusElement { field: self.field, coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a.mul(b)).collect() }
    }

    /// `diag(self, tail...)`.
    pub fn extend(&self, tail: &[UnitVector]) -> TorusElement {
        let mut coords = self.coords.clone();
        coords.extend_from_slice(tail);
        TorusElement { field: self.field, coords }
    }

    /// The diagonal matrix, for `Q`.
    pub fn to_qmatrix(&self) -> Result<QMatrix> {
        let d = self
            .coords
            .iter()
            .map(|u| match u.to_element() {
                FieldElement::Rational(q) => Ok(q),
                _ => Err(Error::invalid("only rational tori have matrix form")),
            })
            .collect::<Result<Vec<BigRational>>>()?;
        QMatrix::diagonal(&d)
    }

    /// Project a diagonal rational matrix to the torus; other matrices are rejected.
    pub fn from_qmatrix(m: &QMatrix, caps: &Caps) -> Result<TorusElement> {
        if !m.is_diagonal() {
            return Err(Error::invalid("matrix is not diagonal, so it has no torus projection"));
        }
        let coords = m
            .diagonal_entries()
            .into_iter()
            .map(|q| factor(&FieldElement::Rational(q), caps))
            .collect::<Result<Vec<_>>>()?;
        TorusElement::new(Field::Rational, coords)
    }

    pub fn to_json(&self) -> Value {
        Value::Object(
            [("diag".to_string(), Value::Array(self.coords.iter().map(|u| Value::String(u.to_element().to_string())).collect()))]
                .into_iter()
                .collect(),
        )
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.coords.iter().map(|u| u.to_element().to_string()).collect();
        write!(f, "diag({})", d.join(", "))
    }
}
