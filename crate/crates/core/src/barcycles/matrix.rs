use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// An invertible `n x n` matrix over `Q`, row-major.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QMatrix {
    n: usize,
    entries: Vec<BigRational>,
    det: BigRational,
}

impl QMatrix {
    pub fn new(n: usize, entries: Vec<BigRational>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::invalid(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        let det = determinant(n, &entries);
        if det.is_zero() {
            return Err(Error::invalid("matrix is singular"));
        }
        Ok(QMatrix { n, entries, det })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| BigRational::from_integer(x.into()))).collect();
        Self::new(n, entries)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![BigRational::one(); n]).expect("identity is invertible")
    }

    pub fn diagonal(d: &[BigRational]) -> Result<Self> {
        let n = d.len();
        let mut entries = vec![BigRational::zero(); n * n];
        for (i, x) in d.iter().enumerate() {
            entries[i * n + i] = x.clone();
        }
        Self::new(n, entries)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.n + j]
    }

    pub fn determinant(&self) -> &BigRational {
        &self.det
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.n, o.n, "matrix sizes differ");
        let n = self.n;
        let mut entries = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        QMatrix { n, entries, det: &self.det * &o.det }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diagonal_entries(&self) -> Vec<BigRational> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    /// Row-major JSON of rational strings.
    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.n)
                .map(|i| Value::Array((0..self.n).map(|j| Value::String(self.get(i, j).to_string())).collect()))
                .collect(),
        )
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_diagonal() {
            let d: Vec<String> = self.diagonal_entries().iter().map(|x| x.to_string()).collect();
            write!(f, "diag({})", d.join(", "))
        } else {
            write!(f, "{}", self.to_json())
        }
    }
}

/// Fraction-free enough for small sizes: plain Gaussian elimination over `Q`.
fn determinant(n: usize, entries: &[BigRational]) -> BigRational {
    let mut a = entries.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            for j in 0..n {
                a.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let piv = a[c * n + c].clone();
        det *= &piv;
        for r in c + 1..n {
            let f = &a[r * n + c] / &piv;
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let sub = &f * &a[c * n + j];
                a[r * n + j] -= sub;
            }
        }
    }
    det
}
