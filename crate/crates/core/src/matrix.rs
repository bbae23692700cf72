//! Square matrices of arbitrary-precision nonnegative integers.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix has no rows")]
    Empty,
    #[error("row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("entry ({row}, {col}) is not a nonnegative decimal integer: {text:?}")]
    BadEntry { row: usize, col: usize, text: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    dim: usize,
    entries: Vec<BigUint>,
}

/// One JSON matrix cell: a decimal string, or a plain JSON integer.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Int(u64),
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigUint>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != dim {
                return Err(MatrixError::NotSquare {
                    row,
                    len: r.len(),
                    dim,
                });
            }
            entries.extend(r);
        }
        Ok(IntMatrix { dim, entries })
    }

    pub fn from_u64(rows: &[&[u64]]) -> Result<Self, MatrixError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigUint::from(x)).collect())
                .collect(),
        )
    }

    pub fn from_cells(rows: &[Vec<Cell>]) -> Result<Self, MatrixError> {
        let parsed = rows
            .iter()
            .enumerate()
            .map(|(row, r)| {
                r.iter()
                    .enumerate()
                    .map(|(col, c)| match c {
                        Cell::Int(x) => Ok(BigUint::from(*x)),
                        Cell::Text(t) => {
                            let t = t.trim();
                            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                                return Err(MatrixError::BadEntry {
                                    row,
                                    col,
                                    text: t.to_string(),
                                });
                            }
                            Ok(t.parse::<BigUint>().expect("digits checked"))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(parsed)
    }

    /// Decimal-string rows, the on-disk form.
    pub fn to_cells(&self) -> Vec<Vec<String>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = IntMatrix {
            dim,
            entries: vec![BigUint::zero(); dim * dim],
        };
        for i in 0..dim {
            m.entries[i * dim + i] = BigUint::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// 0-based entry.
    pub fn get(&self, i: usize, j: usize) -> &BigUint {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[BigUint] {
        &self.entries
    }

    pub fn max_entry(&self) -> BigUint {
        self.entries.iter().max().cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        let d = self.dim;
        let mut entries = vec![BigUint::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        entries[i * d + j] += a * b;
                    }
                }
            }
        }
        IntMatrix { dim: d, entries }
    }

    pub fn pow(&self, mut e: u64) -> IntMatrix {
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> BigUint {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entries as floats, for spectral estimates.
    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.get(i, j).to_f64().unwrap_or(f64::INFINITY))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .to_cells()
            .into_iter()
            .map(|r| format!("[{}]", r.join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}
