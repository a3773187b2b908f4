use std::collections::BTreeMap;
use std::fmt;

use super::coeff::Coeff;
use super::laurent::{DegreePair, LaurentPoly};
use super::PolyError;

/// Dense row-major matrix of Laurent polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<LaurentPoly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: vec![LaurentPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for k in 0..n {
            m.set(k, k, LaurentPoly::one());
        }
        m
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<LaurentPoly>) -> Result<Self, PolyError> {
        if entries.len() != rows * cols {
            return Err(PolyError::DimensionMismatch {
                left: (rows, cols),
                right: (entries.len(), 1),
            });
        }
        Ok(PolyMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Result<Self, PolyError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(PolyError::Ragged);
        }
        Ok(PolyMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &LaurentPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, p: LaurentPoly) {
        self.entries[r * self.cols + c] = p;
    }

    pub fn entries(&self) -> &[LaurentPoly] {
        &self.entries
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_exact)
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix, PolyError> {
        if self.cols != other.rows {
            return Err(PolyError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (other.rows, other.cols),
            });
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = &out.entries[idx] + &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; `self`'s index is the more significant one.
    pub fn kron(&self, other: &PolyMatrix) -> PolyMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = PolyMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + k, j * other.cols + l, a * b);
                    }
                }
            }
        }
        out
    }

    /// Componentwise maximum of the entries' degree pairs.
    pub fn degree(&self, var: &str) -> DegreePair {
        self.entries
            .iter()
            .fold(DegreePair::ZERO_POLY, |acc, p| acc.join(p.degree(var)))
    }

    pub fn map(&self, f: impl Fn(&LaurentPoly) -> LaurentPoly) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn quotient_reduce(&self, var: &str, order: u32) -> PolyMatrix {
        self.map(|p| p.quotient_reduce(var, order))
    }

    /// Evaluate every entry.
    pub fn eval(&self, assignment: &BTreeMap<String, Coeff>) -> Result<Vec<Coeff>, PolyError> {
        self.entries.iter().map(|p| p.eval(assignment)).collect()
    }

    pub fn approx_eq(&self, other: &PolyMatrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .entries
                .iter()
                .zip(&other.entries)
                .all(|(a, b)| a.approx_eq(b, tol))
    }
}

impl fmt::Display for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
