//! Exact Gauss-Jordan elimination for linear systems whose entries are
//! polynomials in the parameters.
//!
//! Pivots must be nonzero rational constants, so every intermediate entry
//! stays a polynomial: no polynomial division ever happens. The telescoping
//! systems this crate builds are triangular with integer diagonal, which
//! always satisfies that requirement. Extra rows beyond the column count are
//! consistency constraints and must reduce to `0 = 0`.

use alloc::vec::Vec;

use num_traits::Zero;
use thiserror::Error;

use crate::exact::MultiPoly;

/// `matrix * x = rhs`, with `matrix` given row by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSystem {
    pub matrix: Vec<Vec<MultiPoly>>,
    pub rhs: Vec<MultiPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("matrix rows have inconsistent lengths or fewer rows than unknowns")]
    Shape,
    #[error("column {column} has no nonzero entry at or below the diagonal")]
    Singular { column: usize },
    #[error("column {column} has only non-constant pivot candidates")]
    NonConstantPivot { column: usize },
    #[error("row {row} reduces to 0 = {residual}")]
    Inconsistent { row: usize, residual: MultiPoly },
}

impl LinearSystem {
    pub fn unknowns(&self) -> usize {
        self.matrix.first().map_or(0, Vec::len)
    }

    /// Unique solution, or the reason none was found.
    pub fn solve(&self) -> Result<Vec<MultiPoly>, SolveError> {
        let cols = self.unknowns();
        let rows = self.matrix.len();
        if rows < cols || self.rhs.len() != rows || self.matrix.iter().any(|r| r.len() != cols) {
            return Err(SolveError::Shape);
        }
        let mut aug: Vec<Vec<MultiPoly>> = self
            .matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let mut r = row.clone();
                r.push(b.clone());
                r
            })
            .collect();

        for col in 0..cols {
            let pivot = (col..rows).find(|&r| {
                aug[r][col]
                    .as_constant()
                    .is_some_and(|c| !c.is_zero())
            });
            let Some(pivot) = pivot else {
                return Err(if (col..rows).any(|r| !aug[r][col].is_zero()) {
                    SolveError::NonConstantPivot { column: col }
                } else {
                    SolveError::Singular { column: col }
                });
            };
            aug.swap(col, pivot);
            let inv = aug[col][col].as_constant().expect("constant pivot").recip();
            for entry in aug[col].iter_mut().skip(col) {
                *entry = entry.scale(&inv);
            }
            let pivot_row = aug[col].clone();
            for (r, row) in aug.iter_mut().enumerate() {
                if r == col || row[col].is_zero() {
                    continue;
                }
                let factor = row[col].clone();
                for (entry, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                    if !p.is_zero() {
                        *entry = &*entry - &(&factor * p);
                    }
                }
            }
        }

        if let Some((row, r)) = aug
            .iter()
            .enumerate()
            .skip(cols)
            .find(|(_, r)| !r[cols].is_zero())
        {
            return Err(SolveError::Inconsistent {
                row,
                residual: r[cols].clone(),
            });
        }
        Ok(aug.into_iter().take(cols).map(|mut r| r.pop().unwrap()).collect())
    }
}
