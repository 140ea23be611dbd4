//! Dense matrices over a cyclotomic field, with exact rank.

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

use super::cyclo::{Cyclotomic, CycloError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch: {lr}x{lc} against {rr}x{rc}")]
    DimMismatch {
        lr: usize,
        lc: usize,
        rr: usize,
        rc: usize,
    },
}

/// Row-major matrix of [`Cyclotomic`] entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Cyclotomic>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize, order: u64) -> Self {
        ExactMatrix {
            rows,
            cols,
            entries: vec![Cyclotomic::zero(order); rows * cols],
        }
    }

    pub fn identity(n: usize, order: u64) -> Self {
        let mut m = Self::zeros(n, n, order);
        for i in 0..n {
            m.set(i, i, Cyclotomic::one(order));
        }
        m
    }

    pub fn scalar(value: Cyclotomic) -> Self {
        ExactMatrix {
            rows: 1,
            cols: 1,
            entries: vec![value],
        }
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Cyclotomic,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        ExactMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Cyclotomic {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Cyclotomic) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &Cyclotomic> {
        self.entries.iter()
    }

    /// Matrix product, skipping zero entries of the left factor (the
    /// structural matrices in this crate are mostly zeros, which makes the
    /// naive cubic loop behave closer to quadratically).
    pub fn mul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::DimMismatch {
                lr: self.rows,
                lc: self.cols,
                rr: rhs.rows,
                rc: rhs.cols,
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols, 8);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let t = a * b;
                    let cur = out.get(i, j);
                    out.set(i, j, cur + &t);
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; the left factor owns the most significant index bits.
    pub fn kron(&self, rhs: &Self) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Self::zeros(rows, cols, 8);
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self.get(ia, ja);
                if a.is_zero() {
                    continue;
                }
                for ib in 0..rhs.rows {
                    for jb in 0..rhs.cols {
                        let b = rhs.get(ib, jb);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(ia * rhs.rows + ib, ja * rhs.cols + jb, a * b);
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, c: &Cyclotomic) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(r)).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, MatrixError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(MatrixError::DimMismatch {
                lr: self.rows,
                lc: self.cols,
                rr: rhs.rows,
                rc: rhs.cols,
            });
        }
        Ok(ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Exact equality across possibly different field orders; `Ok(false)` on
    /// shape mismatch, `Err` only if the common order would exceed the cap.
    pub fn try_eq(&self, rhs: &Self) -> Result<bool, CycloError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Ok(false);
        }
        for (a, b) in self.entries.iter().zip(&rhs.entries) {
            if !a.try_equal(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_complex_vec(&self) -> Vec<Complex64> {
        self.entries.iter().map(Cyclotomic::to_complex).collect()
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a.to_complex() - b.to_complex()).norm())
            .fold(0.0, f64::max)
    }

    /// Exact rank by Gaussian elimination over the field (pivots are inverted
    /// exactly, so no tolerance is involved at any step).
    pub fn rank(&self) -> usize {
        let mut work: Vec<Vec<Cyclotomic>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let pivot = (rank..self.rows).find(|&r| !work[r][col].is_zero());
            let Some(p) = pivot else { continue };
            work.swap(rank, p);
            let inv = work[rank][col]
                .inverse()
                .expect("pivot is nonzero by construction");
            for r in rank + 1..self.rows {
                if work[r][col].is_zero() {
                    continue;
                }
                let factor = &work[r][col] * &inv;
                for c in col..self.cols {
                    if !work[rank][c].is_zero() {
                        let t = &factor * &work[rank][c];
                        work[r][c] = &work[r][c] - &t;
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

/// Exact rank of a matrix (free-function form of [`ExactMatrix::rank`]).
pub fn rank(m: &ExactMatrix) -> usize {
    m.rank()
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}
