//! Small dense matrices over truncated series.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::Context;
use crate::series::{Series, Valuation};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Series>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<Series>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if r == 0 || c == 0 || rows.iter().any(|x| x.len() != c) {
            return Err(Error::InvalidParameter("ragged or empty matrix".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn zero(ctx: &Arc<Context>, rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: (0..rows * cols).map(|_| Series::zero(ctx)).collect() }
    }

    pub fn identity(ctx: &Arc<Context>, n: usize) -> Matrix {
        Matrix::scalar(ctx, n, &Series::one(ctx))
    }

    /// s times the n x n identity.
    pub fn scalar(ctx: &Arc<Context>, n: usize, s: &Series) -> Matrix {
        let mut m = Matrix::zero(ctx, n, n);
        for i in 0..n {
            m.data[i * n + i] = s.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Series {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Series) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[Series] {
        &self.data
    }

    fn zip(&self, other: &Matrix, f: impl Fn(&Series, &Series) -> Series) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.zip(other, Series::add)
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.zip(other, Series::sub)
    }

    pub fn map(&self, f: impl FnMut(&Series) -> Series) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl FnMut(&Series) -> Result<Series>) -> Result<Matrix> {
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn scale(&self, s: &Series) -> Matrix {
        self.map(|a| a.mul(s))
    }

    /// Entrywise a^q.
    pub fn frob(&self) -> Matrix {
        self.map(Series::frob)
    }

    pub fn frob_pow(&self, k: u32) -> Matrix {
        self.map(|a| a.frob_pow(k))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let ctx = self.data[0].ctx();
        let mut out = Matrix::zero(ctx, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Series::zero(ctx);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_exact_zero() || b.is_exact_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Smallest entry valuation (the max-norm in multiplicative form).
    pub fn valuation(&self) -> Valuation {
        self.data.iter().map(|a| a.valuation_bound()).min().unwrap_or(Valuation::Infinite)
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn diagonal(&self) -> Vec<Series> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn eq_to_precision(&self, other: &Matrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.eq_to_precision(b))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Series::is_zero)
    }
}
