use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

use super::Vector;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        check_dim(rows * cols, data.len())?;
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            check_dim(cols, r.len())?;
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `A v`.
    pub fn mul_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        check_dim(self.cols, v.len())?;
        let x = v.as_slice();
        Ok(Vector::from_vec_unchecked(
            (0..self.rows)
                .map(|r| self.row(r).iter().zip(x).map(|(&a, &b)| a * b).sum())
                .collect(),
        ))
    }

    /// `Aᵀ v`.
    pub fn mul_transpose_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        check_dim(self.rows, v.len())?;
        let mut out = vec![T::zero(); self.cols];
        for (r, &vr) in v.iter().enumerate() {
            if vr == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o = *o + a * vr;
            }
        }
        Ok(Vector::from_vec_unchecked(out))
    }

    /// Largest singular value by power iteration on `AᵀA`.
    pub fn spectral_norm(&self) -> T {
        if self.rows == 0 || self.cols == 0 || self.data.iter().all(|&v| v == T::zero()) {
            return T::zero();
        }
        // Deterministic, non-symmetric start so no singular direction is missed by construction.
        let mut v = Vector::from_fn(self.cols, |i| {
            T::one() + T::of(((i * 7919) % 13) as f64 / 13.0)
        });
        let n = v.norm();
        v = v.scale(T::one() / n);
        let mut sigma = T::zero();
        for _ in 0..20_000 {
            let av = self.mul_vec(&v).expect("shape checked");
            let w = self.mul_transpose_vec(&av).expect("shape checked");
            let wn = w.norm();
            if wn == T::zero() {
                return T::zero();
            }
            let next = wn.sqrt();
            v = w.scale(T::one() / wn);
            if (next - sigma).abs() <= T::epsilon() * next {
                sigma = next;
                break;
            }
            sigma = next;
        }
        sigma
    }

    /// Solves `A x = b` by LU with partial pivoting.
    pub fn solve(&self, b: &Vector<T>) -> Result<Vector<T>> {
        check_dim(self.rows, self.cols)?;
        check_dim(self.rows, b.len())?;
        let n = self.rows;
        let mut a = self.data.clone();
        let mut x = b.as_slice().to_vec();
        for k in 0..n {
            let (piv, max) = (k..n)
                .map(|r| (r, a[r * n + k].abs()))
                .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if max == T::zero() {
                return Err(Error::Singular(format!("zero pivot in column {k}")));
            }
            if piv != k {
                for c in 0..n {
                    a.swap(k * n + c, piv * n + c);
                }
                x.swap(k, piv);
            }
            let pivot = a[k * n + k];
            for r in (k + 1)..n {
                let factor = a[r * n + k] / pivot;
                if factor == T::zero() {
                    continue;
                }
                a[r * n + k] = T::zero();
                for c in (k + 1)..n {
                    a[r * n + c] = a[r * n + c] - factor * a[k * n + c];
                }
                x[r] = x[r] - factor * x[k];
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for c in (k + 1)..n {
                acc = acc - a[k * n + c] * x[c];
            }
            x[k] = acc / a[k * n + k];
        }
        Vector::new(x).map_err(|_| Error::Singular("non-finite solution".into()))
    }
}
