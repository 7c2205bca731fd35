//! LU factorization with partial pivoting for square complex matrices.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{cone, czero, Real};

#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    rcond: T,
}

impl<T: Real> Lu<T> {
    /// Factors `P A = L U`; exact zero pivots give `rcond == 0`.
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        if n == 0 {
            return Err(Error::EmptyMatrix);
        }
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut singular = false;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| {
                    lu[(i, k)]
                        .norm()
                        .partial_cmp(&lu[(j, k)].norm())
                        .unwrap()
                        .then(j.cmp(&i))
                })
                .unwrap();
            if lu[(p, k)] == czero() {
                singular = true;
                continue;
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(p, j)];
                    lu[(p, j)] = lu[(k, j)];
                    lu[(k, j)] = tmp;
                }
            }
            let inv = cone::<T>() / lu[(k, k)];
            for i in k + 1..n {
                let m = lu[(i, k)] * inv;
                lu[(i, k)] = m;
                if m != czero() {
                    for j in k + 1..n {
                        let u = lu[(k, j)];
                        lu[(i, j)] -= m * u;
                    }
                }
            }
        }
        let mut out = Self {
            lu,
            perm,
            rcond: T::zero(),
        };
        if !singular {
            out.rcond = out.reciprocal_condition(a);
        }
        Ok(out)
    }

    /// `1 / (|A|_1 |A^-1|_1)`, with the inverse formed column by column.
    fn reciprocal_condition(&self, a: &Matrix<T>) -> T {
        let n = a.rows();
        let mut inv_norm = T::zero();
        let mut e = vec![czero::<T>(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = czero());
            e[j] = cone();
            let col = self.solve(&e);
            let s = col.iter().fold(T::zero(), |acc, c| acc + c.norm());
            if s > inv_norm {
                inv_norm = s;
            }
        }
        let denom = a.norm_one() * inv_norm;
        if denom.is_finite() && denom > T::zero() {
            T::one() / denom
        } else {
            T::zero()
        }
    }

    pub fn rcond(&self) -> T {
        self.rcond
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for (j, xj) in x.iter().enumerate().take(i) {
                acc -= self.lu[(i, j)] * *xj;
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for (j, xj) in x.iter().enumerate().skip(i + 1) {
                acc -= self.lu[(i, j)] * *xj;
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = Matrix::<f64>::from_real(2, 2, &[0.0, -1.0, 3.0, 0.0]);
        let lu = Lu::factor(&a).unwrap();
        let x = lu.solve(&[Complex::new(-1.0, 0.0), Complex::new(-3.0, 0.0)]);
        assert_eq!(x, vec![Complex::new(-1.0, 0.0), Complex::new(1.0, 0.0)]);
        assert!((lu.rcond() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_has_zero_rcond() {
        let a = Matrix::<f64>::from_real(2, 2, &[0.0, 4.0, 0.0, 0.0]);
        assert_eq!(Lu::factor(&a).unwrap().rcond(), 0.0);
        assert!(Lu::factor(&Matrix::<f64>::zeros(2, 3)).is_err());
    }
}
