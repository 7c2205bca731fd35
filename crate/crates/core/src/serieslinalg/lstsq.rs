//! Dense least squares by Householder QR, for matrices of full column rank.

use num_complex::Complex;

use crate::matrix::Matrix;
use crate::scalar::{czero, Real};

/// Minimizes `|A x - b|_2`; `A` must have at least as many rows as columns
/// and full column rank.
pub fn least_squares<T: Real>(a: &Matrix<T>, b: &[Complex<T>]) -> Vec<Complex<T>> {
    let (m, n) = (a.rows(), a.cols());
    debug_assert!(m >= n && b.len() == m);
    let mut r = a.clone();
    let mut qb = b.to_vec();
    for k in 0..n {
        let norm = (k..m).fold(T::zero(), |s, i| s + r[(i, k)].norm_sqr()).sqrt();
        if norm == T::zero() {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex<T>> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vn = v.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt();
        if vn == T::zero() {
            continue;
        }
        for c in &mut v {
            *c = *c / vn;
        }
        let two = T::lit(2.0);
        for j in k..n {
            let dot = v.iter().enumerate().fold(czero::<T>(), |s, (i, vi)| s + vi.conj() * r[(k + i, j)]);
            for (i, vi) in v.iter().enumerate() {
                r[(k + i, j)] -= *vi * dot * two;
            }
        }
        let dot = v.iter().enumerate().fold(czero::<T>(), |s, (i, vi)| s + vi.conj() * qb[k + i]);
        for (i, vi) in v.iter().enumerate() {
            qb[k + i] -= *vi * dot * two;
        }
    }
    let mut x = vec![czero::<T>(); n];
    for k in (0..n).rev() {
        let mut acc = qb[k];
        for j in k + 1..n {
            acc -= r[(k, j)] * x[j];
        }
        x[k] = acc / r[(k, k)];
    }
    x
}
