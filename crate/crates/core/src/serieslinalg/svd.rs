//! Singular values by one-sided Jacobi rotations.

use num_complex::Complex;

use crate::matrix::Matrix;
use crate::scalar::{czero, Real};

/// Relative tolerance used for rank decisions when none is supplied.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Singular values in decreasing order (`min(rows, cols)` of them).
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    // Orthogonalize the columns of whichever orientation has fewer of them.
    let mut cols: Vec<Vec<Complex<T>>> = if a.cols() <= a.rows() {
        (0..a.cols()).map(|j| a.column(j)).collect()
    } else {
        (0..a.rows()).map(|i| a.row(i).iter().map(|c| c.conj()).collect()).collect()
    };
    let k = cols.len();
    let eps = T::epsilon();
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = cols[p].iter().fold(T::zero(), |s, c| s + c.norm_sqr());
                let beta = cols[q].iter().fold(T::zero(), |s, c| s + c.norm_sqr());
                let gamma = cols[p]
                    .iter()
                    .zip(&cols[q])
                    .fold(czero::<T>(), |s, (x, y)| s + x.conj() * *y);
                let g = gamma.norm();
                if g == T::zero() || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let yq = *y * phase.conj();
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = (xp * s + yq * c) * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols
        .iter()
        .map(|c| c.iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt())
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Number of singular values above `tol * sigma_max`.
pub fn numeric_rank<T: Real>(a: &Matrix<T>, tol: T) -> usize {
    let sv = singular_values(a);
    let Some(&smax) = sv.first() else {
        return 0;
    };
    if smax == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viviani_augmented_jacobian_drops_rank() {
        let a = Matrix::<f64>::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 4.0, -2.0, 0.0, 0.0]);
        assert_eq!(numeric_rank(&a, 1e-10), 2);
        assert_eq!(numeric_rank(&Matrix::<f64>::zeros(3, 2), 1e-10), 0);
    }

    #[test]
    fn complex_values() {
        // [[1, i], [i, -1]] has singular values 2 and 0.
        let i = Complex::new(0.0, 1.0);
        let one = Complex::new(1.0f64, 0.0);
        let a = Matrix::from_rows(vec![vec![one, i], vec![i, -one]]);
        let sv = singular_values(&a);
        assert!((sv[0] - 2.0).abs() < 1e-14);
        assert!(sv[1].abs() < 1e-14);
        assert_eq!(numeric_rank(&a, 1e-10), 1);
    }
}
