//! Lower triangular echelon form `L = P A Q_1 U_1 ... Q_r U_r`.
//!
//! Zero rows go to the top, pivots sit on a staircase that moves right and
//! down, and columns without a pivot end up at the right. Each `(Q_k, U_k)`
//! is one column transposition followed by elementary column combinations
//! that clear the pivot row to the right of the pivot.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::{vec_max_abs, Matrix};
use crate::scalar::{czero, Real};
use crate::serieslinalg::least_squares;

/// Entries below this fraction of their column's magnitude count as zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Absolute floor, relative to the largest entry of the whole matrix.
const ABS_FLOOR: f64 = 1e-14;

/// One `(Q_k, U_k)` pair: swap columns `pivot` and `swap`, then
/// `col_j -= m_j * col_pivot` for each recorded `(j, m_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnOp<T> {
    pub pivot: usize,
    pub swap: usize,
    pub multipliers: Vec<(usize, Complex<T>)>,
}

#[derive(Clone, Debug)]
pub struct EchelonDecomposition<T> {
    a: Matrix<T>,
    l: Matrix<T>,
    /// Row `i` of `P A` is row `perm[i]` of `A`.
    perm: Vec<usize>,
    ops: Vec<ColumnOp<T>>,
    /// `(row, column)` of each pivot in `L`, by increasing column.
    pivots: Vec<(usize, usize)>,
}

pub fn echelon_decompose<T: Real>(a: &Matrix<T>) -> EchelonDecomposition<T> {
    let (rows, cols) = (a.rows(), a.cols());
    let floor = T::lit(ABS_FLOOR) * a.max_abs();
    let zero_rows: Vec<usize> = (0..rows).filter(|&i| a.row(i).iter().all(|c| c.norm() <= floor)).collect();
    let perm: Vec<usize> = zero_rows
        .iter()
        .copied()
        .chain((0..rows).filter(|i| !zero_rows.contains(i)))
        .collect();
    let mut w = Matrix::zeros(rows, cols);
    for (i, &p) in perm.iter().enumerate() {
        for j in 0..cols {
            w[(i, j)] = a[(p, j)];
        }
    }
    let mut scale: Vec<T> = (0..cols).map(|j| vec_max_abs(&w.column(j))).collect();
    let tol = T::lit(ZERO_TOL);
    let mut ops = Vec::new();
    let mut pivots = Vec::new();
    let mut next = 0;
    for i in 0..rows {
        if next == cols {
            break;
        }
        let mut best: Option<(usize, T)> = None;
        for j in next..cols {
            let v = w[(i, j)].norm();
            if v <= tol * scale[j] || v <= floor {
                w[(i, j)] = czero();
                continue;
            }
            if best.is_none_or(|(_, bv)| v > bv) {
                best = Some((j, v));
            }
        }
        let Some((jp, _)) = best else {
            continue;
        };
        w.swap_columns(next, jp);
        scale.swap(next, jp);
        let piv = w[(i, next)];
        let mut multipliers = Vec::new();
        for j in next + 1..cols {
            let e = w[(i, j)];
            if e == czero() {
                continue;
            }
            let m = e / piv;
            for r in i + 1..rows {
                let v = w[(r, next)];
                w[(r, j)] -= m * v;
            }
            w[(i, j)] = czero();
            let grown = m.norm() * scale[next];
            if grown > scale[j] {
                scale[j] = grown;
            }
            multipliers.push((j, m));
        }
        ops.push(ColumnOp {
            pivot: next,
            swap: jp,
            multipliers,
        });
        pivots.push((i, next));
        next += 1;
    }
    EchelonDecomposition {
        a: a.clone(),
        l: w,
        perm,
        ops,
        pivots,
    }
}

impl<T: Real> EchelonDecomposition<T> {
    pub fn l(&self) -> &Matrix<T> {
        &self.l
    }

    pub fn original(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn row_permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn column_ops(&self) -> &[ColumnOp<T>] {
        &self.ops
    }

    pub fn pivots(&self) -> &[(usize, usize)] {
        &self.pivots
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Computes `P M Q_1 U_1 ... Q_r U_r` for a matrix with `A`'s shape.
    pub fn apply(&self, m: &Matrix<T>) -> Matrix<T> {
        let mut w = Matrix::zeros(m.rows(), m.cols());
        for (i, &p) in self.perm.iter().enumerate() {
            for j in 0..m.cols() {
                w[(i, j)] = m[(p, j)];
            }
        }
        for op in &self.ops {
            w.swap_columns(op.pivot, op.swap);
            for &(j, mult) in &op.multipliers {
                for r in 0..w.rows() {
                    let v = w[(r, op.pivot)];
                    w[(r, j)] -= mult * v;
                }
            }
        }
        w
    }

    /// `Q_1 U_1 ... Q_r U_r y`.
    fn unwind(&self, mut y: Vec<Complex<T>>) -> Vec<Complex<T>> {
        for op in self.ops.iter().rev() {
            let mut acc = czero::<T>();
            for &(j, mult) in &op.multipliers {
                acc += mult * y[j];
            }
            y[op.pivot] -= acc;
            y.swap(op.pivot, op.swap);
        }
        y
    }

    /// Forward substitution with free variables set to zero. `exact` reports
    /// whether `A x = rhs` holds to `1e-9 (|A| |x| + |rhs|)`; otherwise the
    /// residual is confined to the rows of `L` without a pivot, so every
    /// pivot row (and with it every low-order equation of a block system)
    /// is still met.
    pub fn solve(&self, rhs: &[Complex<T>]) -> Result<(Vec<Complex<T>>, bool)> {
        let r = self.permuted(rhs)?;
        let mut y = vec![czero::<T>(); self.a.cols()];
        for &(i, c) in &self.pivots {
            let mut acc = r[i];
            for k in 0..c {
                acc -= self.l[(i, k)] * y[k];
            }
            y[c] = acc / self.l[(i, c)];
        }
        let x = self.unwind(y);
        let exact = self.residual_ok(&x, rhs);
        Ok((x, exact))
    }

    /// Like [`solve`](Self::solve), but an inconsistent system is fitted in
    /// the least squares sense over the pivot columns of `L`.
    pub fn solve_least_squares(&self, rhs: &[Complex<T>]) -> Result<(Vec<Complex<T>>, bool)> {
        let (x, exact) = self.solve(rhs)?;
        if exact || self.rank() == 0 {
            return Ok((x, exact));
        }
        let r = self.permuted(rhs)?;
        let rank = self.rank();
        let mut lr = Matrix::zeros(self.a.rows(), rank);
        for i in 0..self.a.rows() {
            for j in 0..rank {
                lr[(i, j)] = self.l[(i, j)];
            }
        }
        let mut y = least_squares(&lr, &r);
        y.resize(self.a.cols(), czero());
        let x = self.unwind(y);
        let exact = self.residual_ok(&x, rhs);
        Ok((x, exact))
    }

    fn permuted(&self, rhs: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if rhs.len() != self.a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                rhs.len(),
                self.a.rows()
            )));
        }
        Ok(self.perm.iter().map(|&p| rhs[p]).collect())
    }

    fn residual_ok(&self, x: &[Complex<T>], rhs: &[Complex<T>]) -> bool {
        let res = self.a.mul_vec(x);
        let err = vec_max_abs(&res.iter().zip(rhs).map(|(a, b)| *a - *b).collect::<Vec<_>>());
        let bound = T::lit(1e-9) * (self.a.norm_inf() * vec_max_abs(x) + vec_max_abs(rhs));
        err <= bound
    }

    /// Basis of the numerical null space: the images of the pivot-free columns.
    pub fn null_space(&self) -> Vec<Vec<Complex<T>>> {
        let n = self.a.cols();
        (self.rank()..n)
            .map(|c| {
                let mut e = vec![czero::<T>(); n];
                e[c] = crate::scalar::cone();
                self.unwind(e)
            })
            .collect()
    }
}

/// `echelon_solve` as a free function.
pub fn echelon_solve<T: Real>(e: &EchelonDecomposition<T>, rhs: &[Complex<T>]) -> Result<(Vec<Complex<T>>, bool)> {
    e.solve(rhs)
}
