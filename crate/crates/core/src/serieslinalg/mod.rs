//! Linear algebra over truncated Laurent series by linearization.
//!
//! A matrix of series `A(t)` becomes a series of matrices `t^a (A_0 + A_1 t + ...)`
//! and a vector of series `b(t)` becomes `t^b (b_0 + b_1 t + ...)`. The solution
//! of `A x = b` then has base `b - a` and its coefficients follow either from
//! the staggered recurrence (regular `A_0`) or from the block lower triangular
//! Hermite-Laurent system.

pub mod echelon;
pub mod lstsq;
pub mod lu;
pub mod svd;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{czero, Real};
use crate::series::TruncatedSeries;

pub use echelon::{echelon_decompose, echelon_solve, ColumnOp, EchelonDecomposition};
pub use lstsq::least_squares;
pub use lu::Lu;
pub use svd::{numeric_rank, singular_values, DEFAULT_RANK_TOL};

/// `A_0` counts as regular when its reciprocal condition number exceeds this.
pub const REGULAR_RCOND: f64 = 1e-8;

/// `t^base (A_0 + A_1 t + ...)`; the zero matrix series has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSeries<T> {
    base: i64,
    rows: usize,
    cols: usize,
    coeffs: Vec<Matrix<T>>,
}

impl<T: Real> MatrixSeries<T> {
    /// Leading zero matrices are absorbed into the base.
    pub fn new(base: i64, rows: usize, cols: usize, mut coeffs: Vec<Matrix<T>>) -> Self {
        assert!(coeffs.iter().all(|m| m.rows() == rows && m.cols() == cols));
        let lead = coeffs.iter().position(|m| !m.is_zero());
        match lead {
            None => Self {
                base: 0,
                rows,
                cols,
                coeffs: Vec::new(),
            },
            Some(k) => {
                coeffs.drain(..k);
                Self {
                    base: base + k as i64,
                    rows,
                    cols,
                    coeffs,
                }
            }
        }
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn coeffs(&self) -> &[Matrix<T>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&Matrix<T>> {
        self.coeffs.first()
    }
}

/// `t^base (b_0 + b_1 t + ...)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorSeries<T> {
    base: i64,
    len: usize,
    coeffs: Vec<Vec<Complex<T>>>,
}

impl<T: Real> VectorSeries<T> {
    pub fn new(base: i64, len: usize, mut coeffs: Vec<Vec<Complex<T>>>) -> Self {
        assert!(coeffs.iter().all(|v| v.len() == len));
        match coeffs.iter().position(|v| v.iter().any(|c| *c != czero())) {
            None => Self {
                base: 0,
                len,
                coeffs: Vec::new(),
            },
            Some(k) => {
                coeffs.drain(..k);
                Self {
                    base: base + k as i64,
                    len,
                    coeffs,
                }
            }
        }
    }

    /// Linearizes a vector of series.
    pub fn from_series(v: &[TruncatedSeries<T>]) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let (base, count) = span(v.iter());
        let coeffs = (0..count)
            .map(|k| v.iter().map(|s| s.coeff(base + k as i64)).collect())
            .collect();
        Ok(Self::new(base, v.len(), coeffs))
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn coeffs(&self) -> &[Vec<Complex<T>>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Back to a vector of series, each known modulo `t^(order+1)`.
    pub fn to_series(&self, order: i64) -> Vec<TruncatedSeries<T>> {
        (0..self.len)
            .map(|i| {
                if self.coeffs.is_empty() {
                    return TruncatedSeries::zero(order);
                }
                TruncatedSeries::new(self.base, self.coeffs.iter().map(|v| v[i]).collect(), order)
            })
            .collect()
    }
}

/// Lowest base over nonzero entries and the number of coefficients up to the
/// common truncation order (or the last stored term, if lower).
fn span<'a, T: Real + 'a>(entries: impl Iterator<Item = &'a TruncatedSeries<T>> + Clone) -> (i64, usize) {
    let order = entries.clone().map(|s| s.order()).min().unwrap_or(0);
    let nonzero = entries.filter(|s| !s.is_zero());
    let base = nonzero.clone().map(|s| s.base()).min();
    let last = nonzero.map(|s| s.base() + s.coeffs().len() as i64 - 1).max();
    match (base, last) {
        (Some(b), Some(l)) => {
            let top = l.min(order);
            (b, (top - b + 1).max(0) as usize)
        }
        _ => (0, 0),
    }
}

/// Turns a matrix of series into a series of matrices.
pub fn linearize<T: Real>(j: &[Vec<TruncatedSeries<T>>]) -> Result<MatrixSeries<T>> {
    let rows = j.len();
    let cols = j.first().map_or(0, |r| r.len());
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    if j.iter().any(|r| r.len() != cols) {
        return Err(Error::DimensionMismatch("ragged matrix of series".into()));
    }
    let (base, count) = span(j.iter().flatten());
    let coeffs = (0..count)
        .map(|k| {
            let mut m = Matrix::zeros(rows, cols);
            for (r, row) in j.iter().enumerate() {
                for (c, s) in row.iter().enumerate() {
                    m[(r, c)] = s.coeff(base + k as i64);
                }
            }
            m
        })
        .collect();
    Ok(MatrixSeries::new(base, rows, cols, coeffs))
}

/// Block lower triangular Toeplitz matrix with `A_k` on the `k`-th block subdiagonal.
pub fn assemble_block<T: Real>(a: &MatrixSeries<T>, d: usize) -> Matrix<T> {
    let (r, c) = (a.rows, a.cols);
    let mut out = Matrix::zeros((d + 1) * r, (d + 1) * c);
    for bi in 0..=d {
        for bj in 0..=bi {
            let Some(ak) = a.coeffs.get(bi - bj) else {
                continue;
            };
            for i in 0..r {
                for j in 0..c {
                    out[(bi * r + i, bj * c + j)] = ak[(i, j)];
                }
            }
        }
    }
    out
}

fn check_shapes<T: Real>(a: &MatrixSeries<T>, b: &VectorSeries<T>) -> Result<()> {
    if a.rows != b.len {
        return Err(Error::DimensionMismatch(format!(
            "matrix series has {} rows, right-hand side has length {}",
            a.rows, b.len
        )));
    }
    if a.is_zero() {
        return Err(Error::ZeroJacobian);
    }
    Ok(())
}

/// `b_k - sum_{j>=1} A_j x_{k-j}`.
fn stage_rhs<T: Real>(a: &MatrixSeries<T>, b: &VectorSeries<T>, x: &[Vec<Complex<T>>], k: usize) -> Vec<Complex<T>> {
    let mut rhs = b.coeffs.get(k).cloned().unwrap_or_else(|| vec![czero(); a.rows]);
    for j in 1..a.coeffs.len().min(k + 1) {
        let aj = &a.coeffs[j];
        let xk = &x[k - j];
        for (i, ri) in rhs.iter_mut().enumerate() {
            let row = aj.row(i);
            let mut acc = czero::<T>();
            for (av, xv) in row.iter().zip(xk) {
                acc += *av * *xv;
            }
            *ri -= acc;
        }
    }
    rhs
}

/// Solves the staggered system for `x_0, ..., x_d` with one LU of `A_0`.
pub fn staggered_solve<T: Real>(a: &MatrixSeries<T>, b: &VectorSeries<T>, d: usize) -> Result<VectorSeries<T>> {
    check_shapes(a, b)?;
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch(format!(
            "staggered solve needs square coefficients, got {}x{}",
            a.rows, a.cols
        )));
    }
    let lu = Lu::factor(&a.coeffs[0])?;
    if !(lu.rcond() > T::lit(REGULAR_RCOND)) {
        return Err(Error::SingularLeadingBlock {
            rcond: lu.rcond().to_f64().unwrap_or(0.0),
        });
    }
    let mut x: Vec<Vec<Complex<T>>> = Vec::with_capacity(d + 1);
    for k in 0..=d {
        let rhs = stage_rhs(a, b, &x, k);
        x.push(lu.solve(&rhs));
    }
    Ok(VectorSeries::new(b.base - a.base, a.cols, x))
}

/// How [`block_solve`] handled the system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockPath {
    /// `A_0` has full column rank; its echelon form is reused on every diagonal block.
    Structured,
    /// The whole Hermite-Laurent matrix was reduced.
    FullBlock,
}

#[derive(Clone, Debug)]
pub struct BlockSolution<T> {
    pub x: VectorSeries<T>,
    pub exact: bool,
    pub path: BlockPath,
    /// Rank of the reduced matrix (`A_0` on the structured path).
    pub rank: usize,
    /// Null space dimension of the reduced matrix.
    pub nullity: usize,
}

/// Solves the Hermite-Laurent system for `x_0, ..., x_d`.
pub fn block_solve<T: Real>(a: &MatrixSeries<T>, b: &VectorSeries<T>, d: usize) -> Result<BlockSolution<T>> {
    check_shapes(a, b)?;
    let (r, c) = (a.rows, a.cols);
    let e0 = echelon_decompose(&a.coeffs[0]);
    if e0.rank() == c && numeric_rank(&a.coeffs[0], T::lit(DEFAULT_RANK_TOL)) == c {
        let mut x: Vec<Vec<Complex<T>>> = Vec::with_capacity(d + 1);
        let mut exact = true;
        for k in 0..=d {
            let rhs = stage_rhs(a, b, &x, k);
            let (xk, ok) = e0.solve(&rhs)?;
            exact &= ok;
            x.push(xk);
        }
        return Ok(BlockSolution {
            x: VectorSeries::new(b.base - a.base, c, x),
            exact,
            path: BlockPath::Structured,
            rank: c,
            nullity: 0,
        });
    }
    let big = assemble_block(a, d);
    let mut rhs = Vec::with_capacity((d + 1) * r);
    for k in 0..=d {
        match b.coeffs.get(k) {
            Some(v) => rhs.extend_from_slice(v),
            None => rhs.extend(std::iter::repeat_n(czero::<T>(), r)),
        }
    }
    let e = echelon_decompose(&big);
    let (xs, exact) = e.solve(&rhs)?;
    let x = xs.chunks(c).map(|ch| ch.to_vec()).collect();
    Ok(BlockSolution {
        x: VectorSeries::new(b.base - a.base, c, x),
        exact,
        path: BlockPath::FullBlock,
        rank: e.rank(),
        nullity: big.cols() - e.rank(),
    })
}
