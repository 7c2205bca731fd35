//! Monomial coordinate changes `x = z^M` with `|det M| = 1`.

use crate::error::{Error, Result};
use crate::poly::{Monomial, PolySystem, Polynomial};
use crate::scalar::Real;

/// Integer matrix `M`; the substitution is `x_j = prod_i z_i^{M[i][j]}`, so a
/// monomial `x^e` becomes `z^{M e}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnimodularTransform {
    m: Vec<Vec<i64>>,
}

impl UnimodularTransform {
    pub fn new(m: Vec<Vec<i64>>) -> Result<Self> {
        let n = m.len();
        if n == 0 || m.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("unimodular matrix must be square".into()));
        }
        let det = determinant(&m);
        if det.abs() != 1 {
            return Err(Error::NonUnimodular(det as i64));
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn det(&self) -> i64 {
        determinant(&self.m) as i64
    }

    /// Exact inverse via the adjugate.
    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let det = determinant(&self.m);
        let mut inv = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<i64>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| self.m[r][c]).collect())
                    .collect();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                inv[i][j] = (sign * determinant(&minor) * det) as i64;
            }
        }
        Self { m: inv }
    }

    /// `M e` for an exponent vector `e`.
    pub fn map_exponents(&self, e: &[i64]) -> Vec<i64> {
        self.m
            .iter()
            .map(|row| row.iter().zip(e).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maps a point `z` with nonzero coordinates to `x = z^M`.
    pub fn map_point<T: Real>(&self, z: &[num_complex::Complex<T>]) -> Vec<num_complex::Complex<T>> {
        let n = self.dim();
        (0..n)
            .map(|j| {
                (0..n).fold(crate::scalar::cone(), |acc, i| acc * z[i].powi(self.m[i][j] as i32))
            })
            .collect()
    }
}

/// Fraction-free (Bareiss) determinant.
fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Result of a monomial transformation.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedSystem<T> {
    pub system: PolySystem<T>,
    /// Per polynomial, the exponents of the monomial in `z` it was multiplied by.
    pub clearing: Vec<Vec<u32>>,
}

/// Rewrites `f` in the coordinates `z` of `x = z^M`; each polynomial is
/// multiplied by the smallest monomial that makes all exponents non-negative.
pub fn apply_unimodular<T: Real>(f: &PolySystem<T>, m: &UnimodularTransform) -> Result<TransformedSystem<T>> {
    let n = f.n();
    if m.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "transform has dimension {} but the system has {} variables",
            m.dim(),
            n
        )));
    }
    let mut polys = Vec::with_capacity(f.m());
    let mut clearing = Vec::with_capacity(f.m());
    for p in f.polys() {
        let mapped: Vec<(Vec<i64>, &Monomial<T>)> = p
            .terms()
            .iter()
            .map(|mono| {
                let e: Vec<i64> = mono.x_exps.iter().map(|&k| k as i64).collect();
                (m.map_exponents(&e), mono)
            })
            .collect();
        let shift: Vec<i64> = (0..n)
            .map(|i| mapped.iter().map(|(e, _)| e[i]).min().unwrap_or(0).min(0).abs())
            .collect();
        let terms = mapped
            .iter()
            .map(|(e, mono)| Monomial {
                coeff: mono.coeff,
                t_exp: mono.t_exp,
                x_exps: e.iter().zip(&shift).map(|(a, s)| (a + s) as u32).collect(),
            })
            .collect();
        polys.push(Polynomial::new(terms));
        clearing.push(shift.iter().map(|&s| s as u32).collect());
    }
    Ok(TransformedSystem {
        system: PolySystem::new(polys, f.var_names().to_vec(), f.t_name())?,
        clearing,
    })
}
