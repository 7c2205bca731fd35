//! Padé approximants `[L/M]` of a truncated power series.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{cone, czero, fmt_json, Real};
use crate::series::TruncatedSeries;
use crate::serieslinalg::Lu;

/// Below this reciprocal condition number the denominator system is defective.
const DEGENERATE_RCOND: f64 = 1e-13;

/// `num(t) / den(t)` with `den[0] == 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PadeApproximant<T> {
    pub num: Vec<Complex<T>>,
    pub den: Vec<Complex<T>>,
}

/// Builds the `[l/m]` approximant from the coefficients of `t^0 .. t^(l+m)`.
pub fn pade_from_series<T: Real>(s: &TruncatedSeries<T>, l: usize, m: usize) -> Result<PadeApproximant<T>> {
    if !s.is_zero() && s.base() < 0 {
        return Err(Error::PoleAtZero);
    }
    let need = (l + m) as i64;
    if s.order() < need {
        return Err(Error::Input(format!(
            "[{}/{}] needs coefficients through t^{}, series is known through t^{}",
            l,
            m,
            need,
            s.order()
        )));
    }
    let c = |k: i64| if k < 0 { czero() } else { s.coeff(k) };
    let mut den = vec![czero::<T>(); m + 1];
    den[0] = cone();
    if m > 0 {
        // sum_{j=1..m} q_j c_{k-j} = -c_k for k = l+1 .. l+m
        let mut a = Matrix::zeros(m, m);
        let mut rhs = vec![czero::<T>(); m];
        for r in 0..m {
            let k = (l + 1 + r) as i64;
            rhs[r] = -c(k);
            for j in 1..=m {
                a[(r, j - 1)] = c(k - j as i64);
            }
        }
        let scale = (0..=need).map(|k| c(k).norm()).fold(T::zero(), |x, y| if y > x { y } else { x });
        let rhs_zero = rhs.iter().all(|v| v.norm() <= T::lit(1e-14) * scale);
        if !rhs_zero {
            let lu = Lu::factor(&a)?;
            if !(lu.rcond() > T::lit(DEGENERATE_RCOND)) {
                return Err(Error::DegenerateDenominator);
            }
            let q = lu.solve(&rhs);
            den[1..].copy_from_slice(&q);
        }
    }
    let num = (0..=l)
        .map(|i| {
            (0..=i.min(m)).fold(czero::<T>(), |acc, j| acc + den[j] * c((i - j) as i64))
        })
        .collect();
    Ok(PadeApproximant { num, den })
}

fn horner<T: Real>(p: &[Complex<T>], t0: Complex<T>) -> Complex<T> {
    p.iter().rev().fold(czero(), |acc, c| acc * t0 + *c)
}

/// Evaluates `num(t0) / den(t0)`.
pub fn eval_pade<T: Real>(p: &PadeApproximant<T>, t0: Complex<T>) -> Result<Complex<T>> {
    let d = horner(&p.den, t0);
    if d.norm() < T::lit(1e-14) {
        return Err(Error::PoleHit);
    }
    Ok(horner(&p.num, t0) / d)
}

impl<T: Real> PadeApproximant<T> {
    pub fn eval(&self, t0: Complex<T>) -> Result<Complex<T>> {
        eval_pade(self, t0)
    }

    /// Taylor expansion of `num / den` through `t^order`.
    pub fn expand(&self, order: i64) -> Result<TruncatedSeries<T>> {
        let num = TruncatedSeries::new(0, self.num.clone(), order);
        let den = TruncatedSeries::new(0, self.den.clone(), order);
        Ok(num.mul(&den.invert(order)?).truncate(order))
    }

    pub fn to_json(&self) -> String {
        let list = |v: &[Complex<T>]| {
            v.iter()
                .map(|c| format!("[{}, {}]", fmt_json(c.re), fmt_json(c.im)))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("{{\"num\": [{}], \"den\": [{}]}}", list(&self.num), list(&self.den))
    }
}
