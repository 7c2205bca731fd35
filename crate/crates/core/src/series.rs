//! Truncated Laurent series in one variable with complex coefficients.
//!
//! A series is stored as `t^base * (c_0 + c_1 t + ... + c_k t^k) + O(t^(order+1))`.
//! Every operation propagates the truncation order pessimistically, so the
//! coefficients a series carries are always the ones that are actually known.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, fmt_json, fmt_sci, Real};

/// Relative threshold below which leading coefficients are stripped.
pub const DEFAULT_STRIP_TOL: f64 = 1e-14;

/// Truncation order used for series that are known exactly (polynomials).
pub const EXACT: i64 = i64::MAX / 8;

/// A Laurent series known modulo `t^(order+1)`.
///
/// For a nonzero series `coeffs[0]` is nonzero and `coeffs[k]` multiplies
/// `t^(base+k)`. The zero series has no coefficients and `base == order + 1`,
/// which makes the truncation formulas in [`TruncatedSeries::mul`] hold for it too.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    base: i64,
    coeffs: Vec<Complex<T>>,
    order: i64,
}

impl<T: Real> TruncatedSeries<T> {
    /// Builds a series from coefficients starting at `t^base`; terms past
    /// `order` are dropped and leading zeros are absorbed into the base.
    pub fn new(base: i64, coeffs: Vec<Complex<T>>, order: i64) -> Self {
        Self::with_strip_tol(base, coeffs, order, T::lit(DEFAULT_STRIP_TOL))
    }

    /// Like [`TruncatedSeries::new`] with an explicit relative stripping threshold.
    pub fn with_strip_tol(base: i64, mut coeffs: Vec<Complex<T>>, order: i64, tol: T) -> Self {
        let keep = (order - base + 1).max(0) as usize;
        coeffs.truncate(keep);
        while coeffs.last().is_some_and(|c| *c == czero()) {
            coeffs.pop();
        }
        let scale = coeffs
            .iter()
            .map(|c| c.norm())
            .fold(T::one(), |a, b| if b > a { b } else { a });
        let cut = tol * scale;
        let lead = coeffs.iter().position(|c| c.norm() >= cut && *c != czero());
        match lead {
            None => Self::zero(order),
            Some(k) => {
                coeffs.drain(..k);
                Self {
                    base: base + k as i64,
                    coeffs,
                    order,
                }
            }
        }
    }

    /// Real coefficients, for tests and fixtures.
    pub fn from_real(base: i64, coeffs: &[f64], order: i64) -> Self {
        Self::new(
            base,
            coeffs.iter().map(|&c| Complex::new(T::lit(c), T::zero())).collect(),
            order,
        )
    }

    pub fn zero(order: i64) -> Self {
        Self {
            base: order + 1,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn constant(c: Complex<T>, order: i64) -> Self {
        Self::new(0, vec![c], order)
    }

    /// `c * t^exp`.
    pub fn monomial(c: Complex<T>, exp: i64, order: i64) -> Self {
        Self::new(exp, vec![c], order)
    }

    pub fn base(&self) -> i64 {
        self.base
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `t^exp`; zero outside the stored range.
    pub fn coeff(&self, exp: i64) -> Complex<T> {
        let k = exp - self.base;
        if k < 0 {
            return czero();
        }
        self.coeffs.get(k as usize).copied().unwrap_or_else(czero)
    }

    /// Largest exponent carrying a stored coefficient.
    pub fn degree(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            Some(self.base + self.coeffs.len() as i64 - 1)
        }
    }

    /// Max modulus over the coefficients.
    pub fn max_norm(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| c.norm())
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Lowers the truncation order, dropping terms past it.
    pub fn truncate(&self, order: i64) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self::trimmed(self.base, self.coeffs.clone(), order)
    }

    /// Reinterprets the series with a different truncation order, treating the
    /// missing coefficients as zero. Used to re-seed a Newton iterate at a
    /// higher working order.
    pub fn with_order(&self, order: i64) -> Self {
        if self.is_zero() {
            return Self::zero(order);
        }
        Self::trimmed(self.base, self.coeffs.clone(), order)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -T::one())
    }

    fn combine(&self, other: &Self, sign: T) -> Self {
        let order = self.order.min(other.order);
        let base = self.base.min(other.base);
        if base > order {
            return Self::zero(order);
        }
        let end = [self, other]
            .iter()
            .filter(|s| !s.is_zero())
            .map(|s| s.base + s.coeffs.len() as i64)
            .max()
            .unwrap_or(base);
        let len = (order + 1).min(end).saturating_sub(base).max(0) as usize;
        let mut out = vec![czero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            let idx = self.base + k as i64 - base;
            if (idx as usize) < len {
                out[idx as usize] += *c;
            }
        }
        let mut mass = vec![T::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            let idx = self.base + k as i64 - base;
            if (idx as usize) < len {
                mass[idx as usize] = c.norm();
            }
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            let idx = other.base + k as i64 - base;
            if (idx as usize) < len {
                out[idx as usize] += *c * sign;
                mass[idx as usize] = mass[idx as usize] + c.norm();
            }
        }
        // A leading term counts as zero only when it is cancellation noise
        // relative to the terms that produced it; the scale of far higher
        // degrees is irrelevant here.
        let tol = T::lit(DEFAULT_STRIP_TOL);
        let lead = out.iter().zip(&mass).position(|(c, m)| *c != czero() && c.norm() > tol * *m);
        match lead {
            None => Self::zero(order),
            Some(k) => Self::trimmed(base + k as i64, out.split_off(k), order),
        }
    }

    /// Trusts the leading coefficient; only trailing exact zeros are dropped.
    fn trimmed(base: i64, mut coeffs: Vec<Complex<T>>, order: i64) -> Self {
        coeffs.truncate((order - base + 1).max(0) as usize);
        while coeffs.last().is_some_and(|c| *c == czero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| *c != czero());
        match lead {
            None => Self::zero(order),
            Some(k) => {
                coeffs.drain(..k);
                Self { base: base + k as i64, coeffs, order }
            }
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| -*c).collect(),
            order: self.order,
        }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::trimmed(self.base, self.coeffs.iter().map(|x| *x * c).collect(), self.order)
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            base: self.base + k,
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    /// Cauchy product, known modulo `t^(min(s.order + u.base, u.order + s.base) + 1)`.
    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.base).min(other.order + self.base);
        let base = self.base + other.base;
        if self.is_zero() || other.is_zero() || base > order {
            return Self::zero(order);
        }
        let len = ((order - base + 1) as usize).min(self.coeffs.len() + other.coeffs.len() - 1);
        let mut out = vec![czero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] += *a * *b;
            }
        }
        Self::trimmed(base, out, order)
    }

    /// Non-negative integer power by repeated squaring.
    pub fn powi(&self, mut e: u32) -> Self {
        let mut acc = Self::constant(cone(), EXACT);
        let mut sq = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// Multiplicative inverse with `order + 1` coefficients, limited by the
    /// relative precision the series itself carries.
    pub fn invert(&self, order: i64) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroSeries);
        }
        let rel = order.min(self.order - self.base).max(0);
        let n = rel as usize + 1;
        let s0_inv = cone::<T>() / self.coeffs[0];
        let mut u = vec![czero(); n];
        u[0] = s0_inv;
        for k in 1..n {
            let mut acc = czero::<T>();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                acc += self.coeffs[j] * u[k - j];
            }
            u[k] = -acc * s0_inv;
        }
        Ok(Self::trimmed(-self.base, u, -self.base + rel))
    }

    pub fn differentiate(&self) -> Self {
        let order = self.order - 1;
        if self.is_zero() {
            return Self::zero(order);
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| *c * T::lit((self.base + k as i64) as f64))
            .collect();
        Self::trimmed(self.base - 1, coeffs, order)
    }

    /// Evaluates the stored polynomial part at `t0` by Horner's rule.
    pub fn eval(&self, t0: Complex<T>) -> Result<Complex<T>> {
        if self.is_zero() {
            return Ok(czero());
        }
        if self.base < 0 && t0 == czero() {
            return Err(Error::PoleAtZero);
        }
        let mut acc = czero::<T>();
        for c in self.coeffs.iter().rev() {
            acc = acc * t0 + *c;
        }
        Ok(acc * t0.powi(self.base as i32))
    }

    /// Termwise maps coefficients through `f` (e.g. precision conversion).
    pub fn map_coeffs<U: Real>(&self, f: impl Fn(Complex<T>) -> Complex<U>) -> TruncatedSeries<U> {
        TruncatedSeries::new(self.base, self.coeffs.iter().map(|c| f(*c)).collect(), self.order)
    }

    /// Replaces `t` by `t^n`.
    pub fn ramify(&self, n: i64) -> Self {
        let order = if self.order >= EXACT {
            self.order
        } else {
            (self.order + 1) * n - 1
        };
        if self.is_zero() {
            return Self::zero(order);
        }
        let mut coeffs = vec![czero(); (self.coeffs.len() - 1) * n as usize + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * n as usize] = *c;
        }
        Self::trimmed(self.base * n, coeffs, order)
    }

    /// JSON rendering `{"base": b, "order": d, "coeffs": [[re, im], ...]}`.
    pub fn to_json(&self) -> String {
        let coeffs: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| format!("[{}, {}]", fmt_json(c.re), fmt_json(c.im)))
            .collect();
        format!(
            "{{\"base\": {}, \"order\": {}, \"coeffs\": [{}]}}",
            self.base,
            self.order,
            coeffs.join(", ")
        )
    }

    /// Text rendering with a parameter name, terms in increasing exponent order.
    pub fn render(&self, param: &str) -> String {
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == czero() {
                continue;
            }
            let e = self.base + k as i64;
            let sign = if c.im.is_sign_negative() { '-' } else { '+' };
            let coef = format!("({} {} {}*i)", fmt_sci(c.re), sign, fmt_sci(c.im.abs()));
            terms.push(match e {
                0 => coef,
                1 => format!("{}*{}", coef, param),
                _ => format!("{}*{}^{}", coef, param, e),
            });
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

impl<T: Real> fmt::Display for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O(t^{})", self.render("t"), self.order + 1)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl<'a, T: Real> $trait<&'a TruncatedSeries<T>> for &'a TruncatedSeries<T> {
            type Output = TruncatedSeries<T>;
            fn $method(self, rhs: &'a TruncatedSeries<T>) -> TruncatedSeries<T> {
                TruncatedSeries::$method(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<T: Real> Neg for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;
    fn neg(self) -> TruncatedSeries<T> {
        TruncatedSeries::neg(self)
    }
}
