//! Polynomial systems in `C[t, x_1, ..., x_n]`.

pub mod parse;
pub mod unimodular;

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{cone, czero, Real};
use crate::series::{TruncatedSeries, EXACT};

pub use parse::{tokenize, LaurentExpr, Tok, Token};
pub use unimodular::{apply_unimodular, UnimodularTransform};

#[derive(Clone, Debug, PartialEq)]
pub struct Monomial<T> {
    pub coeff: Complex<T>,
    pub t_exp: u32,
    pub x_exps: Vec<u32>,
}

impl<T: Real> Monomial<T> {
    pub fn eval_point(&self, t: Complex<T>, x: &[Complex<T>]) -> Complex<T> {
        let mut v = self.coeff * t.powu(self.t_exp);
        for (xi, &e) in x.iter().zip(&self.x_exps) {
            v *= xi.powu(e);
        }
        v
    }

    pub fn total_x_degree(&self) -> u32 {
        self.x_exps.iter().sum()
    }
}

/// A polynomial as a sorted list of monomials with distinct exponents.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    terms: Vec<Monomial<T>>,
}

impl<T: Real> Polynomial<T> {
    /// Combines like terms, drops exact zeros and sorts by `(t_exp, x_exps)`.
    pub fn new(mut terms: Vec<Monomial<T>>) -> Self {
        terms.sort_by(|a, b| (a.t_exp, &a.x_exps).cmp(&(b.t_exp, &b.x_exps)));
        let mut out: Vec<Monomial<T>> = Vec::with_capacity(terms.len());
        for m in terms {
            match out.last_mut() {
                Some(last) if last.t_exp == m.t_exp && last.x_exps == m.x_exps => last.coeff += m.coeff,
                _ => out.push(m),
            }
        }
        out.retain(|m| m.coeff != czero());
        Self { terms: out }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn terms(&self) -> &[Monomial<T>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Converts a parsed expression whose slot 0 is `t`; negative exponents are rejected.
    pub fn from_laurent(e: &LaurentExpr<T>) -> Option<Self> {
        let mut terms = Vec::with_capacity(e.terms.len());
        for (ex, c) in &e.terms {
            if ex.iter().any(|&k| k < 0) {
                return None;
            }
            terms.push(Monomial {
                coeff: *c,
                t_exp: ex[0] as u32,
                x_exps: ex[1..].iter().map(|&k| k as u32).collect(),
            });
        }
        Some(Self::new(terms))
    }

    pub fn diff_x(&self, j: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|m| m.x_exps[j] > 0)
            .map(|m| {
                let mut x_exps = m.x_exps.clone();
                x_exps[j] -= 1;
                Monomial {
                    coeff: m.coeff * T::lit(m.x_exps[j] as f64),
                    t_exp: m.t_exp,
                    x_exps,
                }
            })
            .collect();
        Self::new(terms)
    }

    pub fn diff_t(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|m| m.t_exp > 0)
            .map(|m| Monomial {
                coeff: m.coeff * T::lit(m.t_exp as f64),
                t_exp: m.t_exp - 1,
                x_exps: m.x_exps.clone(),
            })
            .collect();
        Self::new(terms)
    }

    pub fn eval_point(&self, t: Complex<T>, x: &[Complex<T>]) -> Complex<T> {
        self.terms.iter().fold(czero(), |acc, m| acc + m.eval_point(t, x))
    }

    /// Evaluates with `x_j := z_j`, using and extending the shared power cache.
    pub fn eval_series(&self, cache: &mut PowerCache<T>) -> TruncatedSeries<T> {
        let mut acc = TruncatedSeries::zero(EXACT);
        for m in &self.terms {
            let mut term = TruncatedSeries::monomial(m.coeff, m.t_exp as i64, EXACT);
            for (j, &e) in m.x_exps.iter().enumerate() {
                if e > 0 {
                    term = term.mul(cache.power(j, e));
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    pub fn max_x_degree(&self) -> u32 {
        self.terms.iter().map(|m| m.total_x_degree()).max().unwrap_or(0)
    }

    /// Writes the polynomial with 17 significant digits per coefficient part.
    pub fn render(&self, t_name: &str, var_names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|m| {
                let mut s = format!(
                    "({:.16e} {} {:.16e}*i)",
                    m.coeff.re,
                    if m.coeff.im.is_sign_negative() { '-' } else { '+' },
                    m.coeff.im.abs()
                );
                if m.t_exp > 0 {
                    s.push_str(&format!("*{}^{}", t_name, m.t_exp));
                }
                for (name, &e) in var_names.iter().zip(&m.x_exps) {
                    if e > 0 {
                        s.push_str(&format!("*{}^{}", name, e));
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

/// Lazily computed powers `z_j^k`, shared across the polynomials of one evaluation.
pub struct PowerCache<'a, T> {
    z: &'a [TruncatedSeries<T>],
    powers: Vec<Vec<TruncatedSeries<T>>>,
}

impl<'a, T: Real> PowerCache<'a, T> {
    pub fn new(z: &'a [TruncatedSeries<T>]) -> Self {
        Self {
            z,
            powers: z.iter().map(|s| vec![s.clone()]).collect(),
        }
    }

    pub fn power(&mut self, j: usize, e: u32) -> &TruncatedSeries<T> {
        let list = &mut self.powers[j];
        while list.len() < e as usize {
            let next = list.last().unwrap().mul(&self.z[j]);
            list.push(next);
        }
        &list[e as usize - 1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem<T> {
    polys: Vec<Polynomial<T>>,
    var_names: Vec<String>,
    t_name: String,
}

impl<T: Real> PolySystem<T> {
    pub fn new(polys: Vec<Polynomial<T>>, var_names: Vec<String>, t_name: impl Into<String>) -> Result<Self> {
        let n = var_names.len();
        if polys.is_empty() {
            return Err(Error::DimensionMismatch("a system needs at least one polynomial".into()));
        }
        if n == 0 {
            return Err(Error::DimensionMismatch("a system needs at least one variable".into()));
        }
        if polys.iter().flat_map(|p| &p.terms).any(|m| m.x_exps.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "monomial exponent vectors must have length {}",
                n
            )));
        }
        Ok(Self {
            polys,
            var_names,
            t_name: t_name.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.var_names.len()
    }

    pub fn m(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[Polynomial<T>] {
        &self.polys
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn t_name(&self) -> &str {
        &self.t_name
    }

    /// True when no monomial involves the parameter.
    pub fn is_t_free(&self) -> bool {
        self.polys.iter().flat_map(|p| &p.terms).all(|m| m.t_exp == 0)
    }

    pub fn max_x_degree(&self) -> u32 {
        self.polys.iter().map(|p| p.max_x_degree()).max().unwrap_or(0)
    }

    fn check_len(&self, len: usize, want: usize) -> Result<()> {
        if len != want {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values, got {}",
                want, len
            )));
        }
        Ok(())
    }

    /// Substitutes the series `z` for the variables, truncating at `order`.
    pub fn evaluate(&self, z: &[TruncatedSeries<T>], order: i64) -> Result<Vec<TruncatedSeries<T>>> {
        self.check_len(z.len(), self.n())?;
        let mut cache = PowerCache::new(z);
        Ok(self
            .polys
            .iter()
            .map(|p| p.eval_series(&mut cache).truncate(order))
            .collect())
    }

    pub fn eval_point(&self, t: Complex<T>, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.check_len(x.len(), self.n())?;
        Ok(self.polys.iter().map(|p| p.eval_point(t, x)).collect())
    }

    pub fn jacobian(&self) -> Jacobian<T> {
        Jacobian {
            entries: self
                .polys
                .iter()
                .map(|p| (0..self.n()).map(|j| p.diff_x(j)).collect())
                .collect(),
        }
    }

    /// Jacobian of `(t, f_1, ..., f_m)` at `p = (t, x_1, ..., x_n)`.
    pub fn jacobian_aug(&self, p: &[Complex<T>]) -> Result<Matrix<T>> {
        self.check_len(p.len(), self.n() + 1)?;
        let (t, x) = (p[0], &p[1..]);
        let mut out = Matrix::zeros(self.m() + 1, self.n() + 1);
        out[(0, 0)] = cone();
        for (i, f) in self.polys.iter().enumerate() {
            out[(i + 1, 0)] = f.diff_t().eval_point(t, x);
            for j in 0..self.n() {
                out[(i + 1, j + 1)] = f.diff_x(j).eval_point(t, x);
            }
        }
        Ok(out)
    }

    /// Replaces `t` by `t^k`.
    pub fn ramify(&self, k: u32) -> Self {
        assert!(k >= 1, "ramification index must be positive");
        let polys = self
            .polys
            .iter()
            .map(|p| {
                Polynomial::new(
                    p.terms
                        .iter()
                        .map(|m| Monomial {
                            coeff: m.coeff,
                            t_exp: m.t_exp * k,
                            x_exps: m.x_exps.clone(),
                        })
                        .collect(),
                )
            })
            .collect();
        Self {
            polys,
            var_names: self.var_names.clone(),
            t_name: self.t_name.clone(),
        }
    }

    /// Replaces `x_j` by the polynomial `g(t) = sum_k g[k] t^k`, removing the variable.
    pub fn substitute_var(&self, j: usize, g: &[Complex<T>]) -> Result<Self> {
        let n = self.n();
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, len: n });
        }
        if n == 1 {
            return Err(Error::DimensionMismatch("cannot eliminate the only variable".into()));
        }
        let mut polys = Vec::with_capacity(self.m());
        for p in &self.polys {
            let mut terms = Vec::new();
            for m in &p.terms {
                // Dense expansion of g^e in t.
                let mut ge = vec![cone::<T>()];
                for _ in 0..m.x_exps[j] {
                    let mut next = vec![czero(); ge.len() + g.len().max(1) - 1];
                    for (a, ca) in ge.iter().enumerate() {
                        for (b, cb) in g.iter().enumerate() {
                            next[a + b] += *ca * *cb;
                        }
                    }
                    ge = next;
                }
                let mut x_exps = m.x_exps.clone();
                x_exps.remove(j);
                for (k, c) in ge.iter().enumerate() {
                    if *c != czero() {
                        terms.push(Monomial {
                            coeff: m.coeff * *c,
                            t_exp: m.t_exp + k as u32,
                            x_exps: x_exps.clone(),
                        });
                    }
                }
            }
            polys.push(Polynomial::new(terms));
        }
        let mut var_names = self.var_names.clone();
        var_names.remove(j);
        Ok(Self {
            polys,
            var_names,
            t_name: self.t_name.clone(),
        })
    }

    /// Turns variable `j` into the parameter; the system must not involve `t`.
    pub fn promote_to_parameter(&self, j: usize) -> Result<Self> {
        let n = self.n();
        if j >= n {
            return Err(Error::IndexOutOfRange { index: j, len: n });
        }
        if n == 1 {
            return Err(Error::DimensionMismatch("cannot promote the only variable".into()));
        }
        if !self.is_t_free() {
            return Err(Error::Input(format!(
                "system already depends on `{}`; cannot promote `{}`",
                self.t_name, self.var_names[j]
            )));
        }
        let polys = self
            .polys
            .iter()
            .map(|p| {
                Polynomial::new(
                    p.terms
                        .iter()
                        .map(|m| {
                            let mut x_exps = m.x_exps.clone();
                            let e = x_exps.remove(j);
                            Monomial {
                                coeff: m.coeff,
                                t_exp: e,
                                x_exps,
                            }
                        })
                        .collect(),
                )
            })
            .collect();
        let mut var_names = self.var_names.clone();
        let t_name = var_names.remove(j);
        Ok(Self {
            polys,
            var_names,
            t_name,
        })
    }

    pub fn with_names(&self, var_names: Vec<String>, t_name: impl Into<String>) -> Result<Self> {
        self.check_len(var_names.len(), self.n())?;
        Ok(Self {
            polys: self.polys.clone(),
            var_names,
            t_name: t_name.into(),
        })
    }

    /// Full input-file text (`param`, `vars`, `poly` statements).
    pub fn to_input_string(&self) -> String {
        let mut s = format!("param {};\nvars {};\n", self.t_name, self.var_names.join(", "));
        for p in &self.polys {
            s.push_str(&format!("poly {};\n", p.render(&self.t_name, &self.var_names)));
        }
        s
    }
}

/// Polynomials separated by `;`, one per line.
impl<T: Real> fmt::Display for PolySystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.polys {
            writeln!(f, "{};", p.render(&self.t_name, &self.var_names))?;
        }
        Ok(())
    }
}

/// Matrix of partial derivatives `df_i/dx_j` (no `t` column).
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian<T> {
    pub entries: Vec<Vec<Polynomial<T>>>,
}

impl<T: Real> Jacobian<T> {
    pub fn eval_point(&self, t: Complex<T>, x: &[Complex<T>]) -> Matrix<T> {
        Matrix::from_rows(
            self.entries
                .iter()
                .map(|row| row.iter().map(|p| p.eval_point(t, x)).collect())
                .collect(),
        )
    }

    pub fn eval_series(&self, z: &[TruncatedSeries<T>], order: i64) -> Vec<Vec<TruncatedSeries<T>>> {
        let mut cache = PowerCache::new(z);
        self.entries
            .iter()
            .map(|row| row.iter().map(|p| p.eval_series(&mut cache).truncate(order)).collect())
            .collect()
    }
}

/// Parses `;`-separated polynomials in the parameter `param` and variables `vars`.
pub fn parse_system<T: Real>(text: &str, param: &str, vars: &[&str]) -> Result<PolySystem<T>> {
    let var_names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    let mut names = vec![param.to_string()];
    names.extend(var_names.iter().cloned());
    let tokens = tokenize(text)?;
    let end = parse::end_position(text);
    let mut polys = Vec::new();
    for chunk in tokens.split(|t| t.is_sym(';')) {
        if chunk.is_empty() {
            continue;
        }
        polys.push(polynomial_from_tokens(chunk, &names, end)?);
    }
    PolySystem::new(polys, var_names, param)
}

/// Parses a token run into a polynomial; `names[0]` is the parameter.
pub fn polynomial_from_tokens<T: Real>(
    tokens: &[Token],
    names: &[String],
    end: (usize, usize),
) -> Result<Polynomial<T>> {
    let expr = parse::ExprParser::new(tokens, names, end).parse_all::<T>()?;
    Polynomial::from_laurent(&expr).ok_or_else(|| tokens[0].error("negative exponents are not allowed in a polynomial"))
}
