//! Input files: a polynomial system, optional coordinate transforms, and
//! starting data.
//!
//! ```text
//! param t;
//! vars x1, x2, x3;
//! poly x1^2 + x2^2 + x3^2 - 4;
//! poly (x1-1)^2 + x2^2 - 1;
//! start point 0, 0, 0, 2;          # t first, or just the n coordinates
//! transform sub x1 = 2*t^2;        # applied in file order
//! start series x2 = 2*t; x3 = 2;   # in the coordinates after all transforms
//! ```
//!
//! Further statements: `transform ramify N;`, `transform unimodular [..] [..] ...;`
//! (rows of `M` in `x = z^M`), `transform rename a, b, ...;`,
//! `transform param NAME;` (a variable becomes the parameter; the system
//! must not involve the old one) and `augmented empty;` (the start fibre
//! `t = 0` has no points).

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::poly::parse::{end_position, ExprParser, LaurentExpr};
use crate::poly::{apply_unimodular, polynomial_from_tokens, tokenize, PolySystem, Token, UnimodularTransform};
use crate::scalar::{cone, czero, Real};
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, PartialEq)]
pub enum Transform<T> {
    /// Variable at `index` replaced by `sum_k g[k] t^k`.
    Substitute { name: String, index: usize, g: Vec<Complex<T>> },
    Ramify(u32),
    /// Per polynomial clearing monomials are kept alongside the matrix.
    Unimodular { m: UnimodularTransform, clearing: Vec<Vec<u32>> },
    Rename(Vec<String>),
    /// Variable at `index` became the parameter.
    Param { name: String, index: usize },
}

impl<T: Real> Transform<T> {
    pub fn describe(&self) -> String {
        match self {
            Transform::Substitute { name, .. } => format!("sub {}", name),
            Transform::Ramify(n) => format!("ramify {}", n),
            Transform::Unimodular { m, .. } => format!("unimodular {}x{}", m.dim(), m.dim()),
            Transform::Rename(names) => format!("rename {}", names.join(", ")),
            Transform::Param { name, .. } => format!("param {}", name),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Job<T> {
    /// The system as written.
    pub original: PolySystem<T>,
    /// The system after all transforms; series starts live here.
    pub system: PolySystem<T>,
    pub transforms: Vec<Transform<T>>,
    /// Start points `(t, x_1, ..., x_n)` in the original coordinates.
    pub points: Vec<Vec<Complex<T>>>,
    pub series_starts: Vec<Vec<TruncatedSeries<T>>>,
    pub augmented_empty: bool,
}

/// A statement: its tokens without the terminating `;`.
type Stmt<'a> = &'a [Token];

fn keyword<'a>(s: Stmt<'a>) -> Option<&'a str> {
    s.first().and_then(|t| t.ident())
}

fn expect_ident<'a>(s: Stmt<'a>, i: usize, what: &str, end: (usize, usize)) -> Result<&'a str> {
    match s.get(i) {
        Some(t) => t.ident().ok_or_else(|| t.error(format!("expected {}", what))),
        None => Err(Error::Syntax {
            line: s.last().map_or(end.0, |t| t.line),
            column: s.last().map_or(end.1, |t| t.column + 1),
            message: format!("expected {}", what),
        }),
    }
}

/// Comma-separated identifiers.
fn ident_list(s: Stmt, end: (usize, usize)) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (k, part) in s.split(|t| t.is_sym(',')).enumerate() {
        if part.len() != 1 {
            let at = part.first().or(s.get(k)).or(s.last());
            return Err(match at {
                Some(t) => t.error("expected a name"),
                None => Error::Syntax {
                    line: end.0,
                    column: end.1,
                    message: "expected a name".into(),
                },
            });
        }
        out.push(expect_ident(part, 0, "a name", end)?.to_string());
    }
    Ok(out)
}

fn check_names(names: &[String], param: &str, at: &Token) -> Result<()> {
    for (i, n) in names.iter().enumerate() {
        if n == "i" {
            return Err(at.error("`i` is the imaginary unit and cannot name a variable"));
        }
        if n == param || names[..i].contains(n) {
            return Err(at.error(format!("duplicate name `{}`", n)));
        }
    }
    Ok(())
}

/// Parses a constant expression such as `0.5 - 0.5*i`.
fn constant<T: Real>(tokens: &[Token], end: (usize, usize)) -> Result<Complex<T>> {
    let names: Vec<String> = Vec::new();
    let e: LaurentExpr<T> = ExprParser::new(tokens, &names, end).parse_all()?;
    e.as_constant()
        .ok_or_else(|| tokens[0].error("expected a constant"))
}

/// Parses a polynomial in the parameter alone into dense coefficients.
fn univariate<T: Real>(tokens: &[Token], param: &str, end: (usize, usize), allow_negative: bool) -> Result<(i64, Vec<Complex<T>>)> {
    let names = vec![param.to_string()];
    let e: LaurentExpr<T> = ExprParser::new(tokens, &names, end).parse_all()?;
    if e.terms.is_empty() {
        return Ok((0, Vec::new()));
    }
    let lo = e.terms.keys().map(|k| k[0]).min().unwrap();
    let hi = e.terms.keys().map(|k| k[0]).max().unwrap();
    if lo < 0 && !allow_negative {
        return Err(tokens[0].error(
            "negative exponents in a start series need a unimodular transform that removes them",
        ));
    }
    let mut v = vec![czero::<T>(); (hi - lo + 1) as usize];
    for (k, c) in &e.terms {
        v[(k[0] - lo) as usize] = *c;
    }
    Ok((lo as i64, v))
}

fn integer(tokens: &[Token], i: &mut usize) -> Result<i64> {
    let mut sign = 1;
    if tokens.get(*i).is_some_and(|t| t.is_sym('-')) {
        sign = -1;
        *i += 1;
    }
    let t = tokens.get(*i).ok_or_else(|| tokens[*i - 1].error("expected an integer"))?;
    match t.tok {
        crate::poly::Tok::Num(v) if v.fract() == 0.0 && v.abs() < 1e15 => {
            *i += 1;
            Ok(sign * v as i64)
        }
        _ => Err(t.error("expected an integer")),
    }
}

/// Parses an input file.
pub fn parse_job<T: Real>(text: &str) -> Result<Job<T>> {
    let tokens = tokenize(text)?;
    let end = end_position(text);
    let stmts: Vec<Stmt> = tokens.split(|t| t.is_sym(';')).filter(|s| !s.is_empty()).collect();

    let mut param = "t".to_string();
    let mut vars: Option<Vec<String>> = None;
    for s in &stmts {
        match keyword(s) {
            Some("param") => {
                if s.len() != 2 {
                    return Err(s[0].error("expected `param NAME;`"));
                }
                param = expect_ident(s, 1, "a parameter name", end)?.to_string();
            }
            Some("vars") => {
                if vars.is_some() {
                    return Err(s[0].error("variables declared twice"));
                }
                vars = Some(ident_list(&s[1..], end)?);
            }
            _ => {}
        }
    }
    let vars = vars.ok_or_else(|| Error::Input("missing `vars` declaration".into()))?;
    if let Some(s) = stmts.iter().find(|s| keyword(s) == Some("vars")) {
        check_names(&vars, &param, &s[0])?;
    }
    let mut names = vec![param.clone()];
    names.extend(vars.iter().cloned());

    let mut polys = Vec::new();
    let mut points = Vec::new();
    let mut series_blocks: Vec<Vec<Stmt>> = Vec::new();
    let mut transforms: Vec<Stmt> = Vec::new();
    let mut augmented_empty = false;
    let mut in_series = false;
    for s in &stmts {
        let kw = keyword(s);
        let continues = in_series && s.len() > 1 && s[1].is_sym('=') && kw.is_some();
        if continues && !matches!(kw, Some("param" | "vars" | "poly" | "start" | "transform" | "augmented")) {
            series_blocks.last_mut().unwrap().push(s);
            continue;
        }
        in_series = false;
        match kw {
            Some("param") | Some("vars") => {}
            Some("poly") => {
                if s.len() < 2 {
                    return Err(s[0].error("expected a polynomial"));
                }
                polys.push(polynomial_from_tokens(&s[1..], &names, end)?);
            }
            Some("start") => match expect_ident(s, 1, "`point` or `series`", end)? {
                "point" => {
                    let vals = s[2..]
                        .split(|t| t.is_sym(','))
                        .map(|part| {
                            if part.is_empty() {
                                Err(s[1].error("empty coordinate in start point"))
                            } else {
                                constant::<T>(part, end)
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let n = vars.len();
                    let p = if vals.len() == n + 1 {
                        vals
                    } else if vals.len() == n {
                        std::iter::once(czero()).chain(vals).collect()
                    } else {
                        return Err(Error::DimensionMismatch(format!(
                            "start point at line {} has {} values, expected {} or {}",
                            s[0].line,
                            vals.len(),
                            n,
                            n + 1
                        )));
                    };
                    points.push(p);
                }
                "series" => {
                    in_series = true;
                    series_blocks.push(if s.len() > 2 { vec![&s[2..]] } else { Vec::new() });
                }
                _ => return Err(s[1].error("expected `point` or `series`")),
            },
            Some("transform") => transforms.push(s),
            Some("augmented") => {
                if s.len() != 2 || s[1].ident() != Some("empty") {
                    return Err(s[0].error("expected `augmented empty;`"));
                }
                augmented_empty = true;
            }
            _ => return Err(s[0].error("unknown statement")),
        }
    }
    let original = PolySystem::new(polys, vars, param)?;

    let mut system = original.clone();
    let mut applied = Vec::new();
    for s in transforms {
        let (next, tr) = apply_transform(&system, s, end)?;
        system = next;
        applied.push(tr);
    }

    let mut series_starts = Vec::new();
    for block in series_blocks {
        series_starts.push(series_start(&system, &block, end)?);
    }
    Ok(Job {
        original,
        system,
        transforms: applied,
        points,
        series_starts,
        augmented_empty,
    })
}

fn apply_transform<T: Real>(f: &PolySystem<T>, s: Stmt, end: (usize, usize)) -> Result<(PolySystem<T>, Transform<T>)> {
    let kind = expect_ident(s, 1, "a transform kind", end)?;
    let rest = &s[2..];
    match kind {
        "sub" => {
            let name = expect_ident(rest, 0, "a variable", end)?;
            if !rest.get(1).is_some_and(|t| t.is_sym('=')) || rest.len() < 3 {
                return Err(rest[0].error("expected `transform sub NAME = EXPR;`"));
            }
            let index = f
                .var_names()
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            let (lo, tail) = univariate::<T>(&rest[2..], f.t_name(), end, false)?;
            let mut g = vec![czero::<T>(); lo as usize];
            g.extend(tail);
            let next = f.substitute_var(index, &g)?;
            Ok((
                next,
                Transform::Substitute {
                    name: name.to_string(),
                    index,
                    g,
                },
            ))
        }
        "ramify" => {
            let mut i = 0;
            let n = if rest.is_empty() { -1 } else { integer(rest, &mut i)? };
            if n < 1 || n > 64 || i != rest.len() {
                return Err(s[1].error("expected `transform ramify N;` with 1 <= N <= 64"));
            }
            Ok((f.ramify(n as u32), Transform::Ramify(n as u32)))
        }
        "unimodular" => {
            let mut rows = Vec::new();
            let mut i = 0;
            while i < rest.len() {
                if !rest[i].is_sym('[') {
                    return Err(rest[i].error("expected `[`"));
                }
                i += 1;
                let mut row = Vec::new();
                loop {
                    let at = i;
                    let v = integer(rest, &mut i)?;
                    if v.abs() > 64 {
                        return Err(rest[at].error("unimodular entries are limited to |m| <= 64"));
                    }
                    row.push(v);
                    match rest.get(i) {
                        Some(t) if t.is_sym(',') => i += 1,
                        Some(t) if t.is_sym(']') => {
                            i += 1;
                            break;
                        }
                        Some(t) => return Err(t.error("expected `,` or `]`")),
                        None => return Err(s[1].error("unterminated matrix row")),
                    }
                }
                rows.push(row);
            }
            let m = UnimodularTransform::new(rows)?;
            let out = apply_unimodular(f, &m)?;
            Ok((
                out.system,
                Transform::Unimodular {
                    m,
                    clearing: out.clearing,
                },
            ))
        }
        "rename" => {
            let names = ident_list(rest, end)?;
            check_names(&names, f.t_name(), &s[1])?;
            Ok((f.with_names(names.clone(), f.t_name())?, Transform::Rename(names)))
        }
        "param" => {
            if rest.len() != 1 {
                return Err(s[1].error("expected `transform param NAME;`"));
            }
            let name = expect_ident(rest, 0, "a variable", end)?;
            let index = f
                .var_names()
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
            Ok((
                f.promote_to_parameter(index)?,
                Transform::Param {
                    name: name.to_string(),
                    index,
                },
            ))
        }
        other => Err(s[1].error(format!("unknown transform `{}`", other))),
    }
}

fn series_start<T: Real>(f: &PolySystem<T>, block: &[Stmt], end: (usize, usize)) -> Result<Vec<TruncatedSeries<T>>> {
    let n = f.n();
    let mut out: Vec<Option<TruncatedSeries<T>>> = vec![None; n];
    for s in block {
        let name = expect_ident(s, 0, "a variable", end)?;
        if !s.get(1).is_some_and(|t| t.is_sym('=')) || s.len() < 3 {
            return Err(s[0].error("expected `NAME = EXPR`"));
        }
        let j = f
            .var_names()
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        if out[j].is_some() {
            return Err(s[0].error(format!("`{}` given twice in one start", name)));
        }
        let (base, coeffs) = univariate::<T>(&s[2..], f.t_name(), end, false)?;
        let degree = base + coeffs.len() as i64 - 1;
        out[j] = Some(TruncatedSeries::new(base, coeffs, degree.max(0)));
    }
    out.into_iter()
        .enumerate()
        .map(|(j, s)| {
            s.ok_or_else(|| {
                Error::DimensionMismatch(format!("start series does not give `{}`", f.var_names()[j]))
            })
        })
        .collect()
}

impl<T: Real> Job<T> {
    /// Series starts, or the start points as constant series when the file
    /// has no transforms.
    pub fn starts(&self) -> Result<Vec<Vec<TruncatedSeries<T>>>> {
        if !self.series_starts.is_empty() {
            return Ok(self.series_starts.clone());
        }
        if self.points.is_empty() {
            return Err(Error::Input("no start point or start series given".into()));
        }
        if !self.transforms.is_empty() {
            return Err(Error::Input(
                "start points are in the original coordinates; give a `start series` for the transformed system".into(),
            ));
        }
        Ok(self
            .points
            .iter()
            .map(|p| p[1..].iter().map(|c| TruncatedSeries::constant(*c, 0)).collect())
            .collect())
    }

    /// Maps a solution of the transformed system back to the original
    /// variables. After a ramification by `N` the result is a series in the
    /// new parameter `s` with `t = s^N`; the returned system is the original
    /// one with `t` replaced accordingly, so residuals can be checked there.
    pub fn to_original(&self, z: &[TruncatedSeries<T>]) -> Result<(Vec<TruncatedSeries<T>>, PolySystem<T>)> {
        let order = z.iter().map(|s| s.order()).min().unwrap_or(0);
        let mut z = z.to_vec();
        let mut ramification = 1u32;
        for tr in self.transforms.iter().rev() {
            match tr {
                Transform::Substitute { index, g, .. } => {
                    let g = TruncatedSeries::new(0, g.clone(), order).ramify(ramification as i64);
                    z.insert(*index, g.truncate(order));
                }
                Transform::Ramify(n) => ramification *= n,
                Transform::Rename(_) => {}
                Transform::Param { index, .. } => {
                    z.insert(*index, TruncatedSeries::monomial(cone(), ramification as i64, order));
                }
                Transform::Unimodular { m, .. } => {
                    let n = m.dim();
                    let mut x = Vec::with_capacity(n);
                    for j in 0..n {
                        let mut acc = TruncatedSeries::constant(cone(), crate::series::EXACT);
                        for (i, zi) in z.iter().enumerate() {
                            let e = m.matrix()[i][j];
                            if e > 0 {
                                acc = acc.mul(&zi.powi(e as u32));
                            } else if e < 0 {
                                acc = acc.mul(&zi.invert(order)?.powi((-e) as u32));
                            }
                        }
                        x.push(acc);
                    }
                    z = x;
                }
            }
        }
        let reference = if ramification > 1 {
            self.original.ramify(ramification)
        } else {
            self.original.clone()
        };
        Ok((z, reference))
    }
}
