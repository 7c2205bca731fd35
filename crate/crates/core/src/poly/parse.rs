//! Lexer and expression parser for polynomial input.
//!
//! Expressions are expanded on the fly into sparse Laurent polynomials over
//! `(t, x_1, ..., x_n)`; a polynomial system only accepts the result when every
//! exponent is non-negative.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cone, czero, Real};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub fn is_sym(&self, c: char) -> bool {
        self.tok == Tok::Sym(c)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.tok {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

/// Splits text into tokens; `#` starts a comment running to end of line.
pub fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lexeme: String = chars[start..i].iter().collect();
            let value = lexeme.parse::<f64>().map_err(|_| Error::Syntax {
                line: l0,
                column: c0,
                message: format!("malformed number `{}`", lexeme),
            })?;
            col += i - start;
            out.push(Token {
                tok: Tok::Num(value),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
            continue;
        }
        if "+-*/^(),;=[]".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                column: c0,
            });
            i += 1;
            col += 1;
            continue;
        }
        return Err(Error::Syntax {
            line: l0,
            column: c0,
            message: format!("unexpected character `{}`", c),
        });
    }
    Ok(out)
}

/// Sparse Laurent polynomial keyed by exponent vectors `(t, x_1, ..., x_n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentExpr<T> {
    pub dim: usize,
    pub terms: BTreeMap<Vec<i32>, Complex<T>>,
}

impl<T: Real> LaurentExpr<T> {
    pub fn constant(dim: usize, c: Complex<T>) -> Self {
        let mut terms = BTreeMap::new();
        if c != czero() {
            terms.insert(vec![0; dim], c);
        }
        Self { dim, terms }
    }

    pub fn variable(dim: usize, k: usize) -> Self {
        let mut e = vec![0; dim];
        e[k] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, cone());
        Self { dim, terms }
    }

    pub fn add(&self, other: &Self, sign: T) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_insert_with(czero);
            *slot += *c * sign;
        }
        terms.retain(|_, c| *c != czero());
        Self { dim: self.dim, terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Vec<i32>, Complex<T>> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<i32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert_with(czero) += *ca * *cb;
            }
        }
        terms.retain(|_, c| *c != czero());
        Self { dim: self.dim, terms }
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut terms: BTreeMap<_, _> = self.terms.iter().map(|(e, v)| (e.clone(), *v * c)).collect();
        terms.retain(|_, c| *c != czero());
        Self { dim: self.dim, terms }
    }

    pub fn as_constant(&self) -> Option<Complex<T>> {
        match self.terms.len() {
            0 => Some(czero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then_some(*c)
            }
            _ => None,
        }
    }

    /// Integer power; negative powers only for single monomials.
    pub fn pow(&self, e: i32) -> Option<Self> {
        if e < 0 {
            if self.terms.len() != 1 {
                return None;
            }
            let (ex, c) = self.terms.iter().next().unwrap();
            let inv = cone::<T>() / *c;
            let mut acc = Self::constant(self.dim, cone());
            let mono = Self {
                dim: self.dim,
                terms: [(ex.iter().map(|x| -x).collect(), inv)].into_iter().collect(),
            };
            for _ in 0..(-e) {
                acc = acc.mul(&mono);
            }
            return Some(acc);
        }
        let mut acc = Self::constant(self.dim, cone());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        Some(acc)
    }
}

/// Recursive-descent parser over a token slice.
///
/// `names[k]` is the identifier bound to exponent slot `k`; slot 0 is the
/// parameter. The identifier `i` is the imaginary unit.
pub struct ExprParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    names: &'a [String],
    end: (usize, usize),
}

impl<'a> ExprParser<'a> {
    pub fn new(tokens: &'a [Token], names: &'a [String], end: (usize, usize)) -> Self {
        Self {
            tokens,
            pos: 0,
            names,
            end,
        }
    }

    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn eof_error(&self, message: &str) -> Error {
        Error::Syntax {
            line: self.end.0,
            column: self.end.1,
            message: message.to_string(),
        }
    }

    /// Parses the whole slice as one expression.
    pub fn parse_all<T: Real>(mut self) -> Result<LaurentExpr<T>> {
        if self.tokens.is_empty() {
            return Err(self.eof_error("expected an expression"));
        }
        let e = self.expr()?;
        if let Some(tok) = self.peek() {
            return Err(tok.error("unexpected token after expression"));
        }
        Ok(e)
    }

    fn expr<T: Real>(&mut self) -> Result<LaurentExpr<T>> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            let sign = if tok.is_sym('+') {
                T::one()
            } else if tok.is_sym('-') {
                -T::one()
            } else {
                break;
            };
            self.pos += 1;
            let rhs = self.term()?;
            acc = acc.add(&rhs, sign);
        }
        Ok(acc)
    }

    fn term<T: Real>(&mut self) -> Result<LaurentExpr<T>> {
        let mut acc = self.unary()?;
        while let Some(tok) = self.peek() {
            if tok.is_sym('*') {
                self.pos += 1;
                let rhs = self.unary()?;
                acc = acc.mul(&rhs);
            } else if tok.is_sym('/') {
                self.pos += 1;
                let rhs = self.unary()?;
                let c = rhs
                    .as_constant()
                    .ok_or_else(|| tok.error("division is only allowed by constants"))?;
                if c == czero() {
                    return Err(tok.error("division by zero"));
                }
                acc = acc.scale(cone::<T>() / c);
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary<T: Real>(&mut self) -> Result<LaurentExpr<T>> {
        match self.peek() {
            Some(tok) if tok.is_sym('-') => {
                self.pos += 1;
                Ok(self.unary::<T>()?.scale(Complex::new(-T::one(), T::zero())))
            }
            Some(tok) if tok.is_sym('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power<T: Real>(&mut self) -> Result<LaurentExpr<T>> {
        let base = self.atom()?;
        let Some(tok) = self.peek() else {
            return Ok(base);
        };
        if !tok.is_sym('^') {
            return Ok(base);
        }
        self.pos += 1;
        let mut negative = false;
        if self.peek().is_some_and(|t| t.is_sym('-')) {
            negative = true;
            self.pos += 1;
        }
        let exp_tok = self.peek().ok_or_else(|| self.eof_error("expected exponent"))?;
        let e = match exp_tok.tok {
            Tok::Num(v) if v.fract() == 0.0 && v >= 0.0 && v <= 256.0 => v as i32,
            _ => return Err(exp_tok.error("exponent must be a non-negative integer literal")),
        };
        self.pos += 1;
        let e = if negative { -e } else { e };
        base.pow(e)
            .ok_or_else(|| exp_tok.error("negative powers are only allowed on monomials"))
    }

    fn atom<T: Real>(&mut self) -> Result<LaurentExpr<T>> {
        let dim = self.names.len();
        let tok = self.peek().ok_or_else(|| self.eof_error("unexpected end of expression"))?;
        self.pos += 1;
        match &tok.tok {
            Tok::Num(v) => Ok(LaurentExpr::constant(dim, Complex::new(T::lit(*v), T::zero()))),
            Tok::Ident(name) => {
                if self.peek().is_some_and(|t| t.is_sym('(')) {
                    return Err(tok.error(format!(
                        "function `{}` is not supported; substitute constants before input",
                        name
                    )));
                }
                if let Some(k) = self.names.iter().position(|n| n == name) {
                    return Ok(LaurentExpr::variable(dim, k));
                }
                if name == "i" {
                    return Ok(LaurentExpr::constant(dim, Complex::new(T::zero(), T::one())));
                }
                Err(Error::UnknownVariable(name.clone()))
            }
            Tok::Sym('(') => {
                let inner = self.expr()?;
                match self.peek() {
                    Some(t) if t.is_sym(')') => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(t) => Err(t.error("expected `)`")),
                    None => Err(self.eof_error("expected `)`")),
                }
            }
            Tok::Sym(c) => Err(tok.error(format!("unexpected `{}`", c))),
        }
    }
}

/// Parses one expression in the given names (slot 0 is the parameter).
pub fn parse_expr<T: Real>(text: &str, names: &[String]) -> Result<LaurentExpr<T>> {
    let tokens = tokenize(text)?;
    let end = end_position(text);
    ExprParser::new(&tokens, names, end).parse_all()
}

pub(crate) fn end_position(text: &str) -> (usize, usize) {
    let line = text.lines().count().max(1);
    let col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn expands_products_and_powers() {
        let e: LaurentExpr<f64> = parse_expr("(x1-1)^2", &names(&["t", "x1"])).unwrap();
        assert_eq!(e.terms.len(), 3);
        assert_eq!(e.terms[&vec![0, 2]], Complex::new(1.0, 0.0));
        assert_eq!(e.terms[&vec![0, 1]], Complex::new(-2.0, 0.0));
        assert_eq!(e.terms[&vec![0, 0]], Complex::new(1.0, 0.0));
    }

    #[test]
    fn imaginary_unit_and_scientific_numbers() {
        let e: LaurentExpr<f64> = parse_expr("(-5.0e-1 - 5.0e-1*i)*t^2", &names(&["t"])).unwrap();
        assert_eq!(e.terms[&vec![2]], Complex::new(-0.5, -0.5));
    }

    #[test]
    fn division_by_constant_only() {
        let e: LaurentExpr<f64> = parse_expr("39/32*t^2", &names(&["t"])).unwrap();
        assert_eq!(e.terms[&vec![2]].re, 39.0 / 32.0);
        assert!(parse_expr::<f64>("1/t", &names(&["t"])).is_err());
    }

    #[test]
    fn negative_power_of_monomial() {
        let e: LaurentExpr<f64> = parse_expr("2*t^-1", &names(&["t"])).unwrap();
        assert_eq!(e.terms[&vec![-1]].re, 2.0);
        assert!(parse_expr::<f64>("(1+t)^-1", &names(&["t"])).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expr::<f64>("x1 +\n  * 2", &names(&["t", "x1"])) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{:?}", other),
        }
        assert_eq!(
            parse_expr::<f64>("y + 1", &names(&["t", "x1"])),
            Err(Error::UnknownVariable("y".into()))
        );
        assert!(matches!(
            parse_expr::<f64>("sqrt(3)*t", &names(&["t"])),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(tokenize("x $ 1"), Err(Error::Syntax { line: 1, column: 3, .. })));
    }

    #[test]
    fn comments_are_skipped() {
        let toks = tokenize("x1 # trailing words\n+ 1").unwrap();
        assert_eq!(toks.len(), 3);
        assert_eq!(toks[1].line, 2);
    }
}
