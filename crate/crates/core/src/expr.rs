//! Text syntax for polynomials, forms and multivectors.
//!
//! Polynomials use integers, rationals `p/q`, generator names, `+ - * ^`
//! and parentheses. `d x` is the form `dx`, `(d x)*` the dual derivation
//! `(dx)*`; `^` followed by an integer is a power, otherwise the wedge
//! product. Juxtaposition multiplies.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::blade::Blade;
use crate::error::{Error, Result};
use crate::exterior::{Graded, KForm, Multivector};
use crate::presentation::SmoothPresentation;
use crate::ring::{Poly, Rational, Ring};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Form(usize),
    Dual(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
    ring: &'a Ring,
}

impl<'a> Lexer<'a> {
    fn err<T>(&self, line: usize, col: usize, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line,
            column: col,
            message: msg.into(),
        })
    }

    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.pos + k).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek(0).is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn ident_at(&self, mut k: usize) -> (String, usize) {
        let mut s = String::new();
        while let Some(c) = self.peek(k) {
            if c.is_alphanumeric() || c == '_' {
                s.push(c);
                k += 1;
            } else {
                break;
            }
        }
        (s, k)
    }

    fn ws_at(&self, mut k: usize) -> usize {
        while self.peek(k).is_some_and(char::is_whitespace) {
            k += 1;
        }
        k
    }

    fn advance(&mut self, k: usize) {
        for _ in 0..k {
            self.bump();
        }
    }

    fn generator(&self, name: &str, line: usize, col: usize) -> Result<usize> {
        match self.ring.index_of(name) {
            Some(i) => Ok(i),
            None => self.err(line, col, format!("undeclared generator `{name}`")),
        }
    }

    /// `d <name>` starting at offset `k` (pointing at `d`); returns the
    /// generator name, its offset and the offset after it.
    fn form_basis_at(&self, k: usize) -> Option<(String, usize, usize)> {
        let (word, after) = self.ident_at(k);
        if word != "d" {
            return None;
        }
        let start = self.ws_at(after);
        if start == after {
            return None;
        }
        let (name, end) = self.ident_at(start);
        if name.is_empty() || !name.starts_with(|c: char| c.is_alphabetic() || c == '_') {
            return None;
        }
        Some((name, start, end))
    }

    fn tokens(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek(0) else { break };
            let tok = match c {
                '+' => {
                    self.bump();
                    Tok::Plus
                }
                '-' => {
                    self.bump();
                    Tok::Minus
                }
                '*' => {
                    self.bump();
                    Tok::Star
                }
                '/' => {
                    self.bump();
                    Tok::Slash
                }
                '^' => {
                    self.bump();
                    Tok::Caret
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                '(' => {
                    // (d name)*
                    let k = self.ws_at(1);
                    let dual = self.form_basis_at(k).and_then(|(name, start, end)| {
                        let close = self.ws_at(end);
                        (self.peek(close) == Some(')') && self.peek(close + 1) == Some('*'))
                            .then_some((name, start, close + 2))
                    });
                    match dual {
                        Some((name, start, end)) => {
                            let gcol = col + start;
                            let i = self.generator(&name, line, gcol)?;
                            self.advance(end);
                            Tok::Dual(i)
                        }
                        None => {
                            self.bump();
                            Tok::LParen
                        }
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut s = String::new();
                    while let Some(d) = self.peek(0).filter(char::is_ascii_digit) {
                        s.push(d);
                        self.bump();
                    }
                    Tok::Int(s.parse().expect("digits"))
                }
                c if c.is_alphabetic() || c == '_' => {
                    if let Some((name, start, end)) = self.form_basis_at(0) {
                        let i = self.generator(&name, line, col + start)?;
                        self.advance(end);
                        Tok::Form(i)
                    } else {
                        let (name, end) = self.ident_at(0);
                        if name == "d" {
                            return self.err(line, col, "`d` must be followed by a generator name");
                        }
                        self.generator(&name, line, col)?;
                        self.advance(end);
                        Tok::Ident(name)
                    }
                }
                other => return self.err(line, col, format!("unexpected character `{other}`")),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sort {
    Scalar,
    Form,
    Vector,
}

/// An element of the free exterior algebra on forms or multivectors, not
/// necessarily homogeneous, with unreduced coefficients.
#[derive(Clone, Debug)]
struct Elem {
    sort: Sort,
    deg: usize,
    terms: BTreeMap<Blade, Poly>,
}

impl Elem {
    fn scalar(p: Poly) -> Elem {
        let mut terms = BTreeMap::new();
        if !p.is_zero() {
            terms.insert(Blade::EMPTY, p);
        }
        Elem {
            sort: Sort::Scalar,
            deg: 0,
            terms,
        }
    }

    fn as_scalar(&self, nvars: usize) -> Option<Poly> {
        if self.sort == Sort::Scalar {
            Some(self.terms.get(&Blade::EMPTY).cloned().unwrap_or_else(|| Poly::zero(nvars)))
        } else {
            None
        }
    }

    fn join_sort(a: Sort, b: Sort) -> Option<Sort> {
        match (a, b) {
            (Sort::Scalar, s) | (s, Sort::Scalar) => Some(s),
            (s, t) if s == t => Some(s),
            _ => None,
        }
    }

    /// `None` when sorts or degrees are incompatible.
    fn combine(mut self, other: Elem, sign: &Rational) -> Option<Elem> {
        self.sort = Elem::join_sort(self.sort, other.sort)?;
        if self.terms.is_empty() {
            self.deg = other.deg;
        } else if !other.terms.is_empty() && other.deg != self.deg {
            return None;
        }
        for (b, p) in other.terms {
            let e = self.terms.entry(b).or_insert_with(|| Poly::zero(p.nvars()));
            e.add_assign_scaled(&p, sign);
            if e.is_zero() {
                self.terms.remove(&b);
            }
        }
        Some(self)
    }

    fn mul(&self, other: &Elem, nvars: usize) -> Option<Elem> {
        let sort = Elem::join_sort(self.sort, other.sort)?;
        let mut terms: BTreeMap<Blade, Poly> = BTreeMap::new();
        for (j, f) in &self.terms {
            for (k, g) in &other.terms {
                if let Some(s) = j.wedge_sign(*k) {
                    let e = terms.entry(j.union(*k)).or_insert_with(|| Poly::zero(nvars));
                    e.add_assign_scaled(&f.mul_raw(g), &Rational::from_integer(BigInt::from(s)));
                }
            }
        }
        terms.retain(|_, p| !p.is_zero());
        Some(Elem {
            sort,
            deg: self.deg + other.deg,
            terms,
        })
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    ring: &'a Ring,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.end)
    }

    fn err<T>(&self, at: (usize, usize), msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line: at.0,
            column: at.1,
            message: msg.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Elem> {
        let at = self.here();
        let mut acc = self.term()?;
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => Rational::one(),
                Some(Tok::Minus) => -Rational::one(),
                _ => break,
            };
            self.next();
            let rhs = self.term()?;
            acc = match acc.combine(rhs, &sign) {
                Some(e) => e,
                None => return self.err(at, "cannot add terms of different sort or degree"),
            };
        }
        Ok(acc)
    }

    fn starts_atom(t: Option<&Tok>) -> bool {
        matches!(
            t,
            Some(Tok::Int(_) | Tok::Ident(_) | Tok::Form(_) | Tok::Dual(_) | Tok::LParen)
        )
    }

    fn term(&mut self) -> Result<Elem> {
        let mut acc = self.unary()?;
        loop {
            let at = self.here();
            match self.peek() {
                Some(Tok::Star) | Some(Tok::Caret) => {
                    self.next();
                }
                Some(Tok::Slash) => {
                    self.next();
                    let at = self.here();
                    let d = self.power()?;
                    let c = d
                        .as_scalar(self.nvars())
                        .and_then(|p| p.as_constant())
                        .filter(|c| !c.is_zero());
                    let Some(c) = c else {
                        return self.err(at, "division only by a nonzero constant");
                    };
                    let inv = c.recip();
                    for p in acc.terms.values_mut() {
                        *p = p.scale(&inv);
                    }
                    continue;
                }
                t if Parser::starts_atom(t) => {}
                _ => break,
            }
            let rhs = self.unary()?;
            acc = match acc.mul(&rhs, self.nvars()) {
                Some(e) => e,
                None => return self.err(at, "cannot multiply forms with multivectors"),
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Elem> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                let mut e = self.unary()?;
                for p in e.terms.values_mut() {
                    *p = p.neg();
                }
                Ok(e)
            }
            Some(Tok::Plus) => {
                self.next();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Elem> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            if let Some(Spanned { tok: Tok::Int(n), line, col }) = self.toks.get(self.pos + 1).cloned() {
                self.pos += 2;
                let Some(p) = base.as_scalar(self.nvars()) else {
                    return self.err((line, col), "only polynomials can be raised to a power");
                };
                let Some(e) = n.to_u32() else {
                    return self.err((line, col), "exponent too large");
                };
                let mut r = Poly::one(self.nvars());
                for _ in 0..e {
                    r = r.mul_raw(&p);
                }
                return Ok(Elem::scalar(r));
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Elem> {
        let at = self.here();
        let r = self.nvars();
        match self.next() {
            Some(Tok::Int(n)) => Ok(Elem::scalar(Poly::constant(r, Rational::from_integer(n)))),
            Some(Tok::Ident(name)) => {
                let i = self.ring.index_of(&name).expect("checked by lexer");
                Ok(Elem::scalar(Poly::var(r, i)))
            }
            Some(Tok::Form(i)) => Ok(Elem {
                sort: Sort::Form,
                deg: 1,
                terms: [(Blade::single(i), Poly::one(r))].into(),
            }),
            Some(Tok::Dual(i)) => Ok(Elem {
                sort: Sort::Vector,
                deg: 1,
                terms: [(Blade::single(i), Poly::one(r))].into(),
            }),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                if self.next() != Some(Tok::RParen) {
                    return self.err(self.toks.get(self.pos - 1).map(|t| (t.line, t.col)).unwrap_or(self.end), "expected `)`");
                }
                Ok(e)
            }
            Some(t) => self.err(at, format!("unexpected {}", describe(&t))),
            None => self.err(at, "unexpected end of input"),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Form(_) => "form basis".into(),
        Tok::Dual(_) => "dual basis".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
    }
}

/// A parsed value: a function, a form or a multivector.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Scalar(Poly),
    Form(KForm),
    Multivector(Multivector),
}

fn parse_elem(ring: &Ring, text: &str, line: usize, col: usize) -> Result<Elem> {
    let chars: Vec<char> = text.chars().collect();
    let mut end = (line, col);
    for c in &chars {
        if *c == '\n' {
            end = (end.0 + 1, 1);
        } else {
            end.1 += 1;
        }
    }
    let lexer = Lexer {
        chars,
        pos: 0,
        line,
        col,
        ring,
    };
    let toks = lexer.tokens()?;
    let mut p = Parser {
        toks,
        pos: 0,
        ring,
        end,
    };
    if p.peek().is_none() {
        return p.err(end, "empty expression");
    }
    let e = p.expr()?;
    if p.pos < p.toks.len() {
        let at = p.here();
        let t = p.toks[p.pos].tok.clone();
        return p.err(at, format!("unexpected {}", describe(&t)));
    }
    Ok(e)
}

/// Parses a polynomial whose text starts at `line:col`; the result is in
/// normal form.
pub fn parse_poly_at(ring: &Ring, text: &str, line: usize, col: usize) -> Result<Poly> {
    let e = parse_elem(ring, text, line, col)?;
    match e.as_scalar(ring.nvars()) {
        Some(p) => Ok(ring.normal_form(&p)),
        None => Err(Error::Parse {
            line,
            column: col,
            message: "expected a polynomial".into(),
        }),
    }
}

pub fn parse_poly(ring: &Ring, text: &str) -> Result<Poly> {
    parse_poly_at(ring, text, 1, 1)
}

pub fn parse_value_at(pres: &SmoothPresentation, text: &str, line: usize, col: usize) -> Result<Value> {
    let e = parse_elem(pres.ring(), text, line, col)?;
    let r = pres.nvars();
    Ok(match e.sort {
        Sort::Scalar => Value::Scalar(pres.ring().normal_form(&e.as_scalar(r).expect("scalar sort"))),
        Sort::Form => Value::Form(pres.canonicalize_form(e.deg, e.terms)),
        Sort::Vector => Value::Multivector(pres.canonicalize_mv(e.deg, e.terms)),
    })
}

pub fn parse_value(pres: &SmoothPresentation, text: &str) -> Result<Value> {
    parse_value_at(pres, text, 1, 1)
}

/// Parses a multivector; a bare polynomial is a 0-vector.
pub fn parse_multivector(pres: &SmoothPresentation, text: &str) -> Result<Multivector> {
    match parse_value(pres, text)? {
        Value::Scalar(p) => Ok(pres.scalar_mv(&p)),
        Value::Multivector(m) => Ok(m),
        Value::Form(_) => Err(Error::Parse {
            line: 1,
            column: 1,
            message: "expected a multivector, found a form".into(),
        }),
    }
}

/// Parses a form; a bare polynomial is a 0-form.
pub fn parse_form(pres: &SmoothPresentation, text: &str) -> Result<KForm> {
    match parse_value(pres, text)? {
        Value::Scalar(p) => Ok(pres.scalar_form(&p)),
        Value::Form(w) => Ok(w),
        Value::Multivector(_) => Err(Error::Parse {
            line: 1,
            column: 1,
            message: "expected a form, found a multivector".into(),
        }),
    }
}

fn render_graded<K>(pres: &SmoothPresentation, x: &Graded<K>, basis: impl Fn(usize) -> String) -> String {
    let ring = pres.ring();
    if x.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (b, c)) in x.terms().iter().enumerate() {
        let names: Vec<String> = b.indices().into_iter().map(&basis).collect();
        let base = names.join(" ^ ");
        // a degree-0 element has a single term
        let (neg, body) = if base.is_empty() {
            (false, ring.poly_string(c))
        } else if c.num_terms() == 1 {
            let (m, coef) = c.leading().unwrap();
            let a = coef.abs();
            let prefix = if m.is_one() {
                if a.is_one() {
                    String::new()
                } else {
                    format!("{a}*")
                }
            } else if a.is_one() {
                format!("{}*", ring.monomial_string(m))
            } else {
                format!("{a}*{}*", ring.monomial_string(m))
            };
            (coef.is_negative(), format!("{prefix}{base}"))
        } else {
            (false, format!("({})*{base}", ring.poly_string(c)))
        };
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

/// Canonical text, e.g. `x*(d x)* - y*(d y)*` or `(x + y)*(d x)* ^ (d y)*`.
pub fn render_multivector(pres: &SmoothPresentation, f: &Multivector) -> String {
    render_graded(pres, f, |i| format!("(d {})*", pres.names()[i]))
}

/// Canonical text, e.g. `2*x*y*d x + x^2*d y`.
pub fn render_form(pres: &SmoothPresentation, w: &KForm) -> String {
    render_graded(pres, w, |i| format!("d {}", pres.names()[i]))
}

pub fn render_value(pres: &SmoothPresentation, v: &Value) -> String {
    match v {
        Value::Scalar(p) => pres.poly_string(p),
        Value::Form(w) => render_form(pres, w),
        Value::Multivector(m) => render_multivector(pres, m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> SmoothPresentation {
        SmoothPresentation::polynomial(&["x", "y"])
    }

    #[test]
    fn polynomial_syntax() {
        let pr = plane();
        let r = pr.ring();
        let p = parse_poly(r, "3/2*x^2 y - (x - y)^2 + 1/3").unwrap();
        assert_eq!(r.poly_string(&p), "3/2*x^2*y - x^2 + 2*x*y - y^2 + 1/3");
        assert_eq!(r.poly_string(&parse_poly(r, "x/2 - -y").unwrap()), "1/2*x + y");
        assert_eq!(parse_poly(r, "0").unwrap(), r.zero());
    }

    #[test]
    fn graded_syntax_round_trips() {
        let pr = plane();
        let m = parse_multivector(&pr, "x*(d x)* - y*(d y)*").unwrap();
        assert_eq!(render_multivector(&pr, &m), "x*(d x)* - y*(d y)*");
        let m2 = parse_multivector(&pr, "(x + y) (d x)* ^ (d y)*").unwrap();
        assert_eq!(render_multivector(&pr, &m2), "(x + y)*(d x)* ^ (d y)*");
        let m3 = parse_multivector(&pr, "(d y)* ^ (d x)*").unwrap();
        assert_eq!(render_multivector(&pr, &m3), "-(d x)* ^ (d y)*");
        let w = parse_form(&pr, "2*x*y d x + x^2 d y").unwrap();
        let s = render_form(&pr, &w);
        assert_eq!(s, "2*x*y*d x + x^2*d y");
        assert_eq!(parse_form(&pr, &s).unwrap(), w);
        let w2 = parse_form(&pr, "-3*d x ^ d y").unwrap();
        assert_eq!(render_form(&pr, &w2), "-3*d x ^ d y");
        assert_eq!(parse_form(&pr, "d x ^ d x").unwrap().degree(), 2);
        assert!(parse_form(&pr, "d x ^ d x").unwrap().is_zero());
        let s0 = parse_multivector(&pr, "-x + 2").unwrap();
        assert_eq!(render_multivector(&pr, &s0), "-x + 2");
        assert_eq!(parse_multivector(&pr, &render_multivector(&pr, &s0)).unwrap(), s0);
    }

    #[test]
    fn errors_carry_positions() {
        let pr = plane();
        match parse_poly(pr.ring(), "x + q") {
            Err(Error::Parse { line: 1, column: 5, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_value(&pr, "d x + (d y)*").is_err());
        assert!(parse_value(&pr, "d x + 1").is_err());
        assert!(parse_poly(pr.ring(), "x /y").is_err());
        assert!(parse_poly(pr.ring(), "(x").is_err());
        match parse_value(&pr, "(d z)*") {
            Err(Error::Parse { column: 4, .. }) => {}
            other => panic!("{other:?}"),
        }
    }
}
