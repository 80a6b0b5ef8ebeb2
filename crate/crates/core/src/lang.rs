//! Text syntax for scalars, torus and solid-torus elements, and lens tensors.
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := int ['/' int] | 't' ['^' ['-'] int] | atom | '(' expr ')'
//! atom   := T(m,n) | W(r,s) | c(n) | w(r) | xT(k) | x(m,n) | y(r,s)
//! lens   := expr ['(x)' expr] | '[' expr '(x)' expr ']' (('+'|'-') '[' ... ']')*
//! ```

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

use crate::annulus::{self, AnnulusElement, AnnulusWord};
use crate::lens::LensElement;
use crate::scalar::{t_pow, Scalar, ScalarFraction};
use crate::torus::{self, TorusElement, TorusWord};

const MAX_INDEX: i64 = 1_000_000;
const MAX_CURVE_INDEX: i64 = 200;
const MAX_DEPTH: usize = 128;
const MAX_EXPONENT: i64 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("parse error at {pos}: expected {}, found {found}", expected.join(" or "))]
    Parse { pos: usize, expected: Vec<String>, found: String },
    #[error("sort error at {pos}: {message}")]
    Sort { pos: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sort {
    Scalar,
    Torus,
    Annulus,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sort::Scalar => "scalar",
            Sort::Torus => "torus",
            Sort::Annulus => "annulus",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    T(i64, i64),
    W(i64, i64),
    C(i64),
    Wedge(i64),
    XT(i64),
    X(i64, i64),
    Y(i64, i64),
}

impl Atom {
    fn sort(&self) -> Sort {
        match self {
            Atom::T(..) | Atom::W(..) => Sort::Torus,
            _ => Sort::Annulus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Scalar(Scalar),
    Atom(Atom),
    Neg(Box<Expr>),
    Add(usize, Box<Expr>, Box<Expr>),
    Sub(usize, Box<Expr>, Box<Expr>),
    Mul(usize, Box<Expr>, Box<Expr>),
}

/// A parsed element of any sort.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Scalar(Scalar),
    Torus(TorusElement),
    Annulus(AnnulusElement),
    Lens(LensElement),
}

impl Element {
    pub fn sort_name(&self) -> &'static str {
        match self {
            Element::Scalar(_) => "scalar",
            Element::Torus(_) => "torus",
            Element::Annulus(_) => "annulus",
            Element::Lens(_) => "lens",
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Scalar(s) => write!(f, "{s}"),
            Element::Torus(a) => f.write_str(&print_torus(a)),
            Element::Annulus(u) => f.write_str(&print_annulus(u)),
            Element::Lens(e) => f.write_str(&print_lens(e)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    Tensor,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Sym(c) => write!(f, "'{c}'"),
            Tok::Tensor => write!(f, "'(x)'"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, LangError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let skip_ws = |mut k: usize| {
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        k
    };
    while i < chars.len() {
        let (pos, ch) = chars[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().map(|c| c.1).collect();
            out.push((pos, Tok::Int(digits.parse().expect("ascii digits"))));
        } else if ch.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((pos, Tok::Ident(chars[start..i].iter().map(|c| c.1).collect())));
        } else if ch == '(' {
            let k = skip_ws(i + 1);
            if k < chars.len() && chars[k].1 == 'x' {
                let k2 = skip_ws(k + 1);
                if k2 < chars.len() && chars[k2].1 == ')' {
                    out.push((pos, Tok::Tensor));
                    i = k2 + 1;
                    continue;
                }
            }
            out.push((pos, Tok::Sym('(')));
            i += 1;
        } else if "()+-*^/,[]".contains(ch) {
            out.push((pos, Tok::Sym(ch)));
            i += 1;
        } else {
            return Err(LangError::Parse { pos, expected: vec!["a token".into()], found: format!("'{ch}'") });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    depth: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, LangError> {
        Ok(Parser { toks: lex(text)?, at: 0, depth: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> Result<T, LangError> {
        Err(LangError::Parse {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), LangError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.error(&[&format!("'{c}'")])
        }
    }

    fn finish(&self) -> Result<(), LangError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }

    fn expr(&mut self) -> Result<Expr, LangError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error(&["shallower nesting"]);
        }
        let mut lhs = if self.eat('-') {
            Expr::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            let pos = self.pos();
            if self.eat('+') {
                lhs = Expr::Add(pos, Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(pos, Box::new(lhs), Box::new(self.term()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, LangError> {
        let mut lhs = self.factor()?;
        loop {
            let pos = self.pos();
            if !self.eat('*') {
                return Ok(lhs);
            }
            lhs = Expr::Mul(pos, Box::new(lhs), Box::new(self.factor()?));
        }
    }

    fn int(&mut self) -> Result<BigInt, LangError> {
        match self.peek() {
            Tok::Int(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            _ => self.error(&["integer"]),
        }
    }

    fn signed(&mut self, limit: i64) -> Result<i64, LangError> {
        let neg = self.eat('-');
        if !neg {
            self.eat('+');
        }
        let pos = self.pos();
        let n = self.int()?;
        let n = if neg { -n } else { n };
        match i64::try_from(&n) {
            Ok(v) if v.abs() <= limit => Ok(v),
            _ => Err(LangError::Parse {
                pos,
                expected: vec![format!("an index of absolute value at most {limit}")],
                found: n.to_string(),
            }),
        }
    }

    fn args<const N: usize>(&mut self, limits: [i64; N]) -> Result<[i64; N], LangError> {
        self.expect('(')?;
        let mut out = [0; N];
        for (i, limit) in limits.into_iter().enumerate() {
            if i > 0 {
                self.expect(',')?;
            }
            out[i] = self.signed(limit)?;
        }
        self.expect(')')?;
        Ok(out)
    }

    fn factor(&mut self) -> Result<Expr, LangError> {
        match self.peek().clone() {
            Tok::Int(_) => {
                let num = self.int()?;
                if self.eat('/') {
                    let pos = self.pos();
                    let den = self.int()?;
                    if den == BigInt::from(0) {
                        return Err(LangError::Parse {
                            pos,
                            expected: vec!["nonzero denominator".into()],
                            found: "0".into(),
                        });
                    }
                    return Ok(Expr::Scalar(Scalar::from(BigRational::new(num, den))));
                }
                Ok(Expr::Scalar(Scalar::from(BigRational::from_integer(num))))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                let atom = match name.as_str() {
                    "t" => {
                        let k = if self.eat('^') { self.signed(MAX_EXPONENT)? } else { 1 };
                        return Ok(Expr::Scalar(t_pow(k)));
                    }
                    "T" => {
                        let [m, n] = self.args([MAX_INDEX; 2])?;
                        Atom::T(m, n)
                    }
                    "W" => {
                        let [r, s] = self.args([MAX_INDEX; 2])?;
                        Atom::W(r, s)
                    }
                    "c" => Atom::C(self.args([MAX_INDEX])?[0]),
                    "w" => Atom::Wedge(self.args([MAX_INDEX])?[0]),
                    "xT" => Atom::XT(self.args([MAX_CURVE_INDEX])?[0]),
                    "x" => {
                        let [m, n] = self.args([MAX_CURVE_INDEX, MAX_INDEX])?;
                        Atom::X(m, n)
                    }
                    "y" => {
                        let [r, s] = self.args([MAX_INDEX; 2])?;
                        Atom::Y(r, s)
                    }
                    _ => {
                        self.at -= 1;
                        return self.error(&["t", "T", "W", "c", "w", "xT", "x", "y"]);
                    }
                };
                Ok(Expr::Atom(atom))
            }
            _ => self.error(&["integer", "t", "atom", "'('"]),
        }
    }
}

enum Value {
    S(Scalar),
    T(TorusElement),
    A(AnnulusElement),
}

impl Value {
    fn sort(&self) -> Sort {
        match self {
            Value::S(_) => Sort::Scalar,
            Value::T(_) => Sort::Torus,
            Value::A(_) => Sort::Annulus,
        }
    }

    fn into_torus(self) -> TorusElement {
        match self {
            Value::S(s) => TorusElement::from_scalar(s),
            Value::T(a) => a,
            Value::A(_) => unreachable!("sort checked"),
        }
    }

    fn into_annulus(self) -> AnnulusElement {
        match self {
            Value::S(s) => AnnulusElement::from_scalar(s),
            Value::A(u) => u,
            Value::T(_) => unreachable!("sort checked"),
        }
    }
}

fn mixed(pos: usize, a: Sort, b: Sort) -> LangError {
    LangError::Sort { pos, message: format!("cannot combine {a} and {b} elements") }
}

fn eval_atom(a: &Atom) -> Value {
    match *a {
        Atom::T(m, n) => Value::T(torus::t_curve(m, n)),
        Atom::W(r, s) => Value::T(torus::wedge(r, s)),
        Atom::C(n) => Value::A(annulus::core(n)),
        Atom::Wedge(r) => Value::A(annulus::wedge1(r)),
        Atom::XT(k) => Value::A(annulus::t_core(k)),
        Atom::X(m, n) => Value::A(annulus::x(m, n)),
        Atom::Y(r, s) => Value::A(annulus::y(r, s)),
    }
}

/// The sort of `e`, or the first place where sorts mix.
pub fn infer_sort(e: &Expr) -> Result<Sort, LangError> {
    match e {
        Expr::Scalar(_) => Ok(Sort::Scalar),
        Expr::Atom(a) => Ok(a.sort()),
        Expr::Neg(x) => infer_sort(x),
        Expr::Add(pos, a, b) | Expr::Sub(pos, a, b) | Expr::Mul(pos, a, b) => {
            let (sa, sb) = (infer_sort(a)?, infer_sort(b)?);
            match (sa, sb) {
                (Sort::Scalar, s) | (s, Sort::Scalar) => Ok(s),
                (x, y) if x == y => Ok(x),
                (x, y) => Err(mixed(*pos, x, y)),
            }
        }
    }
}

fn eval(e: &Expr) -> Value {
    match e {
        Expr::Scalar(s) => Value::S(s.clone()),
        Expr::Atom(a) => eval_atom(a),
        Expr::Neg(x) => match eval(x) {
            Value::S(s) => Value::S(-s),
            Value::T(a) => Value::T(-&a),
            Value::A(u) => Value::A(-&u),
        },
        Expr::Add(_, a, b) | Expr::Sub(_, a, b) => {
            let neg = matches!(e, Expr::Sub(..));
            let (va, vb) = (eval(a), eval(b));
            match va.sort().max_with(vb.sort()) {
                Sort::Scalar => {
                    let (Value::S(x), Value::S(y)) = (va, vb) else { unreachable!() };
                    Value::S(if neg { &x - &y } else { &x + &y })
                }
                Sort::Torus => {
                    let (x, y) = (va.into_torus(), vb.into_torus());
                    Value::T(if neg { &x - &y } else { &x + &y })
                }
                Sort::Annulus => {
                    let (x, y) = (va.into_annulus(), vb.into_annulus());
                    Value::A(if neg { &x - &y } else { &x + &y })
                }
            }
        }
        Expr::Mul(_, a, b) => match (eval(a), eval(b)) {
            (Value::S(x), Value::S(y)) => Value::S(&x * &y),
            (Value::S(c), Value::T(x)) | (Value::T(x), Value::S(c)) => Value::T(x.scale(&c)),
            (Value::S(c), Value::A(x)) | (Value::A(x), Value::S(c)) => Value::A(x.scale(&c)),
            (Value::T(x), Value::T(y)) => Value::T(torus::mul(&x, &y)),
            (Value::A(x), Value::A(y)) => Value::A(annulus::mul(&x, &y)),
            _ => unreachable!("sort checked"),
        },
    }
}

impl Sort {
    fn max_with(self, other: Sort) -> Sort {
        if self == Sort::Scalar {
            other
        } else {
            self
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, LangError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

fn parse_sorted(text: &str, want: Sort) -> Result<Value, LangError> {
    let e = parse_expr(text)?;
    let sort = infer_sort(&e)?;
    if sort != Sort::Scalar && sort != want {
        return Err(LangError::Sort { pos: 0, message: format!("expected a {want} element, found {sort}") });
    }
    Ok(eval(&e))
}

pub fn parse_scalar(text: &str) -> Result<Scalar, LangError> {
    match parse_sorted(text, Sort::Scalar)? {
        Value::S(s) => Ok(s),
        _ => unreachable!("sort checked"),
    }
}

pub fn parse_torus(text: &str) -> Result<TorusElement, LangError> {
    Ok(parse_sorted(text, Sort::Torus)?.into_torus())
}

pub fn parse_annulus(text: &str) -> Result<AnnulusElement, LangError> {
    Ok(parse_sorted(text, Sort::Annulus)?.into_annulus())
}

/// A scalar, or a quotient `(num)/(den)` as printed for fractions.
pub fn parse_fraction(text: &str) -> Result<ScalarFraction, LangError> {
    if let Ok(s) = parse_scalar(text) {
        return Ok(ScalarFraction::from(s));
    }
    let trimmed = text.trim();
    let mut depth = 0usize;
    for (i, ch) in trimmed.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '/' if depth == 0 && i > 0 => {
                let num = parse_scalar(&trimmed[..i])?;
                let den = parse_scalar(&trimmed[i + 1..])?;
                return ScalarFraction::new(num, den).map_err(|_| LangError::Parse {
                    pos: i,
                    expected: vec!["nonzero denominator".into()],
                    found: trimmed[i + 1..].to_string(),
                });
            }
            _ => {}
        }
    }
    parse_scalar(text).map(ScalarFraction::from)
}

fn lens_side(p: &mut Parser) -> Result<AnnulusElement, LangError> {
    let pos = p.pos();
    let e = p.expr()?;
    match infer_sort(&e)? {
        Sort::Torus => Err(LangError::Sort { pos, message: "tensor factors must be annulus elements".into() }),
        _ => Ok(eval(&e).into_annulus()),
    }
}

fn lens_term(p: &mut Parser) -> Result<LensElement, LangError> {
    let left = lens_side(p)?;
    if *p.peek() != Tok::Tensor {
        return p.error(&["'(x)'"]);
    }
    p.bump();
    let right = lens_side(p)?;
    Ok(LensElement::new(left, right))
}

/// `left (x) right`, a signed sum of bracketed tensors, or a bare annulus element `u` read as `u (x) 1`.
pub fn parse_lens(text: &str) -> Result<LensElement, LangError> {
    let mut p = Parser::new(text)?;
    let first_is_bracket = matches!(p.peek(), Tok::Sym('['))
        || (matches!(p.peek(), Tok::Sym('-' | '+')) && matches!(p.toks.get(1), Some((_, Tok::Sym('[')))));
    if !first_is_bracket {
        let left = lens_side(&mut p)?;
        let right = if *p.peek() == Tok::Tensor {
            p.bump();
            lens_side(&mut p)?
        } else {
            AnnulusElement::one()
        };
        p.finish()?;
        return Ok(LensElement::new(left, right));
    }
    let mut out = LensElement::default();
    let mut first = true;
    loop {
        let neg = if first {
            let n = p.eat('-');
            if !n {
                p.eat('+');
            }
            n
        } else if p.eat('-') {
            true
        } else if p.eat('+') {
            false
        } else {
            break;
        };
        first = false;
        p.expect('[')?;
        let term = lens_term(&mut p)?;
        p.expect(']')?;
        let sign = Scalar::from_int(if neg { -1 } else { 1 });
        for (l, r, c) in term.terms {
            out.terms.push((l, r, &c * &sign));
        }
    }
    p.finish()?;
    Ok(out)
}

/// Parses any sort: lens if a tensor or bracket is present, otherwise by inference.
pub fn parse_any(text: &str) -> Result<Element, LangError> {
    let toks = lex(text)?;
    if toks.iter().any(|(_, t)| *t == Tok::Tensor || *t == Tok::Sym('[')) {
        return Ok(Element::Lens(parse_lens(text)?));
    }
    let e = parse_expr(text)?;
    Ok(match infer_sort(&e)? {
        Sort::Scalar => Element::Scalar(parse_scalar(text)?),
        Sort::Torus => Element::Torus(eval(&e).into_torus()),
        Sort::Annulus => Element::Annulus(eval(&e).into_annulus()),
    })
}

impl FromStr for Scalar {
    type Err = LangError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scalar(s)
    }
}

impl FromStr for TorusElement {
    type Err = LangError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_torus(s)
    }
}

impl FromStr for AnnulusElement {
    type Err = LangError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_annulus(s)
    }
}

/// Writes `sum c_i word_i` with words already in display order; an empty word is the identity.
fn write_sum(out: &mut String, terms: &[(String, &Scalar)]) {
    if terms.is_empty() {
        out.push('0');
        return;
    }
    let alone = terms.len() == 1;
    for (i, (word, c)) in terms.iter().enumerate() {
        let (neg, body) = match c.as_monomial() {
            Some((_, v)) if v.is_negative() => (true, -(*c).clone()),
            Some(_) => (false, (*c).clone()),
            None => (false, (*c).clone()),
        };
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let coeff = if body.is_unit() { body.to_string() } else { format!("({body})") };
        match (word.is_empty(), body.is_one()) {
            (true, _) if alone && !body.is_unit() => {
                out.push_str(&body.to_string());
            }
            (true, _) => out.push_str(&coeff),
            (false, true) => out.push_str(word),
            (false, false) => {
                let _ = write!(out, "{coeff}*{word}");
            }
        }
    }
}

fn torus_word_text(w: &TorusWord) -> String {
    let mut parts = Vec::new();
    if let Some((m, n)) = w.tpart {
        parts.push(format!("T({m},{n})"));
    }
    if w.wpart != (0, 0) {
        parts.push(format!("W({},{})", w.wpart.0, w.wpart.1));
    }
    parts.join("*")
}

fn annulus_word_text(w: &AnnulusWord) -> String {
    let mut parts = Vec::new();
    if w.n() != 0 {
        parts.push(format!("c({})", w.n()));
    }
    if w.r() != 0 {
        parts.push(format!("w({})", w.r()));
    }
    parts.join("*")
}

pub fn print_torus(a: &TorusElement) -> String {
    let terms: Vec<_> = a.terms().map(|(w, c)| (torus_word_text(w), c)).collect();
    let mut out = String::new();
    write_sum(&mut out, &terms);
    out
}

pub fn print_annulus(u: &AnnulusElement) -> String {
    let terms: Vec<_> = u.terms().map(|(w, c)| (annulus_word_text(w), c)).collect();
    let mut out = String::new();
    write_sum(&mut out, &terms);
    out
}

/// Canonical text of the bilinear normal form of `e`.
pub fn print_lens(e: &LensElement) -> String {
    let n = e.normalized();
    match n.terms.as_slice() {
        [] => "0".into(),
        [(l, r, _)] => format!("{} (x) {}", print_annulus(l), print_annulus(r)),
        terms => terms
            .iter()
            .map(|(l, r, _)| format!("[{} (x) {}]", print_annulus(l), print_annulus(r)))
            .collect::<Vec<_>>()
            .join(" + "),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{t_curve, wedge};

    #[test]
    fn parse_examples() {
        let a = parse_torus("T(1,0)*W(0,1) + 2*T(0,1)").unwrap();
        let expected = &torus::mul(&t_curve(1, 0), &wedge(0, 1)) + &t_curve(0, 1).scale(&Scalar::from_int(2));
        assert_eq!(a, expected);
        assert_eq!(parse_annulus("c(2)*w(-1)").unwrap(), AnnulusElement::word(2, -1));
        let e = parse_lens("c(1) (x) w(3)").unwrap();
        assert_eq!(e.terms.len(), 1);
        assert!(matches!(parse_any("T(1,0)*c(1)"), Err(LangError::Sort { .. })));
    }

    #[test]
    fn print_examples() {
        assert_eq!(print_torus(&TorusElement::zero()), "0");
        assert_eq!(print_torus(&TorusElement::one().scale(&Scalar::from_int(2))), "2");
        assert_eq!(print_torus(&torus::mul(&t_curve(1, 0), &t_curve(1, 0))), "T(2,0) + 2*W(1,0)");
        let u = AnnulusElement::from_word(AnnulusWord::new(0, 1), t_pow(-2));
        assert_eq!(print_annulus(&u), "t^-2*w(1)");
        assert_eq!(print_annulus(&AnnulusElement::from_scalar(t_pow(1) + t_pow(-1))), "t + t^-1");
        let mut v = AnnulusElement::from_scalar(t_pow(1) + t_pow(-1));
        v.add_term(AnnulusWord::new(1, 0), -t_pow(2));
        assert_eq!(print_annulus(&v), "(t + t^-1) - t^2*c(1)");
    }

    #[test]
    fn scalar_text() {
        let s: Scalar = "3/2*t^2 + 1 - t^-4".parse().unwrap();
        assert_eq!(s.to_string(), "3/2*t^2 + 1 - t^-4");
        assert!("(t + t^-1)^2".parse::<Scalar>().is_err());
        assert_eq!("(t+t^-1)*(t+t^-1)".parse::<Scalar>().unwrap().to_string(), "t^2 + 2 + t^-2");
        assert_eq!(parse_fraction("(t)/(t + 1)").unwrap().to_string(), "(t)/(t + 1)");
    }

    #[test]
    fn lens_forms() {
        let e = parse_lens("[c(1) (x) w(1)] - [c(2) (x) 1]").unwrap();
        assert_eq!(parse_lens(&print_lens(&e)).unwrap(), e);
        assert_eq!(parse_lens("c(2)").unwrap(), LensElement::left(AnnulusElement::word(2, 0)));
        assert!(matches!(parse_lens("T(1,0) (x) 1"), Err(LangError::Sort { .. })));
        assert_eq!(print_lens(&LensElement::default()), "0");
    }

    #[test]
    fn errors_are_positioned() {
        match parse_torus("T(1,0) + ") {
            Err(LangError::Parse { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("{other:?}"),
        }
        assert!(parse_annulus("x(100000,0)").is_err());
        assert!(parse_torus(&"(".repeat(10_000)).is_err());
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_torus("T(99999999999999999999999,0)").is_err());
    }
}
