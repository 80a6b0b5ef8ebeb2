//! The torus algebra `G_t(T)` in its T-basis `(m,n)_T * W^(r,s)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use thiserror::Error;

use crate::scalar::{t_pow, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TorusError {
    #[error("standard curve ({0},{1}) has gcd outside {{1,2}}")]
    UnsupportedGcd(i64, i64),
}

pub fn det(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

/// The cone `m > 0` or `m = 0, n > 0` holding canonical T-parts.
pub fn in_cone(a: (i64, i64)) -> bool {
    a.0 > 0 || (a.0 == 0 && a.1 > 0)
}

/// A basis word `(m,n)_T * W^(r,s)`; `tpart = None` is a pure wedge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusWord {
    pub tpart: Option<(i64, i64)>,
    pub wpart: (i64, i64),
}

impl TorusWord {
    pub fn new(tpart: Option<(i64, i64)>, wpart: (i64, i64)) -> Self {
        debug_assert!(tpart.is_none_or(in_cone), "T-part outside the cone");
        TorusWord { tpart, wpart }
    }

    pub fn identity() -> Self {
        TorusWord { tpart: None, wpart: (0, 0) }
    }

    pub fn is_identity(&self) -> bool {
        self.tpart.is_none() && self.wpart == (0, 0)
    }
}

/// Words carrying a T-part sort before pure wedges.
impl Ord for TorusWord {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.tpart.is_none(), self.tpart, self.wpart).cmp(&(other.tpart.is_none(), other.tpart, other.wpart))
    }
}

impl PartialOrd for TorusWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn homology_class(w: &TorusWord) -> (i64, i64) {
    let (m, n) = w.tpart.unwrap_or((0, 0));
    (m + 2 * w.wpart.0, n + 2 * w.wpart.1)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TorusElement {
    terms: BTreeMap<TorusWord, Scalar>,
}

impl TorusElement {
    pub fn zero() -> Self {
        TorusElement::default()
    }

    pub fn one() -> Self {
        TorusElement::from_word(TorusWord::identity(), Scalar::one())
    }

    pub fn from_word(w: TorusWord, c: Scalar) -> Self {
        let mut e = TorusElement::zero();
        e.add_term(w, c);
        e
    }

    pub fn from_scalar(c: Scalar) -> Self {
        TorusElement::from_word(TorusWord::identity(), c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TorusWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &TorusWord) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: TorusWord, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = TorusElement::zero();
        for (w, v) in &self.terms {
            out.add_term(*w, v * c);
        }
        out
    }

    /// Adds `c * T(a) * W(w)` with `T(a)` rewritten into the cone.
    fn add_curve(&mut self, a: (i64, i64), w: (i64, i64), c: Scalar) {
        if a == (0, 0) {
            self.add_term(TorusWord::new(None, w), c * Scalar::from_int(2));
        } else if in_cone(a) {
            self.add_term(TorusWord::new(Some(a), w), c);
        } else {
            let merged = (a.0 + w.0, a.1 + w.1);
            self.add_term(TorusWord::new(Some((-a.0, -a.1)), merged), c * t_pow(2 * det(a, w)));
        }
    }
}

pub fn t_curve(m: i64, n: i64) -> TorusElement {
    let mut e = TorusElement::zero();
    e.add_curve((m, n), (0, 0), Scalar::one());
    e
}

pub fn wedge(r: i64, s: i64) -> TorusElement {
    TorusElement::from_word(TorusWord::new(None, (r, s)), Scalar::one())
}

/// `T(m,n)` for gcd 1, and `T(m,n) + 2 W(m/2,n/2)` for gcd 2.
pub fn standard_curve(m: i64, n: i64) -> Result<TorusElement, TorusError> {
    match m.gcd(&n) {
        1 => Ok(t_curve(m, n)),
        2 => Ok(t_curve(m, n) + wedge(m / 2, n / 2).scale(&Scalar::from_int(2))),
        _ => Err(TorusError::UnsupportedGcd(m, n)),
    }
}

fn mul_words(out: &mut TorusElement, x: &TorusWord, y: &TorusWord, c: Scalar) {
    let (wa, wb) = (x.wpart, y.wpart);
    let Some(tb) = y.tpart else {
        let w = (wa.0 + wb.0, wa.1 + wb.1);
        out.add_term(TorusWord::new(x.tpart, w), c * t_pow(2 * det(wa, wb)));
        return;
    };
    // W(wa) T(tb) = t^{-2 det(tb, wa)} T(tb) W(wa)
    let c = c * t_pow(-2 * det(tb, wa));
    let wab = (wa.0 + wb.0, wa.1 + wb.1);
    let fab = 2 * det(wa, wb);
    let Some(ta) = x.tpart else {
        out.add_term(TorusWord::new(Some(tb), wab), c * t_pow(fab));
        return;
    };
    // T(ta) T(tb) = T(ta + tb) + T(ta - tb) W(tb)
    out.add_curve((ta.0 + tb.0, ta.1 + tb.1), wab, &c * &t_pow(fab));
    let w1 = (tb.0 + wa.0, tb.1 + wa.1);
    let e = 2 * det(tb, wa) + 2 * det(w1, wb);
    out.add_curve((ta.0 - tb.0, ta.1 - tb.1), (w1.0 + wb.0, w1.1 + wb.1), c * t_pow(e));
}

pub fn mul(a: &TorusElement, b: &TorusElement) -> TorusElement {
    let mut out = TorusElement::zero();
    for (x, cx) in &a.terms {
        for (y, cy) in &b.terms {
            mul_words(&mut out, x, y, cx * cy);
        }
    }
    out
}

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(*w, c.clone());
        }
        out
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: &TorusElement) -> TorusElement {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(*w, -c);
        }
        out
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: &TorusElement) -> TorusElement {
        mul(self, rhs)
    }
}

impl Add for TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: TorusElement) -> TorusElement {
        &self + &rhs
    }
}

impl Sub for TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: TorusElement) -> TorusElement {
        &self - &rhs
    }
}

impl Mul for TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: TorusElement) -> TorusElement {
        mul(&self, &rhs)
    }
}
