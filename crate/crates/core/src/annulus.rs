//! The commutative solid-torus algebra `G_t(S^1 x D)` with basis `c^n w^r`, `n >= 0`.

use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, RwLock};

use num_rational::BigRational;
use num_traits::One;

use crate::scalar::{t_pow, Scalar};

/// The word `(n) * W^(r)`: `n` parallel cores and a 2-labeled curve of winding `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnulusWord {
    n: i64,
    r: i64,
}

impl AnnulusWord {
    /// Panics if `n < 0`; negative cores are expressed through [`core`].
    pub fn new(n: i64, r: i64) -> Self {
        assert!(n >= 0, "annulus word with negative core multiplicity {n}");
        AnnulusWord { n, r }
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn r(&self) -> i64 {
        self.r
    }
}

pub fn winding(w: &AnnulusWord) -> i64 {
    w.n + 2 * w.r
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AnnulusElement {
    terms: BTreeMap<AnnulusWord, Scalar>,
}

/// Coefficients on the T-form basis `(k)_T * W^(l)`, keyed by `(k, l)` with `k >= 0`.
pub type TForm = BTreeMap<(i64, i64), Scalar>;

impl AnnulusElement {
    pub fn zero() -> Self {
        AnnulusElement::default()
    }

    pub fn one() -> Self {
        AnnulusElement::word(0, 0)
    }

    pub fn word(n: i64, r: i64) -> Self {
        AnnulusElement::from_word(AnnulusWord::new(n, r), Scalar::one())
    }

    pub fn from_word(w: AnnulusWord, c: Scalar) -> Self {
        let mut e = AnnulusElement::zero();
        e.add_term(w, c);
        e
    }

    pub fn from_scalar(c: Scalar) -> Self {
        AnnulusElement::from_word(AnnulusWord::new(0, 0), c)
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

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&AnnulusWord, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &AnnulusWord) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    /// Largest core multiplicity present.
    pub fn degree(&self) -> Option<i64> {
        self.terms.keys().map(|w| w.n).max()
    }

    pub fn add_term(&mut self, w: AnnulusWord, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(w).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&w);
        }
    }

    pub fn add_scaled(&mut self, other: &AnnulusElement, c: &Scalar) {
        for (w, v) in &other.terms {
            self.add_term(*w, v * c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = AnnulusElement::zero();
        out.add_scaled(self, c);
        out
    }

    /// Multiplies by `W^(r)`.
    pub fn shift_wedge(&self, r: i64) -> Self {
        AnnulusElement { terms: self.terms.iter().map(|(w, c)| (AnnulusWord::new(w.n, w.r + r), c.clone())).collect() }
    }
}

/// `(n)` for `n >= 0`, and `(|n|) W^(n)` for `n < 0`.
pub fn core(n: i64) -> AnnulusElement {
    if n >= 0 {
        AnnulusElement::word(n, 0)
    } else {
        AnnulusElement::word(-n, n)
    }
}

pub fn wedge1(r: i64) -> AnnulusElement {
    AnnulusElement::word(0, r)
}

pub fn mul(u: &AnnulusElement, v: &AnnulusElement) -> AnnulusElement {
    let mut out = AnnulusElement::zero();
    for (a, ca) in &u.terms {
        for (b, cb) in &v.terms {
            out.add_term(AnnulusWord::new(a.n + b.n, a.r + b.r), ca * cb);
        }
    }
    out
}

type Memo = RwLock<HashMap<(i64, i64), Arc<AnnulusElement>>>;

static X_MEMO: LazyLock<Memo> = LazyLock::new(|| RwLock::new(HashMap::new()));

fn x_seed(m: i64, n: i64) -> Option<AnnulusElement> {
    match m {
        0 => Some(AnnulusElement::from_scalar(t_pow(n) + t_pow(-n))),
        1 => Some(AnnulusElement::from_word(AnnulusWord::new(1, 0), t_pow(n))),
        -1 => Some(AnnulusElement::from_word(AnnulusWord::new(1, -1), t_pow(-n))),
        _ => None,
    }
}

fn memo_get(m: i64, n: i64) -> Option<Arc<AnnulusElement>> {
    X_MEMO.read().expect("x memo poisoned").get(&(m, n)).cloned()
}

/// `x_{m,n}`, the projection of `(m,n)_T`, shared from the memo table.
pub fn x_shared(m: i64, n: i64) -> Arc<AnnulusElement> {
    if let Some(v) = memo_get(m, n) {
        return v;
    }
    if let Some(seed) = x_seed(m, n) {
        let v = Arc::new(seed);
        X_MEMO.write().expect("x memo poisoned").insert((m, n), v.clone());
        return v;
    }
    // x_{j+1} = (1) x_j - W x_{j-1}, or its mirror with (1)W^(-1) and W^(-1).
    let step = m.signum();
    let (mult, back) = if step > 0 { (core(1), wedge1(1)) } else { (core(-1), wedge1(-1)) };
    let mut prev = x_shared(0, n);
    let mut cur = x_shared(step, n);
    let mut j = step;
    while j != m {
        j += step;
        let next = match memo_get(j, n) {
            Some(v) => v,
            None => {
                let v = Arc::new(&mul(&mult, &cur) - &mul(&back, &prev));
                X_MEMO.write().expect("x memo poisoned").insert((j, n), v.clone());
                v
            }
        };
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

pub fn x(m: i64, n: i64) -> AnnulusElement {
    (*x_shared(m, n)).clone()
}

/// `y_{r,s} = t^{-2rs} W^(r)`.
pub fn y(r: i64, s: i64) -> AnnulusElement {
    AnnulusElement::from_word(AnnulusWord::new(0, r), t_pow(-2 * r * s))
}

/// `(k)_T`: `x_{k,0}` for `k >= 0`, and `(|k|)_T W^(k)` for `k < 0`.
pub fn t_core(k: i64) -> AnnulusElement {
    if k >= 0 {
        x(k, 0)
    } else {
        x_shared(-k, 0).shift_wedge(k)
    }
}

pub fn from_tform(tf: &TForm) -> AnnulusElement {
    let mut out = AnnulusElement::zero();
    for ((k, l), c) in tf {
        for (w, v) in x_shared(*k, 0).terms() {
            out.add_term(AnnulusWord::new(w.n, w.r + l), v * c);
        }
    }
    out
}

/// Back-substitution on the top core multiplicity; `(0)_T = 2` costs a factor 1/2.
pub fn to_tform(u: &AnnulusElement) -> TForm {
    let half = Scalar::from(BigRational::new(1.into(), 2.into()));
    let mut rest = u.clone();
    let mut out = TForm::new();
    while let Some((&w, c)) = rest.terms.iter().next_back() {
        let c = c.clone();
        if w.n == 0 {
            rest.terms.remove(&w);
            out.insert((0, w.r), &c * &half);
            continue;
        }
        out.insert((w.n, w.r), c.clone());
        for (v, cv) in x_shared(w.n, 0).terms() {
            rest.add_term(AnnulusWord::new(v.n, v.r + w.r), -(cv * &c));
        }
    }
    out
}

/// The `S^3` evaluation `(n) -> (t + t^-1)^n`, `W^(r) -> 1`.
pub fn evaluate_unknots(u: &AnnulusElement) -> Scalar {
    let loop_value = t_pow(1) + t_pow(-1);
    u.terms().map(|(w, c)| c * &loop_value.pow(w.n as u32)).sum()
}

impl Add for &AnnulusElement {
    type Output = AnnulusElement;
    fn add(self, rhs: &AnnulusElement) -> AnnulusElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl Sub for &AnnulusElement {
    type Output = AnnulusElement;
    fn sub(self, rhs: &AnnulusElement) -> AnnulusElement {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::from(-BigRational::one()));
        out
    }
}

impl Neg for &AnnulusElement {
    type Output = AnnulusElement;
    fn neg(self) -> AnnulusElement {
        self.scale(&Scalar::from_int(-1))
    }
}

impl Mul for &AnnulusElement {
    type Output = AnnulusElement;
    fn mul(self, rhs: &AnnulusElement) -> AnnulusElement {
        mul(self, rhs)
    }
}

impl Add for AnnulusElement {
    type Output = AnnulusElement;
    fn add(self, rhs: AnnulusElement) -> AnnulusElement {
        &self + &rhs
    }
}

impl Sub for AnnulusElement {
    type Output = AnnulusElement;
    fn sub(self, rhs: AnnulusElement) -> AnnulusElement {
        &self - &rhs
    }
}

impl Mul for AnnulusElement {
    type Output = AnnulusElement;
    fn mul(self, rhs: AnnulusElement) -> AnnulusElement {
        mul(&self, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(terms: &[((i64, i64), Scalar)]) -> AnnulusElement {
        let mut e = AnnulusElement::zero();
        for ((n, r), c) in terms {
            e.add_term(AnnulusWord::new(*n, *r), c.clone());
        }
        e
    }

    #[test]
    fn cores_and_products() {
        assert_eq!(core(0), AnnulusElement::one());
        assert_eq!(core(-1), AnnulusElement::word(1, -1));
        assert_eq!(&core(1) * &core(1), core(2));
        assert_eq!(&wedge1(2) * &wedge1(-5), wedge1(-3));
        assert_eq!(&core(1) * &core(-1), AnnulusElement::word(2, -1));
    }

    #[test]
    fn chebyshev_cores() {
        let two = Scalar::from_int(2);
        assert_eq!(t_core(0), AnnulusElement::from_scalar(two.clone()));
        assert_eq!(t_core(2), el(&[((2, 0), Scalar::one()), ((0, 1), -two)]));
        assert_eq!(t_core(3), el(&[((3, 0), Scalar::one()), ((1, 1), Scalar::from_int(-3))]));
        assert_eq!(t_core(-2), t_core(2).shift_wedge(-2));
    }

    #[test]
    fn projection_values() {
        assert_eq!(x(0, 3), AnnulusElement::from_scalar(t_pow(3) + t_pow(-3)));
        assert_eq!(x(1, 4), AnnulusElement::from_word(AnnulusWord::new(1, 0), t_pow(4)));
        assert_eq!(x(2, 1), el(&[((2, 0), t_pow(1)), ((0, 1), -(t_pow(1) + t_pow(-1)))]));
        assert_eq!(y(1, 1), AnnulusElement::from_word(AnnulusWord::new(0, 1), t_pow(-2)));
        assert_eq!(y(3, 0), wedge1(3));
        assert_eq!(y(0, 7), AnnulusElement::one());
    }

    #[test]
    fn tform_basis_change() {
        let tf = to_tform(&core(2));
        assert_eq!(tf, TForm::from([((0, 1), Scalar::one()), ((2, 0), Scalar::one())]));
        assert_eq!(to_tform(&AnnulusElement::word(1, 5)), TForm::from([((1, 5), Scalar::one())]));
        let u = el(&[((4, -1), t_pow(2)), ((1, 3), Scalar::from_int(5)), ((0, 0), t_pow(-1))]);
        assert_eq!(from_tform(&to_tform(&u)), u);
    }

    #[test]
    fn unknot_evaluation() {
        let loop_value = t_pow(1) + t_pow(-1);
        assert_eq!(evaluate_unknots(&core(2)), &loop_value * &loop_value);
        assert_eq!(evaluate_unknots(&x(0, 5)), t_pow(5) + t_pow(-5));
        assert_eq!(winding(&AnnulusWord::new(2, -1)), 0);
    }
}
