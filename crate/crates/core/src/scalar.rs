//! Laurent polynomials in `t` over the rationals, and their fraction field.

use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division is not exact in the Laurent ring")]
    NotExactDivision,
}

/// A Laurent polynomial `sum c_k t^k` with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// polynomials.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Scalar {
    terms: BTreeMap<i64, BigRational>,
}

pub fn t_pow(k: i64) -> Scalar {
    Scalar::monomial(BigRational::one(), k)
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        t_pow(0)
    }

    pub fn monomial(c: BigRational, k: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Scalar { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::monomial(BigRational::from_integer(BigInt::from(n)), 0)
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Scalar::monomial(BigRational::new(num.into(), den.into()), 0)
    }

    /// Builds a scalar from `(exponent, coefficient)` pairs, summing repeats.
    pub fn from_terms<I: IntoIterator<Item = (i64, BigRational)>>(it: I) -> Self {
        let mut s = Scalar::zero();
        for (k, c) in it {
            s.add_term(k, c);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: i64) -> BigRational {
        self.terms.get(&k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `Some((k, c))` when the scalar is the single term `c t^k`.
    pub fn as_monomial(&self) -> Option<(i64, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(k, c)| (*k, c))
        } else {
            None
        }
    }

    /// Units of the Laurent ring are exactly the nonzero monomials.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn add_term(&mut self, k: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect() }
    }

    /// Sum of coefficients, i.e. evaluation at `t = 1`.
    pub fn eval_one(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |acc, c| acc + c)
    }

    pub fn pow(&self, n: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Inverse of a unit; `None` for non-monomials.
    pub fn inv_unit(&self) -> Option<Scalar> {
        let (k, c) = self.as_monomial()?;
        Some(Scalar::monomial(c.recip(), -k))
    }

    /// Returns `q` with `q * b == self`.
    pub fn div_exact(&self, b: &Scalar) -> Result<Scalar, ScalarError> {
        if b.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if let Some(inv) = b.inv_unit() {
            return Ok(self * &inv);
        }
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        let (ea, eb) = (self.min_exp().unwrap(), b.min_exp().unwrap());
        let (q, r) = poly_divmod(&self.shift(-ea), &b.shift(-eb));
        if !r.is_zero() {
            return Err(ScalarError::NotExactDivision);
        }
        Ok(q.shift(ea - eb))
    }
}

/// Division with remainder of ordinary polynomials (all exponents `>= 0`).
fn poly_divmod(a: &Scalar, b: &Scalar) -> (Scalar, Scalar) {
    let (db, lb) = {
        let (k, c) = b.terms.iter().next_back().expect("nonzero divisor");
        (*k, c.clone())
    };
    let mut q = Scalar::zero();
    let mut r = a.clone();
    while let Some(dr) = r.max_exp() {
        if dr < db {
            break;
        }
        let c = r.coeff(dr) / &lb;
        let step = Scalar::monomial(c, dr - db);
        r -= &(&step * b);
        q += &step;
    }
    (q, r)
}

fn poly_monic(a: &Scalar) -> Scalar {
    match a.terms.values().next_back() {
        Some(lc) => a.scale(&lc.recip()),
        None => Scalar::zero(),
    }
}

fn poly_gcd(a: &Scalar, b: &Scalar) -> Scalar {
    let (mut x, mut y) = (poly_monic(a), poly_monic(b));
    while !y.is_zero() {
        let (_, r) = poly_divmod(&x, &y);
        x = y;
        y = poly_monic(&r);
    }
    x
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<BigRational> for Scalar {
    fn from(c: BigRational) -> Self {
        Scalar::monomial(c, 0)
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, c.clone());
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        for (k, c) in &rhs.terms {
            self.add_term(*k, -c.clone());
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if let Some((k, c)) = rhs.as_monomial() {
            return Scalar { terms: self.terms.iter().map(|(e, v)| (e + k, v * c)).collect() };
        }
        let mut out = Scalar::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr for $ty {
            type Output = $ty;
            fn $m(self, rhs: $ty) -> $ty { (&self).$m(&rhs) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, rhs: &$ty) -> $ty { (&self).$m(rhs) }
        }
    )*};
}

forward_owned!(Scalar, Add add, Sub sub, Mul mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, s| {
            acc += &s;
            acc
        })
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, c: &BigRational, k: i64) -> fmt::Result {
    match (c.is_one(), k) {
        (_, 0) => write!(f, "{c}"),
        (true, 1) => write!(f, "t"),
        (true, _) => write!(f, "t^{k}"),
        (false, 1) => write!(f, "{c}*t"),
        (false, _) => write!(f, "{c}*t^{k}"),
    }
}

/// Canonical text: decreasing exponents, e.g. `3/2*t^2 + 1 - t^-4`.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            write_monomial(f, &c.abs(), *k)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({self})")
    }
}

/// A reduced quotient of Laurent polynomials.
///
/// The denominator has lowest exponent 0 and constant coefficient 1, and
/// shares no non-unit factor with the numerator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ScalarFraction {
    num: Scalar,
    den: Scalar,
}

pub fn frac(a: &Scalar, b: &Scalar) -> Result<ScalarFraction, ScalarError> {
    ScalarFraction::new(a.clone(), b.clone())
}

impl ScalarFraction {
    pub fn new(num: Scalar, den: Scalar) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(ScalarFraction::zero());
        }
        if let Some(inv) = den.inv_unit() {
            return Ok(ScalarFraction { num: &num * &inv, den: Scalar::one() });
        }
        let (en, ed) = (num.min_exp().unwrap(), den.min_exp().unwrap());
        let (n, d) = (num.shift(-en), den.shift(-ed));
        let g = poly_gcd(&n, &d);
        let (n, d) = if g.len() > 1 || g.max_exp() != Some(0) {
            let (qn, _) = poly_divmod(&n, &g);
            let (qd, _) = poly_divmod(&d, &g);
            (qn, qd)
        } else {
            (n, d)
        };
        let c0 = d.coeff(0).recip();
        Ok(ScalarFraction { num: n.scale(&c0).shift(en - ed), den: d.scale(&c0) })
    }

    pub fn zero() -> Self {
        ScalarFraction { num: Scalar::zero(), den: Scalar::one() }
    }

    pub fn one() -> Self {
        ScalarFraction { num: Scalar::one(), den: Scalar::one() }
    }

    pub fn numerator(&self) -> &Scalar {
        &self.num
    }

    pub fn denominator(&self) -> &Scalar {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The Laurent polynomial this fraction equals, if its denominator is 1.
    pub fn as_scalar(&self) -> Option<&Scalar> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        ScalarFraction::new(self.den.clone(), self.num.clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return ScalarFraction { num, den: Scalar::one() };
            }
            return ScalarFraction::new(num, self.den.clone()).expect("nonzero denominator");
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        ScalarFraction::new(num, &self.den * &rhs.den).expect("nonzero denominator")
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        ScalarFraction { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.den.is_one() && rhs.den.is_one() {
            return ScalarFraction { num: &self.num * &rhs.num, den: Scalar::one() };
        }
        ScalarFraction::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }

    pub fn mul_scalar(&self, s: &Scalar) -> Self {
        if self.den.is_one() || s.is_unit() {
            return ScalarFraction { num: &self.num * s, den: self.den.clone() };
        }
        ScalarFraction::new(&self.num * s, self.den.clone()).expect("nonzero denominator")
    }
}

impl From<Scalar> for ScalarFraction {
    fn from(s: Scalar) -> Self {
        ScalarFraction { num: s, den: Scalar::one() }
    }
}

pub fn frac_add(a: &ScalarFraction, b: &ScalarFraction) -> ScalarFraction {
    a.add(b)
}

pub fn frac_mul(a: &ScalarFraction, b: &ScalarFraction) -> ScalarFraction {
    a.mul(b)
}

pub fn frac_inv(a: &ScalarFraction) -> Result<ScalarFraction, ScalarError> {
    a.inv()
}

impl fmt::Display for ScalarFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for ScalarFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScalarFraction({self})")
    }
}
