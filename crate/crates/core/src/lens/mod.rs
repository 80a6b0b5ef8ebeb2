//! Skein elements of the lens space `L(p,q)`, seen as a balanced tensor product of two
//! solid-torus modules, and their reduction onto the grid
//! `{(n) W^(m) (x) 1 : 0 <= n <= p/2, |m| <= p/2}`.

pub mod moves;
mod recursive;
mod solver;

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::action::act;
use crate::annulus::{to_tform, AnnulusElement, AnnulusWord};
use crate::scalar::{t_pow, Scalar, ScalarFraction};
use crate::torus::{self, t_curve, wedge, TorusElement};

pub use recursive::{base_scalar, reduce, reduce_xy, DEFAULT_BUDGET};
pub use solver::{grid_dependencies, reduce_solver, relation_set, GridDependency, Relation, RelationKind, Window};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LensError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("step limit exceeded: {0}")]
    StepLimitExceeded(String),
    #[error("window too small: word c^{n} w^{m} cannot be eliminated with core bound {core}")]
    WindowTooSmall { n: i64, m: i64, core: i64 },
}

/// The gluing matrix `(a p; b q)` with `aq - bp = -1` and `|a| <= p/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GluingMatrix {
    pub a: i64,
    pub b: i64,
    pub p: i64,
    pub q: i64,
}

impl GluingMatrix {
    pub fn h(&self) -> i64 {
        self.p / 2
    }

    /// Image `(am + pk, bm + qk)` of `(m, k)`.
    pub fn apply(&self, (m, k): (i64, i64)) -> (i64, i64) {
        (self.a * m + self.p * k, self.b * m + self.q * k)
    }

    pub fn is_grid(&self, n: i64, m: i64) -> bool {
        (0..=self.h()).contains(&n) && m.abs() <= self.h()
    }

    /// Number of grid labels, `(h+1)(2h+1)`.
    pub fn grid_size(&self) -> usize {
        let h = self.h() as usize;
        (h + 1) * (2 * h + 1)
    }
}

impl fmt::Display for GluingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.p, self.b, self.q)
    }
}

fn check_pq(p: i64, q: i64) -> Result<(), LensError> {
    if p < 1 {
        return Err(LensError::Domain(format!("p must be positive, got {p}")));
    }
    if p.gcd(&q) != 1 {
        return Err(LensError::Domain(format!("gcd({p},{q}) must be 1")));
    }
    Ok(())
}

/// Absolute-minimal representative of `x mod p`; ties go to the positive side.
fn abs_min_residue(x: i64, p: i64) -> i64 {
    let r = x.rem_euclid(p);
    if 2 * r > p {
        r - p
    } else {
        r
    }
}

pub fn gluing_for(p: i64, q: i64) -> Result<GluingMatrix, LensError> {
    check_pq(p, q)?;
    // aq = -1 (mod p), so a = -q^{-1} (mod p).
    let inv = q.extended_gcd(&p).x;
    let a = abs_min_residue(-inv, p);
    let b = (a * q + 1) / p;
    debug_assert_eq!(a * q - b * p, -1);
    Ok(GluingMatrix { a, b, p, q })
}

/// `(s0, w)` with `w = x + p s0`, `|w|` minimal and `s0` the lowest such integer.
pub fn abs_min_remainder(x: i64, p: i64) -> Result<(i64, i64), LensError> {
    if p < 1 {
        return Err(LensError::Domain(format!("p must be positive, got {p}")));
    }
    let r = x.rem_euclid(p);
    let w = if 2 * r >= p && r != 0 { r - p } else { r };
    Ok(((w - x) / p, w))
}

/// `(m, k)` with `n = ma + kp` and `m` the absolute-minimal residue of `n a^{-1} mod p`.
pub fn solve_ma_kp(n: i64, g: &GluingMatrix) -> (i64, i64) {
    if g.p == 1 {
        return (0, n);
    }
    let inv = g.a.extended_gcd(&g.p).x;
    let m = abs_min_residue(n * inv, g.p);
    let k = (n - m * g.a) / g.p;
    debug_assert_eq!(m * g.a + k * g.p, n);
    (m, k)
}

/// The antihomomorphism induced by the gluing: `T(x) W(y) -> W(My) T(Mx)`.
pub fn f_push(a: &TorusElement, g: &GluingMatrix) -> TorusElement {
    let mut out = TorusElement::zero();
    for (w, c) in a.terms() {
        let (r, s) = g.apply(w.wpart);
        let image = match w.tpart {
            None => wedge(r, s),
            Some(mn) => {
                let (m, n) = g.apply(mn);
                torus::mul(&wedge(r, s), &t_curve(m, n))
            }
        };
        out = &out + &image.scale(c);
    }
    out
}

/// Zero-meridian lift `(k)_T W^(l) -> (k,0)_T W^(l,0)`.
pub fn lift(u: &AnnulusElement) -> TorusElement {
    let mut out = TorusElement::zero();
    for ((k, l), c) in to_tform(u) {
        out = &out + &torus::mul(&t_curve(k, 0), &wedge(l, 0)).scale(&c);
    }
    out
}

/// A formal sum `sum coeff * (left (x) right)`; tensor relations are applied by
/// [`balance`], never stored.
#[derive(Debug, Clone, Default)]
pub struct LensElement {
    pub terms: Vec<(AnnulusElement, AnnulusElement, Scalar)>,
}

impl LensElement {
    pub fn new(left: AnnulusElement, right: AnnulusElement) -> Self {
        LensElement { terms: vec![(left, right, Scalar::one())] }
    }

    pub fn left(u: AnnulusElement) -> Self {
        LensElement::new(u, AnnulusElement::one())
    }

    /// Bilinear normal form: one tensor per right basis word, sorted, with
    /// coefficient 1 and a nonzero left factor.
    pub fn normalized(&self) -> LensElement {
        let mut by_right: BTreeMap<AnnulusWord, AnnulusElement> = BTreeMap::new();
        for (l, r, c) in &self.terms {
            for (w, cr) in r.terms() {
                by_right.entry(*w).or_default().add_scaled(l, &(c * cr));
            }
        }
        LensElement {
            terms: by_right
                .into_iter()
                .filter(|(_, l)| !l.is_zero())
                .map(|(w, l)| (l, AnnulusElement::from_word(w, Scalar::one()), Scalar::one()))
                .collect(),
        }
    }
}

impl PartialEq for LensElement {
    fn eq(&self, other: &Self) -> bool {
        self.normalized().terms == other.normalized().terms
    }
}

/// Moves every right factor to the left: `v (x) w = f(lift(w)) . v (x) 1`.
pub fn balance(e: &LensElement, g: &GluingMatrix) -> LensElement {
    LensElement::left(balanced_left(e, g))
}

pub(crate) fn balanced_left(e: &LensElement, g: &GluingMatrix) -> AnnulusElement {
    let mut out = AnnulusElement::zero();
    for (l, r, c) in &e.terms {
        if r == &AnnulusElement::one() {
            out.add_scaled(l, c);
            continue;
        }
        out.add_scaled(&act(&f_push(&lift(r), g), l), c);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

/// `(k)_T W^(l+p) (x) 1 = t^{2q(p+k+2l)} (k)_T W^(l) (x) 1`, one period down or up.
pub fn wedge_period((k, l): (i64, i64), g: &GluingMatrix, dir: Direction) -> ((i64, i64), Scalar) {
    let (p, q) = (g.p, g.q);
    match dir {
        Direction::Down => ((k, l - p), t_pow(2 * q * (p + k + 2 * (l - p)))),
        Direction::Up => ((k, l + p), t_pow(-2 * q * (p + k + 2 * l))),
    }
}

/// Exponent picked up when `c^n W^(j)` is moved to `c^n W^(j - s p)`.
fn period_exponent(n: i64, j: i64, s: i64, g: &GluingMatrix) -> Result<i64, LensError> {
    let e = 2 * g.q as i128 * s as i128 * (n as i128 + 2 * j as i128 - g.p as i128 * s as i128);
    i64::try_from(e).map_err(|_| LensError::Domain(format!("wedge exponent overflow at c^{n} w^{j}")))
}

/// Moves `c^n W^(j)` by `s` periods, `W^(j) -> W^(j - s p)`.
pub fn wedge_shift_word(n: i64, j: i64, s: i64, g: &GluingMatrix) -> Result<(i64, Scalar), LensError> {
    Ok((j - s * g.p, t_pow(period_exponent(n, j, s, g)?)))
}

/// Brings `c^n W^(j)` into the wedge window `[-h, -h + p - 1]`.
pub fn wedge_normalize(n: i64, j: i64, g: &GluingMatrix) -> Result<(i64, Scalar), LensError> {
    let s = (j + g.h()).div_euclid(g.p);
    wedge_shift_word(n, j, s, g)
}

/// Applies [`wedge_shift_word`] to every word of `u`.
pub fn wedge_shift(u: &AnnulusElement, s: i64, g: &GluingMatrix) -> Result<AnnulusElement, LensError> {
    let mut out = AnnulusElement::zero();
    for (w, c) in u.terms() {
        let (j, f) = wedge_shift_word(w.n(), w.r(), s, g)?;
        out.add_term(AnnulusWord::new(w.n(), j), c * &f);
    }
    Ok(out)
}

/// The strip `T(M(sigma, d)) . u (x) 1 = t^{sigma d} T(sigma a, sigma b) . u (x) 1`,
/// returning the scalar and the stripped curve.
pub fn strip(sigma: i64, d: i64, g: &GluingMatrix) -> (Scalar, TorusElement) {
    let (a, b) = g.apply((sigma, 0));
    (t_pow(sigma * d), t_curve(a, b))
}

/// Inverse of [`strip`]: `T(sigma a, sigma b) -> t^{-sigma d} T(M(sigma, d))`.
pub fn unstrip(sigma: i64, d: i64, g: &GluingMatrix) -> (Scalar, TorusElement) {
    let (m, n) = g.apply((sigma, d));
    (t_pow(-sigma * d), t_curve(m, n))
}

/// The `(p,q)_T` relation on `(k)_T W^(l)`:
/// `T(p,q) . (k)_T W^(l) - (t + t^-1) (k)_T W^(l)`, which vanishes after `(x) 1`.
pub fn pq_relation(k: i64, l: i64, g: &GluingMatrix) -> AnnulusElement {
    let u = crate::annulus::from_tform(&BTreeMap::from([((k, l), Scalar::one())]));
    let pq = f_push(&t_curve(0, 1), g);
    let loop_value = crate::action::project(&t_curve(0, 1));
    &act(&pq, &u) - &(&loop_value * &u)
}

/// Grid coordinates of a reduced lens element.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpanningCoordinates {
    pub grid: BTreeMap<(i64, i64), ScalarFraction>,
}

impl SpanningCoordinates {
    pub fn add(&mut self, nm: (i64, i64), c: &ScalarFraction) {
        if c.is_zero() {
            return;
        }
        let slot = self.grid.entry(nm).or_insert_with(ScalarFraction::zero);
        *slot = slot.add(c);
        if slot.is_zero() {
            self.grid.remove(&nm);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = &(i64, i64)> {
        self.grid.keys()
    }

    /// The coordinates as an element `sum c (n) W^(m)`, if all are Laurent polynomials.
    pub fn to_element(&self) -> Option<AnnulusElement> {
        let mut out = AnnulusElement::zero();
        for (&(n, m), c) in &self.grid {
            out.add_term(AnnulusWord::new(n, m), c.as_scalar()?.clone());
        }
        Some(out)
    }
}

impl From<&AnnulusElement> for SpanningCoordinates {
    fn from(u: &AnnulusElement) -> Self {
        let mut out = SpanningCoordinates::default();
        for (w, c) in u.terms() {
            out.add((w.n(), w.r()), &ScalarFraction::from(c.clone()));
        }
        out
    }
}

/// Which route produced a reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Path {
    Recursive,
    Solver,
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Path::Recursive => "recursive",
            Path::Solver => "solver",
        })
    }
}

/// Recursive reduction, falling back to the window solver on budget exhaustion.
///
/// The solver window starts at `max(window, input extent)` and doubles up to three times.
pub fn reduce_auto(
    e: &LensElement,
    g: &GluingMatrix,
    budget: u64,
    window: i64,
) -> Result<(SpanningCoordinates, Path), LensError> {
    match reduce(e, g, budget) {
        Ok(c) => Ok((c, Path::Recursive)),
        Err(LensError::StepLimitExceeded(why)) => {
            log::info!("recursive reduction in L({},{}) gave up ({why}); using the window solver", g.p, g.q);
            let left = balanced_left(e, g);
            let extent = left.terms().map(|(w, _)| w.n().max(w.r().abs())).max().unwrap_or(0);
            let mut size = window.max(extent).max(1);
            let mut last = None;
            for _ in 0..4 {
                match reduce_solver(&LensElement::left(left.clone()), g, Window::square(size)) {
                    Ok(c) => return Ok((c, Path::Solver)),
                    Err(err @ LensError::WindowTooSmall { .. }) => {
                        log::info!("{err}; doubling window to {}", 2 * size);
                        last = Some(err);
                        size *= 2;
                    }
                    Err(err) => return Err(err),
                }
            }
            Err(last.expect("at least one attempt"))
        }
        Err(err) => Err(err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gluing_matrices() {
        assert_eq!(gluing_for(1, 0).unwrap(), GluingMatrix { a: 0, b: 1, p: 1, q: 0 });
        assert_eq!(gluing_for(2, 1).unwrap(), GluingMatrix { a: 1, b: 1, p: 2, q: 1 });
        assert!(matches!(gluing_for(4, 6), Err(LensError::Domain(_))));
        assert!(matches!(gluing_for(0, 1), Err(LensError::Domain(_))));
        for p in 1..30 {
            for q in -30..30 {
                if let Ok(g) = gluing_for(p, q) {
                    assert_eq!(g.a * g.q - g.b * g.p, -1);
                    assert!(g.a.abs() <= p / 2);
                }
            }
        }
    }

    #[test]
    fn remainders() {
        assert_eq!(abs_min_remainder(7, 4).unwrap(), (-2, -1));
        assert_eq!(abs_min_remainder(1, 2).unwrap(), (-1, -1));
        assert_eq!(abs_min_remainder(0, 5).unwrap(), (0, 0));
        assert!(abs_min_remainder(3, 0).is_err());
    }

    #[test]
    fn bezout_pairs() {
        let g = gluing_for(2, 1).unwrap();
        assert_eq!(solve_ma_kp(5, &g), (1, 2));
        assert_eq!(solve_ma_kp(0, &g), (0, 0));
        assert_eq!(solve_ma_kp(3, &gluing_for(1, 0).unwrap()), (0, 3));
    }

    #[test]
    fn pushforward() {
        let g = gluing_for(2, 1).unwrap();
        assert_eq!(f_push(&t_curve(1, 0), &g), t_curve(1, 1));
        assert_eq!(f_push(&wedge(0, 1), &g), wedge(2, 1));
        let tw = torus::mul(&t_curve(1, 0), &wedge(0, 1));
        let expected = TorusElement::from_word(crate::torus::TorusWord::new(Some((1, 1)), (2, 1)), t_pow(2));
        assert_eq!(f_push(&tw, &g), expected);
    }

    #[test]
    fn balancing() {
        let g = gluing_for(2, 1).unwrap();
        let e = LensElement::new(AnnulusElement::one(), crate::annulus::wedge1(1));
        let expected = AnnulusElement::from_word(AnnulusWord::new(0, 1), t_pow(-2));
        assert_eq!(balance(&e, &g), LensElement::left(expected));
        let v = crate::annulus::core(3);
        assert_eq!(balance(&LensElement::left(v.clone()), &g), LensElement::left(v));
        let e = LensElement::new(AnnulusElement::one(), crate::annulus::x(1, 2));
        assert_eq!(balance(&e, &g), LensElement::left(crate::annulus::x(1, 1).scale(&t_pow(2))));
        for (p, q) in [(3, 1), (3, 2), (5, 2)] {
            let g = gluing_for(p, q).unwrap();
            let (m, n) = g.apply((1, 2));
            let direct = LensElement::left(crate::annulus::x(m, n));
            let (a, _) = reduce_auto(&e, &g, DEFAULT_BUDGET, 4 * p).unwrap();
            let (b, _) = reduce_auto(&direct, &g, DEFAULT_BUDGET, 4 * p).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn wedge_periods() {
        let g = gluing_for(2, 1).unwrap();
        assert_eq!(wedge_period((0, 2), &g, Direction::Down), ((0, 0), t_pow(4)));
        let (kl, c1) = wedge_period((1, 3), &g, Direction::Down);
        let (back, c2) = wedge_period(kl, &g, Direction::Up);
        assert_eq!(back, (1, 3));
        assert_eq!(&c1 * &c2, Scalar::one());
        let g1 = gluing_for(1, 0).unwrap();
        assert_eq!(wedge_period((2, 5), &g1, Direction::Down).1, Scalar::one());
    }
}
