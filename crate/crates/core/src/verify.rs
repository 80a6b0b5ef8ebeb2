//! Randomized property suites behind the `verify` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::action::{act, project};
use crate::annulus::{self, evaluate_unknots, AnnulusElement};
use crate::lang::{parse_annulus, parse_torus, print_annulus, print_torus};
use crate::lens::moves::{strip_move, unstrip_move, Acted, Move};
use crate::lens::{
    abs_min_remainder, base_scalar, gluing_for, reduce, reduce_auto, reduce_solver, GluingMatrix, LensElement,
    SpanningCoordinates, Window, DEFAULT_BUDGET,
};
use crate::scalar::{t_pow, Scalar};
use crate::torus::{self, t_curve, wedge, TorusElement};

pub const SUITES: &[&str] = &[
    "associativity",
    "fg-adjoint",
    "action-oracle",
    "seeds",
    "s3",
    "spanning",
    "moves",
    "solver-agreement",
    "remainder",
    "winding",
    "language",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<String>,
}

impl SuiteReport {
    fn new(suite: &str, cases: usize, failure: Option<String>) -> Self {
        SuiteReport { suite: suite.into(), passed: failure.is_none(), cases, counterexample: failure }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn monomial(rng: &mut impl Rng) -> Scalar {
    let c = rng.random_range(1..=3) * if rng.random_bool(0.5) { 1 } else { -1 };
    Scalar::from_int(c).shift(rng.random_range(-3..=3))
}

pub fn random_torus_word(rng: &mut impl Rng, bound: i64) -> TorusElement {
    let mut r = || rng.random_range(-bound..=bound);
    let (m, n, a, b) = (r(), r(), r(), r());
    torus::mul(&t_curve(m, n), &wedge(a, b))
}

pub fn random_torus(rng: &mut impl Rng, bound: i64, terms: usize) -> TorusElement {
    let mut out = TorusElement::zero();
    for _ in 0..terms {
        let c = monomial(rng);
        out = &out + &random_torus_word(rng, bound).scale(&c);
    }
    out
}

pub fn random_annulus(rng: &mut impl Rng, bound: i64, terms: usize) -> AnnulusElement {
    let mut out = AnnulusElement::zero();
    for _ in 0..terms {
        let w = AnnulusElement::word(rng.random_range(0..=bound), rng.random_range(-bound..=bound));
        out.add_scaled(&w, &monomial(rng));
    }
    out
}

/// `mul(mul(A,B),C) = mul(A,mul(B,C))` on random word triples.
pub fn associativity(seed: u64, cases: usize) -> SuiteReport {
    let mut r = rng(seed);
    for _ in 0..cases {
        let (a, b, c) = (random_torus_word(&mut r, 8), random_torus_word(&mut r, 8), random_torus_word(&mut r, 8));
        if torus::mul(&torus::mul(&a, &b), &c) != torus::mul(&a, &torus::mul(&b, &c)) {
            let msg = format!("A = {}, B = {}, C = {}", print_torus(&a), print_torus(&b), print_torus(&c));
            return SuiteReport::new("associativity", cases, Some(msg));
        }
    }
    SuiteReport::new("associativity", cases, None)
}

/// `T(m,n) T(r,s) = T(m+r,n+s) + W(m,n) T(r-m,s-n)` and `T(m,n) W(-m,-n) = T(-m,-n)`.
pub fn fg_adjoint(seed: u64, cases: usize) -> SuiteReport {
    let mut r = rng(seed);
    for _ in 0..cases {
        let mut x = || r.random_range(-8..=8);
        let (m, n, a, b) = (x(), x(), x(), x());
        let lhs = torus::mul(&t_curve(m, n), &t_curve(a, b));
        let rhs = &t_curve(m + a, n + b) + &torus::mul(&wedge(m, n), &t_curve(a - m, b - n));
        if lhs != rhs {
            return SuiteReport::new("fg-adjoint", cases, Some(format!("T({m},{n})*T({a},{b})")));
        }
        if torus::mul(&t_curve(m, n), &wedge(-m, -n)) != t_curve(-m, -n) {
            return SuiteReport::new("fg-adjoint", cases, Some(format!("T({m},{n})*W({},{})", -m, -n)));
        }
    }
    SuiteReport::new("fg-adjoint", cases, None)
}

/// `A . pi(B) = pi(A B)` and `(A B) . u = A . (B . u)` for a given action.
pub fn action_oracle_with<F>(seed: u64, cases: usize, act_fn: F) -> SuiteReport
where
    F: Fn(&TorusElement, &AnnulusElement) -> AnnulusElement,
{
    let mut r = rng(seed);
    for _ in 0..cases {
        let (a, b) = (random_torus_word(&mut r, 6), random_torus_word(&mut r, 6));
        let u = random_annulus(&mut r, 6, 2);
        if act_fn(&a, &project(&b)) != project(&torus::mul(&a, &b)) {
            let msg = format!("A = {}, B = {}: A . pi(B) != pi(A*B)", print_torus(&a), print_torus(&b));
            return SuiteReport::new("action-oracle", cases, Some(msg));
        }
        if act_fn(&torus::mul(&a, &b), &u) != act_fn(&a, &act_fn(&b, &u)) {
            let msg = format!(
                "A = {}, B = {}, u = {}: (A*B) . u != A . (B . u)",
                print_torus(&a),
                print_torus(&b),
                print_annulus(&u)
            );
            return SuiteReport::new("action-oracle", cases, Some(msg));
        }
    }
    SuiteReport::new("action-oracle", cases, None)
}

pub fn action_oracle(seed: u64, cases: usize) -> SuiteReport {
    action_oracle_with(seed, cases, act)
}

/// Closed forms of `x_{0,n}`, `x_{+-1,k}` and the leading unit of `x_{m,n}`.
pub fn seeds() -> SuiteReport {
    let mut cases = 0;
    for n in -12..=12 {
        cases += 1;
        if annulus::x(0, n) != AnnulusElement::from_scalar(t_pow(n) + t_pow(-n)) {
            return SuiteReport::new("seeds", cases, Some(format!("x(0,{n})")));
        }
        if annulus::x(1, n) != annulus::core(1).scale(&t_pow(n))
            || annulus::x(-1, n) != annulus::core(-1).scale(&t_pow(-n))
        {
            return SuiteReport::new("seeds", cases, Some(format!("x(+-1,{n})")));
        }
    }
    for m in (-10..=10i64).filter(|m| *m != 0) {
        for n in -12..=12 {
            cases += 1;
            let top = annulus::AnnulusWord::new(m.abs(), if m < 0 { m } else { 0 });
            let expected = t_pow(m.signum() * n);
            if annulus::x(m, n).coeff(&top) != expected {
                return SuiteReport::new("seeds", cases, Some(format!("leading coefficient of x({m},{n})")));
            }
        }
    }
    SuiteReport::new("seeds", cases, None)
}

fn reduce_default(e: &LensElement, g: &GluingMatrix) -> Result<SpanningCoordinates, String> {
    reduce_auto(e, g, DEFAULT_BUDGET, 4 * g.p).map(|(c, _)| c).map_err(|e| e.to_string())
}

/// In `S^3`, reduction agrees with evaluating unknots.
pub fn s3(seed: u64, cases: usize) -> SuiteReport {
    let g = gluing_for(1, 0).expect("valid");
    let mut r = rng(seed);
    for _ in 0..cases {
        let u = random_annulus(&mut r, 6, 3);
        let got = reduce_default(&LensElement::left(u.clone()), &g);
        let expected = SpanningCoordinates::from(&AnnulusElement::from_scalar(evaluate_unknots(&u)));
        if got.as_ref() != Ok(&expected) {
            return SuiteReport::new("s3", cases, Some(format!("u = {}: {got:?}", print_annulus(&u))));
        }
    }
    SuiteReport::new("s3", cases, None)
}

fn lens_spaces(max_p: i64) -> impl Iterator<Item = GluingMatrix> {
    (2..=max_p).flat_map(|p| (1..p).filter_map(move |q| gluing_for(p, q).ok()))
}

/// Reductions land on the grid for `p <= max_p`.
pub fn spanning(seed: u64, per_space: usize, max_p: i64) -> SuiteReport {
    let mut r = rng(seed);
    let mut cases = 0;
    for g in lens_spaces(max_p) {
        for _ in 0..per_space {
            cases += 1;
            let (n, m) = (r.random_range(0..=3 * g.p), r.random_range(-3 * g.p..=3 * g.p));
            let e = LensElement::left(AnnulusElement::word(n, m));
            match reduce_default(&e, &g) {
                Ok(c) if c.support().all(|&(a, b)| g.is_grid(a, b)) => {}
                other => {
                    return SuiteReport::new(
                        "spanning",
                        cases,
                        Some(format!("c({n})*w({m}) in L({},{}): {other:?}", g.p, g.q)),
                    )
                }
            }
        }
    }
    SuiteReport::new("spanning", cases, None)
}

/// Each move followed by its inverse is the identity, and the base scalar matches its closed form.
pub fn moves(seed: u64, cases: usize) -> SuiteReport {
    let mut r = rng(seed);
    for i in 0..cases {
        let p = r.random_range(1..=9);
        let q = r.random_range(-9..=9);
        let Ok(g) = gluing_for(p, q) else { continue };
        let u = random_annulus(&mut r, 6, 3);
        let mv = match i % 3 {
            0 => Move::WedgeShift(r.random_range(-3..=3)),
            1 => Move::Pq { k: r.random_range(0..=4), l: r.random_range(-4..=4), coeff: monomial(&mut r) },
            _ => {
                let (sigma, d) = (if r.random_bool(0.5) { 1 } else { -1 }, r.random_range(-4..=4));
                let x = Acted { coeff: monomial(&mut r), curve: g.apply((sigma, d)), arg: u.clone() };
                let back = strip_move(&x, sigma, d, &g).and_then(|s| unstrip_move(&s, sigma, d, &g));
                if back.as_ref() != Some(&x) {
                    return SuiteReport::new(
                        "moves",
                        cases,
                        Some(format!("strip({sigma},{d}) on {}", print_annulus(&u))),
                    );
                }
                continue;
            }
        };
        let back = mv.apply(&u, &g).and_then(|v| mv.inverse().apply(&v, &g));
        if back.as_ref() != Ok(&u) {
            return SuiteReport::new("moves", cases, Some(format!("{mv:?} on {} in L({p},{q})", print_annulus(&u))));
        }
        let (k, a, b) = (r.random_range(-5..=5), r.random_range(-5..=5), r.random_range(-5..=5));
        let closed = &t_pow(2 * (g.a * a + p * b) * (k * q)) * &(t_pow(k) + t_pow(-k));
        if base_scalar(k, a, b, &g) != closed {
            return SuiteReport::new("moves", cases, Some(format!("base scalar at k={k}, r={a}, s={b} in L({p},{q})")));
        }
    }
    SuiteReport::new("moves", cases, None)
}

/// Inputs on which both reduction routes must agree: grid words, their wedge-period
/// neighbours, and their `(p,q)_T` neighbours.
pub fn agreement_inputs(g: &GluingMatrix) -> Vec<AnnulusElement> {
    let h = g.h();
    let mut out = Vec::new();
    for n in 0..=h {
        for m in -h..=h {
            let u = AnnulusElement::word(n, m);
            out.push(u.clone());
            out.push(AnnulusElement::word(n, m + g.p));
            out.push(AnnulusElement::word(n, m - g.p));
        }
        for l in -h..-h + g.p {
            let u = annulus::from_tform(&[((n, l), Scalar::one())].into_iter().collect());
            out.push(act(&crate::lens::f_push(&t_curve(0, 1), g), &u));
        }
    }
    out
}

pub fn solver_agreement(seed: u64, cases: usize, max_p: i64) -> SuiteReport {
    let mut r = rng(seed);
    let mut count = 0;
    let g1 = gluing_for(1, 0).expect("valid");
    let mut inputs: Vec<(GluingMatrix, AnnulusElement)> =
        (0..cases).map(|_| (g1, random_annulus(&mut r, 6, 3))).collect();
    for g in std::iter::once(g1).chain(lens_spaces(max_p)) {
        inputs.extend(agreement_inputs(&g).into_iter().map(|u| (g, u)));
    }
    for (g, u) in inputs {
        count += 1;
        let e = LensElement::left(u.clone());
        let a = reduce(&e, &g, DEFAULT_BUDGET).map_err(|e| e.to_string());
        let extent = u.terms().map(|(w, _)| w.n().max(w.r().abs())).max().unwrap_or(0);
        let b = reduce_solver(&e, &g, Window::square((4 * g.p).max(extent))).map_err(|e| e.to_string());
        if a != b {
            let msg = format!("{} in L({},{}): {a:?} vs {b:?}", print_annulus(&u), g.p, g.q);
            return SuiteReport::new("solver-agreement", count, Some(msg));
        }
    }
    SuiteReport::new("solver-agreement", count, None)
}

/// `abs_min_remainder` against a brute-force scan.
pub fn remainder() -> SuiteReport {
    let mut cases = 0;
    for p in 1..=50i64 {
        for x in -200..=200i64 {
            cases += 1;
            let (s0, w) = abs_min_remainder(x, p).expect("p >= 1");
            let best = (-300..=300).map(|s| (x + p * s).abs()).min().expect("nonempty");
            let lowest = (-300..=300).find(|s| (x + p * s).abs() == best).expect("attained");
            if w != x + p * s0 || w.abs() > p / 2 || s0 != lowest {
                return SuiteReport::new("remainder", cases, Some(format!("x={x}, p={p}: got ({s0},{w})")));
            }
        }
    }
    SuiteReport::new("remainder", cases, None)
}

/// Grid points carry winding `n + 2m = w_left + a w_right (mod p)`.
pub fn winding(seed: u64, per_space: usize, max_p: i64) -> SuiteReport {
    let mut r = rng(seed);
    let mut cases = 0;
    for g in lens_spaces(max_p) {
        for _ in 0..per_space {
            cases += 1;
            let (l, rt) = (
                AnnulusElement::word(r.random_range(0..=2 * g.p), r.random_range(-2 * g.p..=2 * g.p)),
                AnnulusElement::word(r.random_range(0..=2), r.random_range(-2..=2)),
            );
            let wl = l.terms().map(|(w, _)| annulus::winding(w)).next().unwrap_or(0);
            let wr = rt.terms().map(|(w, _)| annulus::winding(w)).next().unwrap_or(0);
            let e = LensElement::new(l.clone(), rt.clone());
            let Ok(c) = reduce_default(&e, &g) else {
                return SuiteReport::new("winding", cases, Some("reduction failed".into()));
            };
            let bad = c.support().copied().find(|&(n, m)| (n + 2 * m - wl - g.a * wr).rem_euclid(g.p) != 0);
            if let Some((n, m)) = bad {
                let msg =
                    format!("{} (x) {} in L({},{}) reaches ({n},{m})", print_annulus(&l), print_annulus(&rt), g.p, g.q);
                return SuiteReport::new("winding", cases, Some(msg));
            }
        }
    }
    SuiteReport::new("winding", cases, None)
}

/// Print then parse is the identity.
pub fn language(seed: u64, cases: usize) -> SuiteReport {
    let mut r = rng(seed);
    for _ in 0..cases {
        let a = random_torus(&mut r, 6, 3);
        let text = print_torus(&a);
        if parse_torus(&text).as_ref() != Ok(&a) {
            return SuiteReport::new("language", cases, Some(text));
        }
        let u = random_annulus(&mut r, 6, 3);
        let text = print_annulus(&u);
        if parse_annulus(&text).as_ref() != Ok(&u) {
            return SuiteReport::new("language", cases, Some(text));
        }
    }
    SuiteReport::new("language", cases, None)
}

/// Runs one named suite at its default size; `None` for an unknown name.
pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    Some(match name {
        "associativity" => associativity(seed, 200),
        "fg-adjoint" => fg_adjoint(seed, 200),
        "action-oracle" => action_oracle(seed, 200),
        "seeds" => seeds(),
        "s3" => s3(seed, 100),
        "spanning" => spanning(seed, 10, 7),
        "moves" => moves(seed, 500),
        "solver-agreement" => solver_agreement(seed, 100, 7),
        "remainder" => remainder(),
        "winding" => winding(seed, 5, 7),
        "language" => language(seed, 200),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for report in [associativity(1, 20), fg_adjoint(1, 20), action_oracle(1, 10), seeds(), language(1, 20)] {
            assert!(report.passed, "{report:?}");
        }
    }

    #[test]
    fn sign_flip_is_caught() {
        let broken = |a: &TorusElement, u: &AnnulusElement| {
            let v = act(a, u);
            let mut out = AnnulusElement::zero();
            for (i, (w, c)) in v.terms().enumerate() {
                out.add_term(*w, if i == 0 { -c } else { c.clone() });
            }
            out
        };
        let report = action_oracle_with(7, 50, broken);
        assert!(!report.passed);
        assert!(report.counterexample.is_some());
    }

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", 0).is_none());
    }
}
