//! End-to-end acceptance checks, one line per criterion.
//!
//! Run with `cargo test -p gl2skein --test acceptance`; exits nonzero if any criterion fails.
//! `RUST_LOG=info` shows every solver fallback as it happens.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gl2skein::action::{act, project};
use gl2skein::annulus::{self, AnnulusElement, AnnulusWord};
use gl2skein::cli::{execute, Cli};
use gl2skein::lang::{
    parse_annulus, parse_any, parse_fraction, parse_lens, parse_scalar, parse_torus, print_annulus, print_lens,
    print_torus,
};
use gl2skein::lens::moves::{strip_move, unstrip_move, Acted, Move};
use gl2skein::lens::{
    abs_min_remainder, base_scalar, f_push, gluing_for, reduce, reduce_auto, reduce_solver, reduce_xy, GluingMatrix,
    LensElement, Path, SpanningCoordinates, Window, DEFAULT_BUDGET,
};
use gl2skein::scalar::{t_pow, Scalar};
use gl2skein::torus::{self, t_curve, wedge, TorusElement};

const SEED: u64 = 0x5eed_2024;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ (stream << 32))
}

fn sign(r: &mut impl Rng) -> i64 {
    if r.random_bool(0.5) {
        1
    } else {
        -1
    }
}

fn monomial(r: &mut impl Rng) -> Scalar {
    Scalar::from_int(sign(r) * r.random_range(1..=4)).shift(r.random_range(-4..=4))
}

fn rational_scalar(r: &mut impl Rng) -> Scalar {
    let terms = (0..r.random_range(0..=4)).map(|_| {
        let num = BigInt::from(sign(r) * r.random_range(1..=9));
        let den = BigInt::from(r.random_range(1..=5));
        (r.random_range(-6..=6), BigRational::new(num, den))
    });
    Scalar::from_terms(terms)
}

fn torus_word(r: &mut impl Rng, bound: i64) -> TorusElement {
    let mut x = || r.random_range(-bound..=bound);
    let (m, n, a, b) = (x(), x(), x(), x());
    torus::mul(&t_curve(m, n), &wedge(a, b))
}

fn torus_element(r: &mut impl Rng, bound: i64) -> TorusElement {
    let mut out = TorusElement::zero();
    for _ in 0..r.random_range(0..=3) {
        let c = rational_scalar(r);
        out = &out + &torus_word(r, bound).scale(&c);
    }
    out
}

fn annulus_element(r: &mut impl Rng, bound: i64, terms: usize) -> AnnulusElement {
    let mut out = AnnulusElement::zero();
    for _ in 0..terms {
        let w = AnnulusWord::new(r.random_range(0..=bound), r.random_range(-bound..=bound));
        out.add_term(w, monomial(r));
    }
    out
}

fn lens_spaces() -> Vec<GluingMatrix> {
    (2..=7).flat_map(|p| (1..p).filter_map(move |q| gluing_for(p, q).ok())).collect()
}

/// `(n1) W^(n2)` for any sign of `n1`.
fn label(n1: i64, n2: i64) -> AnnulusElement {
    annulus::mul(&annulus::core(n1), &annulus::wedge1(n2))
}

fn scalar_coords(c: Scalar) -> SpanningCoordinates {
    SpanningCoordinates::from(&AnnulusElement::from_scalar(c))
}

fn scale_coords(c: &SpanningCoordinates, s: &Scalar) -> SpanningCoordinates {
    let mut out = SpanningCoordinates::default();
    for (&nm, v) in &c.grid {
        out.add(nm, &v.mul_scalar(s));
    }
    out
}

fn criterion_1() -> Outcome {
    let mut r = rng(1);
    for i in 0..200 {
        let (a, b, c) = (torus_word(&mut r, 8), torus_word(&mut r, 8), torus_word(&mut r, 8));
        if torus::mul(&torus::mul(&a, &b), &c) != torus::mul(&a, &torus::mul(&b, &c)) {
            return Err(format!("case {i}: ({})({})({})", print_torus(&a), print_torus(&b), print_torus(&c)));
        }
    }
    Ok("200 triples".into())
}

fn criterion_2() -> Outcome {
    let mut r = rng(2);
    for _ in 0..200 {
        let mut x = || r.random_range(-8..=8);
        let (m, n, a, b) = (x(), x(), x(), x());
        let lhs = torus::mul(&t_curve(m, n), &t_curve(a, b));
        let rhs = &t_curve(m + a, n + b) + &torus::mul(&wedge(m, n), &t_curve(a - m, b - n));
        if lhs != rhs {
            return Err(format!("product of T({m},{n}) and T({a},{b})"));
        }
        if torus::mul(&t_curve(m, n), &wedge(-m, -n)) != t_curve(-m, -n) {
            return Err(format!("T({m},{n}) W({},{}) != T({},{})", -m, -n, -m, -n));
        }
    }
    if t_curve(0, 0) != TorusElement::one().scale(&Scalar::from_int(2)) {
        return Err("T(0,0) != 2".into());
    }
    Ok("200 tuples".into())
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    for i in 0..200 {
        let (a, b) = (torus_word(&mut r, 6), torus_word(&mut r, 6));
        let u = annulus_element(&mut r, 6, 2);
        if act(&a, &project(&b)) != project(&torus::mul(&a, &b)) {
            return Err(format!("case {i}: A = {}, B = {}: A . pi(B) != pi(AB)", print_torus(&a), print_torus(&b)));
        }
        if act(&torus::mul(&a, &b), &u) != act(&a, &act(&b, &u)) {
            return Err(format!("case {i}: (AB) . u != A . (B . u) for u = {}", print_annulus(&u)));
        }
    }
    Ok("200 triples".into())
}

fn criterion_4() -> Outcome {
    let mut checked = 0;
    for n in -12..=12i64 {
        let expected = AnnulusElement::from_scalar(t_pow(n) + t_pow(-n));
        if annulus::x(0, n) != expected {
            return Err(format!("x(0,{n}) = {}", print_annulus(&annulus::x(0, n))));
        }
        for s in [1i64, -1] {
            let expected = annulus::core(s).scale(&t_pow(s * n));
            if annulus::x(s, n) != expected {
                return Err(format!("x({s},{n}) = {}", print_annulus(&annulus::x(s, n))));
            }
        }
        checked += 3;
    }
    for m in (-10..=10i64).filter(|&m| m != 0) {
        for n in -12..=12i64 {
            let x = annulus::x(m, n);
            if x != project(&t_curve(m, n)) {
                return Err(format!("x({m},{n}) differs from the projection of T({m},{n})"));
            }
            // The top core multiplicity |m| appears once, as (|m|) or (|m|) W^(m) for m < 0.
            let top: Vec<_> = x.terms().filter(|(w, _)| w.n() == m.abs()).collect();
            let unit = t_pow(m.signum() * n);
            let expected_word = AnnulusWord::new(m.abs(), m.min(0));
            if top.len() != 1 || *top[0].0 != expected_word || top[0].1 != &unit || !unit.is_unit() {
                return Err(format!("leading term of x({m},{n}): {top:?}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} closed forms and leading units"))
}

/// Independent `S^3` evaluation.
fn unknots(u: &AnnulusElement) -> Scalar {
    let mut total = Scalar::zero();
    for (w, c) in u.terms() {
        let mut loops = Scalar::one();
        for _ in 0..w.n() {
            loops = &loops * &(t_pow(1) + t_pow(-1));
        }
        total += &(c * &loops);
    }
    total
}

fn criterion_5() -> Outcome {
    let g = gluing_for(1, 0).map_err(|e| e.to_string())?;
    let mut cases: Vec<AnnulusElement> = (0..=6).map(|n| AnnulusElement::word(n, 0)).collect();
    cases.extend((-6..=6).map(annulus::wedge1));
    let mut r = rng(5);
    cases.extend((0..100).map(|_| {
        let k = r.random_range(1..=3);
        annulus_element(&mut r, 6, k)
    }));
    for (i, u) in cases.iter().enumerate() {
        let got = reduce(&LensElement::left(u.clone()), &g, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        if got != scalar_coords(unknots(u)) {
            return Err(format!("case {i}: {} reduces to {got:?}", print_annulus(u)));
        }
    }
    if unknots(&AnnulusElement::word(2, 0)) != t_pow(2) + Scalar::from_int(2) + t_pow(-2) {
        return Err("unknot oracle".into());
    }
    Ok(format!("{} inputs, 100 random", cases.len()))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut report = Vec::new();
    let mut total = 0;
    for g in lens_spaces() {
        let h = g.p / 2;
        let grid = ((h + 1) * (2 * h + 1)) as usize;
        if g.grid_size() != grid {
            return Err(format!("grid size of L({},{})", g.p, g.q));
        }
        let mut fallbacks = 0;
        for _ in 0..50 {
            let (n1, n2) = (r.random_range(-3 * g.p..=3 * g.p), r.random_range(-3 * g.p..=3 * g.p));
            let e = LensElement::left(label(n1, n2));
            let (c, path) = reduce_auto(&e, &g, DEFAULT_BUDGET, 4 * g.p)
                .map_err(|err| format!("({n1}) W^({n2}) in L({},{}): {err}", g.p, g.q))?;
            let outside: Vec<_> = c.support().filter(|&&(n, m)| !(0..=h).contains(&n) || m.abs() > h).collect();
            if !outside.is_empty() || c.grid.len() > grid {
                return Err(format!("({n1}) W^({n2}) in L({},{}) reaches {outside:?}", g.p, g.q));
            }
            if path == Path::Solver {
                fallbacks += 1;
            }
            total += 1;
        }
        report.push(format!("L({},{}) {fallbacks}", g.p, g.q));
    }
    Ok(format!("{total} inputs; solver fallbacks per space: {}", report.join(", ")))
}

fn criterion_7() -> Outcome {
    let mut r = rng(7);
    for i in 0..500 {
        let p = r.random_range(1..=9);
        let q = loop {
            let q = r.random_range(-9..=9);
            if gluing_for(p, q).is_ok() {
                break q;
            }
        };
        let g = gluing_for(p, q).map_err(|e| e.to_string())?;
        let k = r.random_range(1..=3);
        let u = annulus_element(&mut r, 6, k);
        let moves = [
            Move::WedgeShift(r.random_range(-3..=3)),
            Move::Pq { k: r.random_range(0..=4), l: r.random_range(-4..=4), coeff: monomial(&mut r) },
        ];
        for mv in moves {
            let there = mv.apply(&u, &g).map_err(|e| e.to_string())?;
            let back = mv.inverse().apply(&there, &g).map_err(|e| e.to_string())?;
            if back != u {
                return Err(format!("case {i}: {mv:?} on {} in L({p},{q})", print_annulus(&u)));
            }
        }
        let (sigma, d) = (sign(&mut r), r.random_range(-4..=4));
        let x = Acted { coeff: monomial(&mut r), curve: g.apply((sigma, d)), arg: u.clone() };
        let back = strip_move(&x, sigma, d, &g).and_then(|s| unstrip_move(&s, sigma, d, &g));
        if back.as_ref() != Some(&x) {
            return Err(format!("case {i}: strip({sigma},{d}) on {} in L({p},{q})", print_annulus(&u)));
        }
    }
    let spaces: Vec<_> = (1..=5).flat_map(|p| (-5..=5).filter_map(move |q| gluing_for(p, q).ok())).collect();
    for i in 0..100 {
        let g = spaces[r.random_range(0..spaces.len())];
        let (k, a, s) = (r.random_range(-4..=4), r.random_range(-2..=2), r.random_range(-2..=2));
        let eta1 = 2 * (g.a * a + g.p * s) * (k * g.q);
        let closed = &t_pow(eta1) * &(t_pow(k) + t_pow(-k));
        if base_scalar(k, a, s, &g) != closed {
            return Err(format!("case {i}: base scalar at k={k}, r={a}, s={s} in L({},{})", g.p, g.q));
        }
        if i % 4 == 0 {
            let with_loop = reduce_xy(0, k, a, s, &g, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            let bare = reduce_xy(0, 0, a, s, &g, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
            if scale_coords(&with_loop, &Scalar::from_int(2)) != scale_coords(&bare, &closed) {
                return Err(format!("case {i}: reduced base case at k={k}, r={a}, s={s} in L({},{})", g.p, g.q));
            }
        }
    }
    Ok("500 elements, 100 base scalars".into())
}

/// Grid words, their wedge-period neighbours and their `(p,q)_T` neighbours.
fn neighbours(g: &GluingMatrix) -> Vec<AnnulusElement> {
    let h = g.h();
    let mut out = Vec::new();
    for n in 0..=h {
        for m in -h..=h {
            let u = AnnulusElement::word(n, m);
            for s in [-1, 1] {
                out.push(Move::WedgeShift(s).apply(&u, g).expect("valid shift"));
            }
            out.push(u);
        }
        for l in -h..-h + g.p {
            let tform: BTreeMap<_, _> = [((n, l), Scalar::one())].into_iter().collect();
            out.push(act(&f_push(&t_curve(0, 1), g), &annulus::from_tform(&tform)));
        }
    }
    out
}

fn extent(u: &AnnulusElement) -> i64 {
    u.terms().map(|(w, _)| w.n().max(w.r().abs())).max().unwrap_or(0)
}

fn agree(u: &AnnulusElement, g: &GluingMatrix) -> Result<(), String> {
    let e = LensElement::left(u.clone());
    let a = reduce(&e, g, DEFAULT_BUDGET).map_err(|err| format!("recursive: {err}"))?;
    let b = reduce_solver(&e, g, Window::square((4 * g.p).max(extent(u)))).map_err(|err| format!("solver: {err}"))?;
    if a != b {
        return Err(format!("{} in L({},{}): {a:?} vs {b:?}", print_annulus(u), g.p, g.q));
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let g1 = gluing_for(1, 0).map_err(|e| e.to_string())?;
    let mut r = rng(8);
    for _ in 0..100 {
        let k = r.random_range(1..=3);
        agree(&annulus_element(&mut r, 6, k), &g1)?;
    }
    let mut count = 100;
    for g in lens_spaces() {
        for u in neighbours(&g) {
            agree(&u, &g)?;
            count += 1;
        }
    }
    Ok(format!("{count} inputs"))
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    for p in 1..=50i64 {
        for x in -200..=200i64 {
            let (s0, w) = abs_min_remainder(x, p).map_err(|e| e.to_string())?;
            let mut best: Option<(i64, i64)> = None;
            for s in -250..=250i64 {
                let c = x + p * s;
                if best.is_none_or(|(_, b)| c.abs() < b.abs()) {
                    best = Some((s, c));
                }
            }
            let (bs, bw) = best.expect("nonempty scan");
            if w != x + p * s0 || (w - x).rem_euclid(p) != 0 || w.abs() > p / 2 || (s0, w) != (bs, bw) {
                return Err(format!("x={x}, p={p}: got ({s0},{w}), scan ({bs},{bw})"));
            }
            count += 1;
        }
    }
    Ok(format!("{count} pairs"))
}

fn fuzz_input(r: &mut impl Rng) -> Vec<u8> {
    const TOKENS: &[&str] = &[
        "T(",
        "W(",
        "c(",
        "w(",
        "x(",
        "y(",
        "xT(",
        "(x)",
        "[",
        "]",
        ")",
        "(",
        ",",
        "*",
        "+",
        "-",
        "^",
        "t",
        "/",
        "1",
        "2",
        "-3",
        "999999999999",
        " ",
        "0",
    ];
    let len = r.random_range(0..48);
    if r.random_bool(0.5) {
        (0..len).map(|_| r.random()).collect()
    } else {
        (0..len).flat_map(|_| TOKENS[r.random_range(0..TOKENS.len())].bytes()).collect()
    }
}

fn table_output(args: &[&str]) -> Result<String, String> {
    let cli = Cli::try_parse_from(args).map_err(|e| e.to_string())?;
    execute(&cli).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let mut r = rng(10);
    for i in 0..500 {
        let s = rational_scalar(&mut r);
        if parse_scalar(&s.to_string()).as_ref() != Ok(&s) {
            return Err(format!("scalar case {i}: {s}"));
        }
        let a = torus_element(&mut r, 6);
        if parse_torus(&print_torus(&a)).as_ref() != Ok(&a) {
            return Err(format!("torus case {i}: {}", print_torus(&a)));
        }
        let k = r.random_range(0..=3);
        let u = annulus_element(&mut r, 6, k);
        if parse_annulus(&print_annulus(&u)).as_ref() != Ok(&u) {
            return Err(format!("annulus case {i}: {}", print_annulus(&u)));
        }
        let mut e = LensElement::default();
        for _ in 0..r.random_range(0..=3) {
            let (lk, rk) = (r.random_range(1..=2), r.random_range(1..=2));
            let (left, right) = (annulus_element(&mut r, 4, lk), annulus_element(&mut r, 4, rk));
            e.terms.push((left, right, monomial(&mut r)));
        }
        if parse_lens(&print_lens(&e)).as_ref().map_err(|err| err.to_string()) != Ok(&e) {
            return Err(format!("lens case {i}: {}", print_lens(&e)));
        }
    }

    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let mut slowest = Duration::ZERO;
    let mut crash = None;
    for i in 0..10_000 {
        let bytes = fuzz_input(&mut r);
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let start = Instant::now();
        let ok = panic::catch_unwind(AssertUnwindSafe(|| {
            let _ = parse_any(&text);
            let _ = parse_fraction(&text);
        }));
        slowest = slowest.max(start.elapsed());
        if ok.is_err() {
            crash = Some(format!("fuzz case {i} panicked on {text:?}"));
            break;
        }
    }
    panic::set_hook(hook);
    if let Some(c) = crash {
        return Err(c);
    }
    if slowest > Duration::from_secs(1) {
        return Err(format!("slowest fuzz input took {slowest:?}"));
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = dir.path().join("cache.json");
    let cache = cache.to_str().ok_or("non-UTF-8 temp path")?;
    let base = ["gl2skein", "-p", "5", "-q", "2", "table", "--n-max", "5", "--w-max", "5"];
    let with_cache: Vec<&str> = base.iter().copied().chain(["--cache", cache]).collect();
    let plain = table_output(&base)?;
    let cold = table_output(&with_cache)?;
    let warm = table_output(&with_cache)?;
    if !std::path::Path::new(cache).exists() {
        return Err("table did not write its cache".into());
    }
    if cold != warm || cold != plain {
        return Err("table output differs between cold and warm cache".into());
    }
    Ok(format!("2000 round trips, 10000 fuzz inputs (slowest {slowest:.1?}), {} table bytes", cold.len()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let criteria: [Criterion; 10] = [
        ("torus multiplication is associative", 60, criterion_1),
        ("product-to-sum and orientation reversal identities", 30, criterion_2),
        ("action is compatible with projection and multiplication", 120, criterion_3),
        ("projection seeds and leading units", 10, criterion_4),
        ("S^3 reduction evaluates unknots", 60, criterion_5),
        ("lens reductions land in the spanning grid", 300, criterion_6),
        ("moves invert exactly; base scalar closed form", 30, criterion_7),
        ("solver and recursion agree", 120, criterion_8),
        ("absolute minimal remainder", 5, criterion_9),
        ("language round trip, fuzzing, table determinism", 120, criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > Duration::from_secs(*limit) => Err(format!("took {elapsed:.1?}, limit {limit}s")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({elapsed:.1?})", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} ({elapsed:.1?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
