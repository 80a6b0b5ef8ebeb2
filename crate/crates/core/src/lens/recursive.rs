use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{LazyLock, Mutex};

use super::{
    abs_min_remainder, balanced_left, pq_relation, solve_ma_kp, wedge_normalize, GluingMatrix, LensElement, LensError,
    SpanningCoordinates,
};
use crate::action::act;
use crate::annulus::{x, y, AnnulusElement, AnnulusWord};
use crate::scalar::{t_pow, Scalar, ScalarFraction};
use crate::torus::{self, t_curve, wedge};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

const STACK_BYTES: usize = 512 << 20;
const MAX_DEPTH: usize = 200_000;
const BAND_SHIFTS: [i64; 5] = [0, 1, -1, 2, -2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Key {
    Word(i64, i64),
    Xy(i64, i64, i64, i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Sym {
    Grid(i64, i64),
    /// A word or product still being reduced further up the stack.
    Pending(Key),
}

/// A linear combination of grid words and pending reductions.
///
/// Every memoized value is an identity in the lens module, so values that still
/// mention pending keys stay valid once those keys are resolved.
#[derive(Debug, Clone, Default, PartialEq)]
struct Lin(BTreeMap<Sym, ScalarFraction>);

impl Lin {
    fn grid(n: i64, j: i64, c: Scalar) -> Lin {
        let mut out = Lin::default();
        out.add(Sym::Grid(n, j), &ScalarFraction::from(c));
        out
    }

    fn pending(key: Key) -> Lin {
        Lin([(Sym::Pending(key), ScalarFraction::one())].into_iter().collect())
    }

    fn add(&mut self, s: Sym, c: &ScalarFraction) {
        if c.is_zero() {
            return;
        }
        let slot = self.0.entry(s).or_insert_with(ScalarFraction::zero);
        *slot = slot.add(c);
        if slot.is_zero() {
            self.0.remove(&s);
        }
    }

    fn add_lin(&mut self, other: &Lin, c: &ScalarFraction) {
        for (s, v) in &other.0 {
            self.add(*s, &v.mul(c));
        }
    }

    fn add_scaled(&mut self, other: &Lin, c: &Scalar) {
        for (s, v) in &other.0 {
            self.add(*s, &v.mul_scalar(c));
        }
    }

    fn scale(&self, c: &Scalar) -> Lin {
        let mut out = Lin::default();
        out.add_scaled(self, c);
        out
    }

    fn minus(&self, other: &Lin) -> Lin {
        let mut out = self.clone();
        out.add_scaled(other, &-Scalar::one());
        out
    }

    fn is_closed(&self) -> bool {
        self.0.keys().all(|s| matches!(s, Sym::Grid(..)))
    }

    fn coordinates(&self) -> Result<SpanningCoordinates, LensError> {
        let mut out = SpanningCoordinates::default();
        for (s, c) in &self.0 {
            match s {
                Sym::Grid(n, m) => out.add((*n, *m), c),
                Sym::Pending(k) => return Err(LensError::StepLimitExceeded(format!("unresolved cycle at {k:?}"))),
            }
        }
        Ok(out)
    }
}

type Memo = HashMap<Key, Lin>;

static MEMO: LazyLock<Mutex<HashMap<GluingMatrix, Memo>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

struct Reducer<'a> {
    g: &'a GluingMatrix,
    memo: Memo,
    active: HashSet<Key>,
    steps: u64,
    budget: u64,
}

impl<'a> Reducer<'a> {
    fn new(g: &'a GluingMatrix, budget: u64) -> Self {
        let memo = MEMO.lock().expect("reduction memo poisoned").remove(g).unwrap_or_default();
        Reducer { g, memo, active: HashSet::new(), steps: 0, budget }
    }

    /// Stores the fully resolved entries for later calls; entries tied to an aborted stack are dropped.
    fn finish(mut self) {
        self.active.clear();
        let keys: Vec<Key> = self.memo.keys().copied().collect();
        for k in keys {
            self.lookup(k);
        }
        self.memo.retain(|_, v| v.is_closed());
        let mut all = MEMO.lock().expect("reduction memo poisoned");
        all.entry(*self.g).or_default().extend(self.memo);
    }

    fn tick(&mut self) -> Result<(), LensError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(LensError::StepLimitExceeded(format!("budget of {} moves exhausted", self.budget)));
        }
        if self.active.len() > MAX_DEPTH {
            return Err(LensError::StepLimitExceeded("recursion too deep".into()));
        }
        Ok(())
    }

    /// The memoized value of `key` with every resolved pending key substituted.
    fn lookup(&mut self, key: Key) -> Option<Lin> {
        let v = self.memo.get(&key)?.clone();
        if v.is_closed() {
            return Some(v);
        }
        let mut out = Lin::default();
        for (s, c) in &v.0 {
            match s {
                Sym::Pending(k) if *k != key && self.memo.contains_key(k) => {
                    let sub = self.lookup(*k).expect("present");
                    out.add_lin(&sub, c);
                }
                _ => out.add(*s, c),
            }
        }
        self.memo.insert(key, out.clone());
        Some(out)
    }

    fn enter(&mut self, key: Key) -> Option<Lin> {
        if let Some(v) = self.lookup(key) {
            return Some(v);
        }
        if !self.active.insert(key) {
            return Some(Lin::pending(key));
        }
        None
    }

    /// Solves `key = c key + rest` for `key`; `None` if `c = 1`.
    fn solve_cycle(key: Key, mut value: Lin) -> Option<Lin> {
        let Some(c) = value.0.remove(&Sym::Pending(key)) else {
            return Some(value);
        };
        let inv = ScalarFraction::one().sub(&c).inv().ok()?;
        let mut solved = Lin::default();
        solved.add_lin(&value, &inv);
        Some(solved)
    }

    fn leave(&mut self, key: Key, value: Lin) -> Result<Lin, LensError> {
        let value = Self::solve_cycle(key, value)
            .ok_or_else(|| LensError::StepLimitExceeded(format!("cycle at {key:?} does not determine it")))?;
        self.active.remove(&key);
        self.memo.insert(key, value.clone());
        Ok(value)
    }

    fn reduce_element(&mut self, u: &AnnulusElement) -> Result<Lin, LensError> {
        let mut out = Lin::default();
        for (w, c) in u.terms() {
            out.add_scaled(&self.reduce_word(w.n(), w.r())?, c);
        }
        Ok(out)
    }

    fn reduce_word(&mut self, n: i64, j: i64) -> Result<Lin, LensError> {
        self.tick()?;
        let (j, f) = wedge_normalize(n, j, self.g)?;
        if n <= self.g.h() {
            return Ok(Lin::grid(n, j, f));
        }
        let key = Key::Word(n, j);
        if let Some(v) = self.enter(key) {
            return Ok(v.scale(&f));
        }
        if n >= self.g.p {
            let v = self.descend(n, j)?;
            return Ok(self.leave(key, v)?.scale(&f));
        }
        // A cycle through this word may carry no information; other splittings of n usually do.
        for shift in BAND_SHIFTS {
            let v = self.band(n, j, shift)?;
            if let Some(v) = Self::solve_cycle(key, v) {
                return Ok(self.leave(key, v)?.scale(&f));
            }
        }
        Err(LensError::StepLimitExceeded(format!("cycle at {key:?} does not determine it")))
    }

    /// Isolates the top word of the `(p,q)_T` relation on `(n-p)_T W^(j)`.
    fn descend(&mut self, n: i64, j: i64) -> Result<Lin, LensError> {
        let mut rel = pq_relation(n - self.g.p, j, self.g);
        let top = AnnulusWord::new(n, j);
        let lead = rel.coeff(&top);
        rel.add_term(top, -&lead);
        let inv = lead.inv_unit().expect("relation lead is a unit multiple");
        Ok(self.reduce_element(&rel)?.scale(&-&inv))
    }

    /// `(n) W^(j) = lead^-1 (x_{n,nu} W^(j) - lower terms)` with `n = ma + kp`, `m` shifted by `shift * p`.
    fn band(&mut self, n: i64, j: i64, shift: i64) -> Result<Lin, LensError> {
        let g = *self.g;
        let (m0, k0) = solve_ma_kp(n, &g);
        let (m, k) = (m0 + shift * g.p, k0 - shift * g.a);
        let (_, nu) = g.apply((m, k));
        let mut rest = x(n, nu).shift_wedge(j);
        let top = AnnulusWord::new(n, j);
        let lead = rest.coeff(&top);
        rest.add_term(top, -&lead);
        let inv = lead.inv_unit().expect("leading coefficient of x is a unit");
        let (r, s) = solve_ma_kp(j, &g);
        let (_, s1) = g.apply((r, s));
        let head = self.reduce_xy(m, k, r, s)?.scale(&t_pow(2 * j * s1));
        let lower = self.reduce_element(&rest)?;
        Ok(head.minus(&lower).scale(&inv))
    }

    fn reduce_xy(&mut self, m: i64, k: i64, r: i64, s: i64) -> Result<Lin, LensError> {
        self.tick()?;
        let key = Key::Xy(m, k, r, s);
        if let Some(v) = self.enter(key) {
            return Ok(v);
        }
        let v = self.reduce_xy_uncached(m, k, r, s)?;
        self.leave(key, v)
    }

    fn reduce_xy_uncached(&mut self, m: i64, k: i64, r: i64, s: i64) -> Result<Lin, LensError> {
        let g = *self.g;
        let (n, nu) = g.apply((m, k));
        let (r1, s1) = g.apply((r, s));
        let yv = y(r1, s1);
        let pre = xy_prefactor((n, nu), (r1, s1));
        if m == 0 {
            return Ok(self.reduce_element(&yv)?.scale(&(&pre * &(t_pow(k) + t_pow(-k)))));
        }
        let sigma = m.signum();
        let (sa, sb) = g.apply((sigma, 0));
        if m.abs() == 1 {
            let u = act(&t_curve(sa, sb), &yv);
            return Ok(self.reduce_element(&u)?.scale(&(&pre * &t_pow(sigma * k))));
        }
        // T(M(m,k)) = T(u) T(v) - W(u) T(v - u) with u = M(sigma, d), v = M(m - sigma, k0).
        let (k0, _) = abs_min_remainder((m - sigma) * g.a, g.p)?;
        let d = k - k0;
        let v = g.apply((m - sigma, k0));
        let z = act(&t_curve(sa, sb), &act(&t_curve(v.0, v.1), &yv));
        let first = self.reduce_element(&z)?.scale(&(&pre * &t_pow(sigma * d)));
        let vu = g.apply((m - 2 * sigma, k0 - d));
        let prod = torus::mul(&torus::mul(&wedge(sa, sb), &t_curve(vu.0, vu.1)), &wedge(r1, s1));
        let single = match prod.terms().next() {
            Some((w, c)) if prod.len() == 1 && w.tpart == Some(vu) => Some((w.wpart, c.clone())),
            _ => None,
        };
        let second = match single {
            Some((z, c)) => {
                debug_assert_eq!(z, g.apply((r + sigma, s)));
                self.reduce_xy(m - 2 * sigma, k0 - d, r + sigma, s)?.scale(&(&c * &t_pow(-2 * z.0 * vu.1)))
            }
            None => self.reduce_element(&crate::action::project(&prod))?,
        };
        Ok(first.minus(&second.scale(&(&pre * &t_pow(-2 * sigma * d)))))
    }
}

/// `c` with `x_{n,nu} y_{r,s} = c * (n,nu)_T . y_{r,s}`, read off from the top words.
fn xy_prefactor((n, nu): (i64, i64), (r, s): (i64, i64)) -> Scalar {
    let yv = y(r, s);
    let lhs = crate::annulus::mul(&x(n, nu), &yv);
    let rhs = act(&t_curve(n, nu), &yv);
    let (w, c) = rhs.terms().next_back().expect("nonzero action");
    lhs.coeff(w).div_exact(c).expect("x y and T . y are proportional")
}

fn with_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, f)
            .expect("spawn reduction thread")
            .join()
            .expect("reduction thread panicked")
    })
}

fn run<T: Send>(
    g: &GluingMatrix,
    budget: u64,
    f: impl FnOnce(&mut Reducer) -> Result<T, LensError> + Send,
) -> Result<T, LensError> {
    with_big_stack(|| {
        let mut red = Reducer::new(g, budget);
        let out = f(&mut red);
        red.finish();
        out
    })
}

/// Grid coordinates through the recursive moves; grid words of the balanced input are kept.
pub fn reduce(e: &LensElement, g: &GluingMatrix, budget: u64) -> Result<SpanningCoordinates, LensError> {
    let left = balanced_left(e, g);
    run(g, budget, |red| {
        let mut out = Lin::default();
        for (w, c) in left.terms() {
            if g.is_grid(w.n(), w.r()) {
                out.add(Sym::Grid(w.n(), w.r()), &ScalarFraction::from(c.clone()));
            } else {
                out.add_scaled(&red.reduce_word(w.n(), w.r())?, c);
            }
        }
        out.coordinates()
    })
}

/// Coordinates of `x_{M(m,k)} y_{M(r,s)} (x) 1`.
pub fn reduce_xy(
    m: i64,
    k: i64,
    r: i64,
    s: i64,
    g: &GluingMatrix,
    budget: u64,
) -> Result<SpanningCoordinates, LensError> {
    run(g, budget, |red| red.reduce_xy(m, k, r, s)?.coordinates())
}

/// The scalar `c` in `x_{M(0,k)} y_{M(r,s)} (x) 1 = c * y_{M(r,s)} (x) 1`.
pub fn base_scalar(k: i64, r: i64, s: i64, g: &GluingMatrix) -> Scalar {
    let (n, nu) = g.apply((0, k));
    let pre = xy_prefactor((n, nu), g.apply((r, s)));
    let loop_k = crate::action::project(&t_curve(0, k));
    &pre * &crate::annulus::evaluate_unknots(&loop_k)
}
