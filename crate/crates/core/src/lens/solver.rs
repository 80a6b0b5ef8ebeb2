use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, LazyLock, Mutex};

use super::{
    balanced_left, f_push, lift, pq_relation, wedge_normalize, GluingMatrix, LensElement, LensError,
    SpanningCoordinates,
};
use crate::action::{act, project};
use crate::annulus::{AnnulusElement, AnnulusWord};
use crate::scalar::ScalarFraction;
use crate::torus::t_curve;

/// Bounds on the core multiplicity and wedge exponent of words the solver may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    pub core: i64,
    pub wedge: i64,
}

impl Window {
    pub fn square(n: i64) -> Self {
        Window { core: n, wedge: n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    /// The `(p,q)_T` relation, from `mu = (0,1)`.
    Pq,
    /// `f((mu)_T) . u (x) 1 = u (x) x_mu` for another small `mu`.
    Curve(i64, i64),
}

/// A window-normalized combination of `(x) 1` words that vanishes in the lens space.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub kind: RelationKind,
    pub source: (i64, i64),
    pub terms: AnnulusElement,
}

const CURVES: [(i64, i64); 4] = [(1, -1), (1, 1), (-1, -1), (-1, 1)];

type Row = BTreeMap<(i64, i64), ScalarFraction>;

fn normalize_element(u: &AnnulusElement, g: &GluingMatrix) -> Result<AnnulusElement, LensError> {
    let mut out = AnnulusElement::zero();
    for (w, c) in u.terms() {
        let (j, f) = wedge_normalize(w.n(), w.r(), g)?;
        out.add_term(AnnulusWord::new(w.n(), j), c * &f);
    }
    Ok(out)
}

fn curve_relation(mu: (i64, i64), i: i64, j: i64, g: &GluingMatrix) -> Result<AnnulusElement, LensError> {
    let b = &t_curve(mu.0, mu.1) - &lift(&project(&t_curve(mu.0, mu.1)));
    normalize_element(&act(&f_push(&b, g), &AnnulusElement::word(i, j)), g)
}

fn wedge_range(g: &GluingMatrix) -> std::ops::Range<i64> {
    -g.h()..-g.h() + g.p
}

fn top_degree(u: &AnnulusElement) -> i64 {
    u.degree().unwrap_or(-1)
}

/// All relations on source words `(i) W^(j)`, `i <= window.core`, whose words stay within the window.
pub fn relation_set(g: &GluingMatrix, window: Window) -> Result<Vec<Relation>, LensError> {
    let mut out = Vec::new();
    for i in 0..=window.core {
        for j in wedge_range(g) {
            let terms = normalize_element(&pq_relation(i, j, g), g)?;
            if !terms.is_zero() && top_degree(&terms) <= window.core {
                out.push(Relation { kind: RelationKind::Pq, source: (i, j), terms });
            }
        }
        for mu in CURVES {
            for j in wedge_range(g) {
                let terms = curve_relation(mu, i, j, g)?;
                if !terms.is_zero() && top_degree(&terms) <= window.core {
                    out.push(Relation { kind: RelationKind::Curve(mu.0, mu.1), source: (i, j), terms });
                }
            }
        }
    }
    Ok(out)
}

/// Elimination state for one gluing matrix and core bound.
struct Table {
    g: GluingMatrix,
    core: i64,
    /// Images of words of degree `>= p` in words of degree `< p`.
    descent: HashMap<(i64, i64), Row>,
    /// Images of band words `h < n < p` on the grid.
    band: HashMap<(i64, i64), Row>,
    /// Grid-only residues met while eliminating.
    dependencies: Vec<Row>,
}

type TableCache = HashMap<(GluingMatrix, i64), Arc<Table>>;

static TABLES: LazyLock<Mutex<TableCache>> = LazyLock::new(|| Mutex::new(HashMap::new()));

fn add_row(acc: &mut Row, row: &Row, c: &ScalarFraction) {
    for (k, v) in row {
        let slot = acc.entry(*k).or_insert_with(ScalarFraction::zero);
        *slot = slot.add(&v.mul(c));
        if slot.is_zero() {
            acc.remove(k);
        }
    }
}

fn to_row(u: &AnnulusElement) -> Row {
    u.terms().map(|(w, c)| ((w.n(), w.r()), ScalarFraction::from(c.clone()))).collect()
}

fn scale_row(row: &Row, c: &ScalarFraction) -> Row {
    row.iter().map(|(k, v)| (*k, v.mul(c))).collect()
}

impl Table {
    fn build(g: GluingMatrix, core: i64, full: bool) -> Result<Table, LensError> {
        let mut t = Table { g, core, descent: HashMap::new(), band: HashMap::new(), dependencies: Vec::new() };
        for n in g.p..=core {
            for j in wedge_range(&g) {
                t.add_descent(n, j)?;
            }
        }
        t.eliminate_band(full)?;
        Ok(t)
    }

    fn add_descent(&mut self, n: i64, j: i64) -> Result<(), LensError> {
        let rel = normalize_element(&pq_relation(n - self.g.p, j, &self.g), &self.g)?;
        let mut row = to_row(&rel);
        let lead = row.remove(&(n, j)).expect("relation contains its top word");
        let scale = lead.inv().expect("nonzero lead").neg();
        let image = self.substitute_descent(&scale_row(&row, &scale));
        self.descent.insert((n, j), image);
        Ok(())
    }

    fn substitute_descent(&self, row: &Row) -> Row {
        let mut out = Row::new();
        for (k, c) in row {
            match self.descent.get(k) {
                Some(img) => add_row(&mut out, img, c),
                None if k.0 >= self.g.p => unreachable!("descent images are built bottom-up"),
                None => add_row(&mut out, &Row::from([(*k, ScalarFraction::one())]), c),
            }
        }
        out
    }

    fn is_band(&self, k: &(i64, i64)) -> bool {
        k.0 > self.g.h() && k.0 < self.g.p
    }

    fn band_words(&self) -> usize {
        ((self.g.p - self.g.h() - 1).max(0) * self.g.p) as usize
    }

    /// Gauss-Jordan elimination on band words, highest degree first.
    fn eliminate_band(&mut self, full: bool) -> Result<(), LensError> {
        let g = self.g;
        for i in 0..=self.core {
            for mu in CURVES {
                for j in wedge_range(&g) {
                    if !full && self.band.len() == self.band_words() {
                        return Ok(());
                    }
                    let rel = curve_relation(mu, i, j, &g)?;
                    if rel.is_zero() || top_degree(&rel) > self.core {
                        continue;
                    }
                    let row = self.substitute_descent(&to_row(&rel));
                    self.absorb(row);
                }
            }
        }
        Ok(())
    }

    fn absorb(&mut self, row: Row) {
        let mut row = self.reduce_band(row);
        let pivot = row.keys().filter(|k| self.is_band(k)).min_by_key(|k| (-k.0, k.1)).copied();
        let Some(pivot) = pivot else {
            if !row.is_empty() {
                self.dependencies.push(row);
            }
            return;
        };
        let lead = row.remove(&pivot).expect("pivot present");
        let row = scale_row(&row, &lead.inv().expect("nonzero pivot").neg());
        for img in self.band.values_mut() {
            if let Some(c) = img.remove(&pivot) {
                add_row(img, &row, &c);
            }
        }
        self.band.insert(pivot, row);
    }

    fn reduce_band(&self, row: Row) -> Row {
        let mut out = Row::new();
        for (k, c) in row {
            match self.band.get(&k) {
                Some(img) => add_row(&mut out, img, &c),
                None => add_row(&mut out, &Row::from([(k, ScalarFraction::one())]), &c),
            }
        }
        out
    }

    fn image(&self, n: i64, j: i64) -> Result<Row, LensError> {
        let (j, f) = wedge_normalize(n, j, &self.g)?;
        let f = ScalarFraction::from(f);
        let row = Row::from([((n, j), f)]);
        let row = if n >= self.g.p { self.substitute_descent(&row) } else { row };
        let row = self.reduce_band(row);
        if let Some(&(bn, bm)) = row.keys().find(|k| self.is_band(k)) {
            return Err(LensError::WindowTooSmall { n: bn, m: bm, core: self.core });
        }
        Ok(row)
    }
}

fn table(g: &GluingMatrix, core: i64) -> Result<Arc<Table>, LensError> {
    if let Some(t) = TABLES.lock().expect("solver tables poisoned").get(&(*g, core)) {
        return Ok(t.clone());
    }
    let t = Arc::new(Table::build(*g, core, false)?);
    TABLES.lock().expect("solver tables poisoned").insert((*g, core), t.clone());
    Ok(t)
}

/// Grid coordinates by eliminating all non-grid words with the relations inside `window`.
pub fn reduce_solver(e: &LensElement, g: &GluingMatrix, window: Window) -> Result<SpanningCoordinates, LensError> {
    let left = balanced_left(e, g);
    let mut out = SpanningCoordinates::default();
    let mut pending = Vec::new();
    for (w, c) in left.terms() {
        let (n, m) = (w.n(), w.r());
        if g.is_grid(n, m) {
            out.add((n, m), &ScalarFraction::from(c.clone()));
        } else if n > window.core || m.abs() > window.wedge {
            return Err(LensError::WindowTooSmall { n, m, core: window.core });
        } else {
            pending.push((n, m, c.clone()));
        }
    }
    if pending.is_empty() {
        return Ok(out);
    }
    let t = table(g, window.core)?;
    for (n, m, c) in pending {
        let c = ScalarFraction::from(c);
        for (k, v) in t.image(n, m)? {
            out.add(k, &v.mul(&c));
        }
    }
    Ok(out)
}

/// A grid-only combination `sum c (n) W^(m)` that vanishes in the lens space.
pub type GridDependency = Vec<((i64, i64), ScalarFraction)>;

/// Nonzero grid-only combinations forced by the relations in `window`.
pub fn grid_dependencies(g: &GluingMatrix, window: Window) -> Result<Vec<GridDependency>, LensError> {
    let t = Table::build(*g, window.core, true)?;
    Ok(t.dependencies.into_iter().map(|r| r.into_iter().collect()).collect())
}
