//! Elementary rewrites of `u (x) 1`, each paired with its exact inverse.

use super::{pq_relation, strip, unstrip, wedge_shift, GluingMatrix, LensError};
use crate::action::act;
use crate::annulus::AnnulusElement;
use crate::scalar::Scalar;
use crate::torus::t_curve;

/// A move on the left factor of `u (x) 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Move {
    /// Every word `(n) W^(j)` goes to `(n) W^(j - s p)` with its wedge-period scalar.
    WedgeShift(i64),
    /// Adds `coeff` times the `(p,q)_T` relation on `(k)_T W^(l)`.
    Pq { k: i64, l: i64, coeff: Scalar },
}

impl Move {
    pub fn inverse(&self) -> Move {
        match self {
            Move::WedgeShift(s) => Move::WedgeShift(-s),
            Move::Pq { k, l, coeff } => Move::Pq { k: *k, l: *l, coeff: -coeff },
        }
    }

    pub fn apply(&self, u: &AnnulusElement, g: &GluingMatrix) -> Result<AnnulusElement, LensError> {
        match self {
            Move::WedgeShift(s) => wedge_shift(u, *s, g),
            Move::Pq { k, l, coeff } => {
                let mut out = u.clone();
                out.add_scaled(&pq_relation(*k, *l, g), coeff);
                Ok(out)
            }
        }
    }
}

/// The pending element `coeff * T(curve) . arg (x) 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Acted {
    pub coeff: Scalar,
    pub curve: (i64, i64),
    pub arg: AnnulusElement,
}

impl Acted {
    pub fn value(&self) -> AnnulusElement {
        act(&t_curve(self.curve.0, self.curve.1), &self.arg).scale(&self.coeff)
    }
}

/// `T(M(sigma,d)) . u (x) 1 -> t^{sigma d} T(sigma a, sigma b) . u (x) 1`; `None` if the curve does not match.
pub fn strip_move(x: &Acted, sigma: i64, d: i64, g: &GluingMatrix) -> Option<Acted> {
    if x.curve != g.apply((sigma, d)) {
        return None;
    }
    let (c, _) = strip(sigma, d, g);
    Some(Acted { coeff: &x.coeff * &c, curve: g.apply((sigma, 0)), arg: x.arg.clone() })
}

/// Inverse of [`strip_move`].
pub fn unstrip_move(x: &Acted, sigma: i64, d: i64, g: &GluingMatrix) -> Option<Acted> {
    if x.curve != g.apply((sigma, 0)) {
        return None;
    }
    let (c, _) = unstrip(sigma, d, g);
    Some(Acted { coeff: &x.coeff * &c, curve: g.apply((sigma, d)), arg: x.arg.clone() })
}
