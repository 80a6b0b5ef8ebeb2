//! Projection to the solid torus and the boundary action of the torus algebra on it.

use crate::annulus::{from_tform, to_tform, x_shared, AnnulusElement, AnnulusWord, TForm};
use crate::scalar::{t_pow, Scalar};
use crate::torus::{self, TorusElement};

/// `pi((m,n)_T W^(r,s)) = t^{-2rn-2rs} x_{m,n} W^(r)`.
pub fn project(a: &TorusElement) -> AnnulusElement {
    let mut out = AnnulusElement::zero();
    for (w, c) in a.terms() {
        let (r, s) = w.wpart;
        match w.tpart {
            None => out.add_term(AnnulusWord::new(0, r), c * &t_pow(-2 * r * s)),
            Some((m, n)) => {
                let k = c * &t_pow(-2 * r * n - 2 * r * s);
                for (v, cv) in x_shared(m, n).terms() {
                    out.add_term(AnnulusWord::new(v.n(), v.r() + r), cv * &k);
                }
            }
        }
    }
    out
}

fn wedge_action(tf: &TForm, (r, s): (i64, i64)) -> TForm {
    if (r, s) == (0, 0) {
        return tf.clone();
    }
    tf.iter().map(|(&(k, l), c)| ((k, l + r), c * &t_pow(-2 * s * (r + k + 2 * l)))).collect()
}

fn curve_action(out: &mut AnnulusElement, tf: &TForm, (m, n): (i64, i64), coeff: &Scalar) {
    for (&(k, l), c) in tf {
        let c = c * coeff;
        for (idx, shift, e) in [(m + k, l, -2 * n * l), (m - k, k + l, -2 * n * (k + l))] {
            let f = &c * &t_pow(e);
            for (v, cv) in x_shared(idx, n).terms() {
                out.add_term(AnnulusWord::new(v.n(), v.r() + shift), cv * &f);
            }
        }
    }
}

/// The left action `A . u`; each word acts by its wedge part first, then its curve.
pub fn act(a: &TorusElement, u: &AnnulusElement) -> AnnulusElement {
    let tf = to_tform(u);
    let mut out = AnnulusElement::zero();
    for (w, c) in a.terms() {
        let moved = wedge_action(&tf, w.wpart);
        match w.tpart {
            None => out.add_scaled(&from_tform(&moved), c),
            Some(mn) => curve_action(&mut out, &moved, mn, c),
        }
    }
    out
}

/// `pi(A * B)`, the multiply-then-project route to `A . pi(B)`.
pub fn act_oracle(a: &TorusElement, b: &TorusElement) -> AnnulusElement {
    project(&torus::mul(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::{core, x};
    use crate::torus::{t_curve, wedge};

    #[test]
    fn projections() {
        assert_eq!(project(&t_curve(0, 1)), AnnulusElement::from_scalar(t_pow(1) + t_pow(-1)));
        assert_eq!(project(&wedge(2, 3)), AnnulusElement::from_word(AnnulusWord::new(0, 2), t_pow(-12)));
        let tw = torus::mul(&t_curve(1, 0), &wedge(1, 1));
        assert_eq!(project(&tw), AnnulusElement::from_word(AnnulusWord::new(1, 1), t_pow(-2)));
    }

    #[test]
    fn action_examples() {
        let u = core(3);
        assert_eq!(act(&wedge(0, 0), &u), u);
        let one = AnnulusElement::one();
        assert_eq!(act(&t_curve(0, 1), &one), AnnulusElement::from_scalar(t_pow(1) + t_pow(-1)));
        let expected = &x(2, 1) + &x(0, 1).shift_wedge(1).scale(&t_pow(-2));
        assert_eq!(act(&t_curve(1, 1), &core(1)), expected);
        let mut by_hand = AnnulusElement::from_word(AnnulusWord::new(2, 0), t_pow(1));
        by_hand.add_term(AnnulusWord::new(0, 1), t_pow(-3) - t_pow(1));
        assert_eq!(expected, by_hand);
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(act_oracle(&t_curve(0, 1), &TorusElement::one()), project(&t_curve(0, 1)));
        assert_eq!(act_oracle(&t_curve(1, 0), &wedge(1, 0)), AnnulusElement::word(1, 1));
    }
}
