//! Graded differential-polynomial algebra over a jet space.
//!
//! Coefficients are exact rationals. Odd jets anticommute; every value is
//! kept in a canonical form so equality is structural.

mod poly;
mod render;
mod vars;

use std::collections::BTreeMap;

pub use poly::{int, rat, DiffPoly, Factor, Rational, Term};
pub use render::{default_base_name, jet_name, render_poly, render_tuple, suffix};
pub use vars::{BaseVar, Bundle, JetVar, MultiIndex, Parity};

use crate::calculus::total_derivative_multi;

/// Bindings for [`substitute`]: a bundle component mapped to its replacement.
pub type Bindings = BTreeMap<(Bundle, usize), DiffPoly>;

/// Replace every jet of a bound bundle component by the matching total
/// derivative of its binding. Unbound bundles pass through.
///
/// Odd-for-even substitution is allowed; the result is renormalized, so an
/// odd replacement raised to a power of two or more yields zero.
pub fn substitute(p: &DiffPoly, bindings: &Bindings) -> DiffPoly {
    p.substitute_with(|v| {
        bindings
            .get(&(v.bundle().clone(), v.component()))
            .map(|target| total_derivative_multi(target, v.sigma()))
    })
}

/// Section of `bundle` made of its own coordinates: `(u^1, ..., u^m)`.
pub fn coords(bundle: &Bundle) -> Vec<DiffPoly> {
    (0..bundle.dim())
        .map(|a| DiffPoly::var(bundle.coord(a)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(b: &Bundle, k: u32) -> DiffPoly {
        DiffPoly::var(b.jet(0, MultiIndex::from_counts(vec![k])).unwrap())
    }

    #[test]
    fn substitute_odd_into_skew_bilinear() {
        let p = Bundle::over("p", 1, Parity::Even, 1);
        let q = Bundle::over("q", 1, Parity::Even, 1);
        let b = Bundle::over("b", 1, Parity::Odd, 1);
        let expr = j(&p, 1) * j(&q, 0) - j(&p, 0) * j(&q, 1);
        let mut bind = Bindings::new();
        bind.insert((p.clone(), 0), j(&b, 0));
        bind.insert((q.clone(), 0), j(&b, 0));
        let got = substitute(&expr, &bind);
        assert_eq!(got, (j(&b, 0) * j(&b, 1)).scale(&int(-2)));
        assert_eq!(got, (j(&b, 1) * j(&b, 0)).scale(&int(2)));
    }

    #[test]
    fn substitute_zero_and_prolongation() {
        let p = Bundle::over("p", 1, Parity::Even, 1);
        let w = Bundle::over("w", 1, Parity::Even, 1);
        let mut bind = Bindings::new();
        bind.insert((p.clone(), 0), DiffPoly::zero());
        assert!(substitute(&j(&p, 0), &bind).is_zero());

        let mut bind = Bindings::new();
        bind.insert((p.clone(), 0), j(&w, 0).pow(2));
        assert_eq!(substitute(&j(&p, 1), &bind), (j(&w, 0) * j(&w, 1)).scale(&int(2)));
    }

    #[test]
    fn unbound_bundles_pass_through() {
        let p = Bundle::over("p", 1, Parity::Even, 1);
        let w = Bundle::over("w", 1, Parity::Even, 1);
        let expr = j(&p, 0) * j(&w, 2);
        let mut bind = Bindings::new();
        bind.insert((p.clone(), 0), DiffPoly::int(3));
        assert_eq!(substitute(&expr, &bind), j(&w, 2).scale(&int(3)));
    }
}
