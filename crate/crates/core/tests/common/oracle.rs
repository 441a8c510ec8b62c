//! Brute-force evaluation of the identity residual of the skew-adjoint
//! operator `S = D^3 + w^2 D + w w_x` on concrete polynomial functions of
//! `x`, written independently of the engine.

use jets::{int, DiffPoly, Rational};
use num_traits::Zero;
use rand::Rng;

/// Dense univariate polynomial in `x`, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Rational>);

impl Poly {
    fn trimmed(mut v: Vec<Rational>) -> Poly {
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        Poly(v)
    }

    fn constant(c: Rational) -> Poly {
        Poly::trimmed(vec![c])
    }

    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let get = |p: &Poly, i: usize| p.0.get(i).cloned().unwrap_or_else(Rational::zero);
        Poly::trimmed((0..n).map(|i| get(self, i) + get(o, i)).collect())
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.neg())
    }

    fn mul(&self, o: &Poly) -> Poly {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly(vec![]);
        }
        let mut v = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::trimmed(v)
    }

    fn d(&self) -> Poly {
        Poly::trimmed(self.0.iter().enumerate().skip(1).map(|(i, c)| c * int(i as i64)).collect())
    }

    fn dn(&self, k: u32) -> Poly {
        (0..k).fold(self.clone(), |p, _| p.d())
    }
}

pub fn random_function(r: &mut impl Rng) -> Poly {
    Poly::trimmed((0..=r.gen_range(3..=7)).map(|_| int(r.gen_range(-4..=4))).collect())
}

/// `S(f) = f''' + w^2 f' + w w' f` on concrete functions.
fn s_apply(w: &Poly, f: &Poly) -> Poly {
    f.dn(3).add(&w.mul(w).mul(&f.d())).add(&w.mul(&w.d()).mul(f))
}

/// Variation of the coefficients of `S` along `phi`, applied to `g`:
/// `w^2 ↦ 2 w phi`, `w w' ↦ phi w' + w phi'`.
fn s_varied(w: &Poly, phi: &Poly, g: &Poly) -> Poly {
    let two = Poly::constant(int(2));
    two.mul(w).mul(phi).mul(&g.d()).add(&phi.mul(&w.d()).add(&w.mul(&phi.d())).mul(g))
}

/// Hand-expanded identity residual on concrete `w, p, q`, using the
/// bracket `w (p' q - p q')` worked out from the linearization of `S`.
pub fn oracle(w: &Poly, p: &Poly, q: &Poly) -> Poly {
    let bracket = w.mul(&p.d().mul(q).sub(&p.mul(&q.d())));
    s_varied(w, &s_apply(w, p), q)
        .sub(&s_varied(w, &s_apply(w, q), p))
        .sub(&s_apply(w, &bracket))
}

/// Evaluate a differential polynomial in `w, p, q` on concrete functions.
pub fn evaluate(e: &DiffPoly, w: &Poly, p: &Poly, q: &Poly) -> Poly {
    let mut total = Poly(vec![]);
    for (t, c) in e.terms() {
        assert!(t.base.is_empty());
        let mut acc = Poly::constant(c.clone());
        for (v, k) in &t.factors {
            let f = match v.bundle().symbol() {
                "w" => w,
                "p" => p,
                "q" => q,
                other => panic!("unexpected bundle {other}"),
            };
            let value = f.dn(v.sigma().order());
            for _ in 0..*k {
                acc = acc.mul(&value);
            }
        }
        total = total.add(&acc);
    }
    total
}
