//! Randomized algebraic invariants. Each suite runs `cases` seeded trials
//! and returns the number of failures.

use jets::calculus::total_derivative;
use jets::jetcore::coords;
use jets::{euler, Bundle, DiffPoly, EvolField, Parity};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{random_matrix_op, random_poly, rng};

const N_BASE: usize = 2;

struct World {
    u: Bundle,
    v: Bundle,
    b: Bundle,
    c: Bundle,
}

impl World {
    fn new() -> Self {
        World {
            u: Bundle::over("u", 2, Parity::Even, N_BASE),
            v: Bundle::new("v", 1, Parity::Even, vec![0]),
            b: Bundle::over("b", 1, Parity::Odd, N_BASE),
            c: Bundle::new("c", 2, Parity::Odd, vec![1]),
        }
    }

    fn all(&self) -> Vec<Bundle> {
        vec![self.u.clone(), self.v.clone(), self.b.clone(), self.c.clone()]
    }

    fn evens(&self) -> Vec<Bundle> {
        vec![self.u.clone(), self.v.clone()]
    }
}

fn parity(r: &mut ChaCha8Rng) -> Parity {
    if r.gen_bool(0.5) {
        Parity::Odd
    } else {
        Parity::Even
    }
}

fn poly(r: &mut ChaCha8Rng, w: &World) -> DiffPoly {
    let p = parity(r);
    random_poly(r, &w.all(), N_BASE, p, 2)
}

pub fn supercommutativity(seed: u64, cases: usize) -> usize {
    let w = World::new();
    let mut r = rng(seed);
    let mut failures = 0;
    for _ in 0..cases {
        let (pa, pb) = (parity(&mut r), parity(&mut r));
        let a = random_poly(&mut r, &w.all(), N_BASE, pa, 2);
        let b = random_poly(&mut r, &w.all(), N_BASE, pb, 2);
        let ab = &a * &b;
        let ba = &b * &a;
        let expected = if pa.koszul(pb) { -ba } else { ba };
        let c = poly(&mut r, &w);
        let assoc = (&ab * &c) == (&a * &(&b * &c));
        if ab != expected || !assoc {
            failures += 1;
        }
    }
    failures
}

pub fn derivatives_commute(seed: u64, cases: usize) -> usize {
    let w = World::new();
    let mut r = rng(seed);
    (0..cases)
        .filter(|_| {
            let p = poly(&mut r, &w);
            total_derivative(&total_derivative(&p, 0), 1) != total_derivative(&total_derivative(&p, 1), 0)
        })
        .count()
}

fn random_field(r: &mut ChaCha8Rng, w: &World) -> EvolField {
    let fp = parity(r);
    let mut vel = Vec::new();
    for b in w.all() {
        if r.gen_bool(0.3) {
            continue;
        }
        let vp = fp + b.parity();
        let comps = (0..b.dim())
            .map(|_| within(&random_poly(r, &w.all(), N_BASE, vp, 1), &b))
            .collect();
        vel.push((b, comps));
    }
    EvolField::new(fp, vel).expect("velocities have the right parity")
}

/// Drop the terms a velocity for `b` may not contain: those involving base
/// variables `b` does not depend on.
fn within(p: &DiffPoly, b: &Bundle) -> DiffPoly {
    p.filter_terms(|t| {
        t.base.iter().all(|(i, _)| b.depends_on_base(i))
            && t.factors
                .iter()
                .all(|(v, _)| v.bundle().depends_on().iter().all(|i| b.depends_on_base(*i)))
    })
}

pub fn fields_commute_with_derivatives(seed: u64, cases: usize) -> usize {
    let w = World::new();
    let mut r = rng(seed);
    let mut failures = 0;
    for _ in 0..cases {
        let f = random_field(&mut r, &w);
        let p = poly(&mut r, &w);
        let i = r.gen_range(0..N_BASE);
        let lhs = f.apply(&total_derivative(&p, i)).unwrap();
        let rhs = total_derivative(&f.apply(&p).unwrap(), i);
        if lhs != rhs {
            failures += 1;
        }
    }
    failures
}

fn shapes() -> (Bundle, Bundle, Bundle) {
    (
        Bundle::over("e", 2, Parity::Even, N_BASE),
        Bundle::over("f", 1, Parity::Even, N_BASE),
        Bundle::over("g", 2, Parity::Even, N_BASE),
    )
}

pub fn adjoint_is_involutive(seed: u64, cases: usize) -> usize {
    let w = World::new();
    let (e, f, _) = shapes();
    let mut r = rng(seed);
    (0..cases)
        .filter(|_| {
            let a = random_matrix_op(&mut r, &e, &f, &w.evens(), N_BASE, 2);
            a.adjoint().adjoint() != a
        })
        .count()
}

pub fn adjoint_reverses_composition(seed: u64, cases: usize) -> usize {
    let w = World::new();
    let (e, f, g) = shapes();
    let mut r = rng(seed);
    (0..cases)
        .filter(|_| {
            let a = random_matrix_op(&mut r, &e, &f, &w.evens(), N_BASE, 2);
            let b = random_matrix_op(&mut r, &g, &e, &w.evens(), N_BASE, 1);
            let lhs = a.compose(&b).unwrap().adjoint();
            let rhs = b.adjoint().compose(&a.adjoint()).unwrap();
            lhs != rhs
        })
        .count()
}

pub fn euler_kills_divergences(seed: u64, cases: usize) -> usize {
    let w = World::new();
    let mut r = rng(seed);
    (0..cases)
        .filter(|_| {
            let p = poly(&mut r, &w);
            let i = r.gen_range(0..N_BASE);
            let d = total_derivative(&p, i);
            // A D_i-divergence is variationally trivial for the bundles
            // that vary along x_i.
            w.all()
                .iter()
                .filter(|b| b.depends_on_base(i))
                .any(|b| euler(&d, b).iter().any(|x| !x.is_zero()))
        })
        .count()
}

/// `⟨q, A(p)⟩ - ⟨A†(q), p⟩` is a total divergence: its variational
/// derivatives along the bundles that vary in every direction vanish.
pub fn adjoint_defines_divergence(seed: u64, cases: usize) -> usize {
    let w = World::new();
    let (e, f, _) = shapes();
    let p = e.renamed("p", Parity::Even);
    let q = f.renamed("q", Parity::Even);
    let mut r = rng(seed);
    (0..cases)
        .filter(|_| {
            let a = random_matrix_op(&mut r, &e, &f, &w.evens(), N_BASE, 2);
            let ps = coords(&p);
            let qs = coords(&q);
            let ap = a.apply(&ps).unwrap();
            let atq = a.adjoint().apply(&qs).unwrap();
            let lhs: DiffPoly = qs.iter().zip(&ap).map(|(x, y)| x * y).sum();
            let rhs: DiffPoly = atq.iter().zip(&ps).map(|(x, y)| x * y).sum();
            let density = lhs - rhs;
            [&w.u, &p, &q]
                .iter()
                .any(|b| euler(&density, b).iter().any(|x| !x.is_zero()))
        })
        .count()
}
