//! Seeded random generators shared by the integration tests.
#![allow(dead_code)]

pub mod classical;
pub mod invariants;
pub mod oracle;

use jets::jetcore::{coords, Factor};
use jets::{int, Bundle, DiffPoly, MultiIndex, Parity, ScalarOp, TotalDiffOp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn jet(b: &Bundle, c: usize, counts: &[u32]) -> DiffPoly {
    DiffPoly::var(b.jet(c, MultiIndex::from_counts(counts.to_vec())).expect("dependent direction"))
}

pub fn jx(b: &Bundle, k: u32) -> DiffPoly {
    jet(b, 0, &[k])
}

pub fn dx(k: u32) -> ScalarOp {
    ScalarOp::derivative(MultiIndex::from_counts(vec![k]))
}

/// Random multi-index of order at most `max` along the bundle's directions.
pub fn random_sigma(r: &mut ChaCha8Rng, b: &Bundle, n_base: usize, max: u32) -> MultiIndex {
    let mut counts = vec![0u32; n_base];
    let order = r.gen_range(0..=max);
    let dirs = b.depends_on();
    if dirs.is_empty() {
        return MultiIndex::empty();
    }
    for _ in 0..order {
        counts[dirs[r.gen_range(0..dirs.len())]] += 1;
    }
    MultiIndex::from_counts(counts)
}

/// Random monomial factor list drawn from `bundles`, with exactly
/// `odd` odd factors (if any odd bundle is available).
pub fn random_factors(
    r: &mut ChaCha8Rng,
    bundles: &[Bundle],
    n_base: usize,
    even_count: usize,
    odd: usize,
    max_order: u32,
) -> Vec<Factor> {
    let evens: Vec<&Bundle> = bundles.iter().filter(|b| !b.parity().is_odd()).collect();
    let odds: Vec<&Bundle> = bundles.iter().filter(|b| b.parity().is_odd()).collect();
    let mut out = Vec::new();
    for _ in 0..even_count {
        if evens.is_empty() {
            break;
        }
        let b = evens[r.gen_range(0..evens.len())];
        let s = random_sigma(r, b, n_base, max_order);
        out.push((b.jet(r.gen_range(0..b.dim()), s).unwrap(), 1));
    }
    for _ in 0..odd {
        if odds.is_empty() {
            break;
        }
        let b = odds[r.gen_range(0..odds.len())];
        let s = random_sigma(r, b, n_base, max_order);
        out.push((b.jet(r.gen_range(0..b.dim()), s).unwrap(), 1));
    }
    out
}

/// Random homogeneous polynomial of the given parity.
pub fn random_poly(r: &mut ChaCha8Rng, bundles: &[Bundle], n_base: usize, parity: Parity, max_order: u32) -> DiffPoly {
    let mut p = DiffPoly::zero();
    let n_terms = r.gen_range(1..=3);
    for _ in 0..n_terms {
        let odd = 2 * r.gen_range(0..=1) + usize::from(parity.is_odd());
        let evens = r.gen_range(0..=2);
        let f = random_factors(r, bundles, n_base, evens, odd, max_order);
        let c = int(r.gen_range(-3..=3));
        let base_pow = if n_base > 0 && r.gen_bool(0.2) {
            MultiIndex::unit(r.gen_range(0..n_base))
        } else {
            MultiIndex::empty()
        };
        p.add_raw(c, base_pow, f);
    }
    p
}

/// Random scalar operator with even coefficients in `bundles`.
pub fn random_scalar_op(r: &mut ChaCha8Rng, bundles: &[Bundle], n_base: usize, max_order: u32) -> ScalarOp {
    let mut op = ScalarOp::zero();
    for _ in 0..r.gen_range(1..=3) {
        let mut counts = vec![0u32; n_base];
        for _ in 0..r.gen_range(0..=max_order) {
            counts[r.gen_range(0..n_base)] += 1;
        }
        let evens: Vec<Bundle> = bundles.iter().filter(|b| !b.parity().is_odd()).cloned().collect();
        let c = random_poly(r, &evens, n_base, Parity::Even, 1);
        op.add_term(MultiIndex::from_counts(counts), c);
    }
    op
}

pub fn random_matrix_op(
    r: &mut ChaCha8Rng,
    domain: &Bundle,
    codomain: &Bundle,
    coeff_bundles: &[Bundle],
    n_base: usize,
    max_order: u32,
) -> TotalDiffOp {
    let entries = (0..codomain.dim())
        .map(|_| {
            (0..domain.dim())
                .map(|_| random_scalar_op(r, coeff_bundles, n_base, max_order))
                .collect()
        })
        .collect();
    TotalDiffOp::new(domain.clone(), codomain.clone(), entries).unwrap()
}

pub fn section(b: &Bundle) -> Vec<DiffPoly> {
    coords(b)
}

/// KdV-type Hamiltonian family `c1 D + c3 D^3 + c2 (2 w D + w_x)`: any
/// combination of these mutually compatible structures is Hamiltonian.
pub fn kdv_family(w: &Bundle, b: &Bundle, c1: i64, c2: i64, c3: i64) -> TotalDiffOp {
    let op = dx(1)
        .left_mul(&DiffPoly::int(c1))
        .add(&dx(3).left_mul(&DiffPoly::int(c3)))
        .add(&dx(1).left_mul(&jx(w, 0).scale(&int(2 * c2))))
        .add(&ScalarOp::mult(jx(w, 1).scale(&int(c2))));
    TotalDiffOp::scalar(b.clone(), w.clone(), op).unwrap()
}

pub fn kdv_a2(w: &Bundle, b: &Bundle) -> TotalDiffOp {
    let op = dx(3)
        .left_mul(&DiffPoly::constant(jets::rat(-1, 2)))
        .add(&dx(1).left_mul(&jx(w, 0).scale(&int(2))))
        .add(&ScalarOp::mult(jx(w, 1)));
    TotalDiffOp::scalar(b.clone(), w.clone(), op).unwrap()
}

pub fn kdv_bundles() -> (Bundle, Bundle) {
    (
        Bundle::over("w", 1, Parity::Even, 1),
        Bundle::over("b", 1, Parity::Odd, 1),
    )
}
