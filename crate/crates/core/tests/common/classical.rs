//! Random classical Lie algebroids over `R^m` with rank `d ≤ 3`.
//!
//! Positive samples are valid algebroids (tangent bundles, so(3) and sl(2)
//! actions, aff(1)) seen through a random constant change of frame and a
//! random linear change of base coordinates. Negative samples perturb a
//! positive one or draw every coefficient at random.

use jets::homological::{classical_checks, classical_coord, classical_q, verify_q2};
use jets::{int, ClassicalAlgebroidSpec, DiffPoly, Rational};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::rng;

type Matrix = Vec<Vec<Rational>>;

/// Anchors `[i][α]`, structure functions `[k][i][j]` and the base dimension.
type Algebroid = (Vec<Vec<DiffPoly>>, Vec<Vec<Vec<DiffPoly>>>, usize);

fn u(m: usize, a: usize) -> DiffPoly {
    classical_coord(m, a)
}

fn zeros(d: usize) -> Vec<Vec<Vec<DiffPoly>>> {
    vec![vec![vec![DiffPoly::zero(); d]; d]; d]
}

fn set_c(c: &mut [Vec<Vec<DiffPoly>>], k: usize, i: usize, j: usize, v: DiffPoly) {
    c[k][j][i] = -&v;
    c[k][i][j] = v;
}

fn tangent(m: usize) -> Algebroid {
    let anchors = (0..m)
        .map(|i| (0..m).map(|a| DiffPoly::int((i == a) as i64)).collect())
        .collect();
    (anchors, zeros(m), m)
}

fn so3_action() -> Algebroid {
    let m = 3;
    let anchors = vec![
        vec![DiffPoly::zero(), u(m, 2), -u(m, 1)],
        vec![-u(m, 2), DiffPoly::zero(), u(m, 0)],
        vec![u(m, 1), -u(m, 0), DiffPoly::zero()],
    ];
    let mut c = zeros(3);
    set_c(&mut c, 2, 0, 1, DiffPoly::one());
    set_c(&mut c, 0, 1, 2, DiffPoly::one());
    set_c(&mut c, 1, 2, 0, DiffPoly::one());
    (anchors, c, m)
}

/// `∂, u∂, u²∂` on the line: `[e1,e2] = e1`, `[e1,e3] = 2e2`, `[e2,e3] = e3`.
fn sl2_action() -> Algebroid {
    let m = 1;
    let x = u(m, 0);
    let anchors = vec![vec![DiffPoly::one()], vec![x.clone()], vec![&x * &x]];
    let mut c = zeros(3);
    set_c(&mut c, 0, 0, 1, DiffPoly::one());
    set_c(&mut c, 1, 0, 2, DiffPoly::int(2));
    set_c(&mut c, 2, 1, 2, DiffPoly::one());
    (anchors, c, m)
}

/// `∂` and `u∂`: `[e1,e2] = e1`.
fn aff1() -> Algebroid {
    let m = 1;
    let anchors = vec![vec![DiffPoly::one()], vec![u(m, 0)]];
    let mut c = zeros(2);
    set_c(&mut c, 0, 0, 1, DiffPoly::one());
    (anchors, c, m)
}

/// Gauss–Jordan inverse over the rationals.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m.clone();
    let mut inv: Matrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = &a[r][j] - &f * &a[col][j];
                    inv[r][j] = &inv[r][j] - &f * &inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

fn random_invertible(r: &mut ChaCha8Rng, n: usize) -> (Matrix, Matrix) {
    loop {
        let m: Matrix = (0..n)
            .map(|_| (0..n).map(|_| int(r.gen_range(-2..=2))).collect())
            .collect();
        if let Some(inv) = invert(&m) {
            return (m, inv);
        }
    }
}

/// Rewrite a polynomial in `u` under the substitution `u = T u'`.
fn pull_back(p: &DiffPoly, t: &Matrix, m: usize) -> DiffPoly {
    p.substitute_with(|v| {
        let beta = v.component();
        Some((0..m).map(|g| u(m, g).scale(&t[beta][g])).sum())
    })
}

/// Frame change `e'_i = Σ_j F_ij e_j` and coordinate change `u' = N u`.
fn transform(
    anchors: &[Vec<DiffPoly>],
    c: &[Vec<Vec<DiffPoly>>],
    m: usize,
    f: &Matrix,
    finv: &Matrix,
    n: &Matrix,
    ninv: &Matrix,
) -> (Vec<Vec<DiffPoly>>, Vec<Vec<Vec<DiffPoly>>>) {
    let d = anchors.len();
    let a_new: Vec<Vec<DiffPoly>> = (0..d)
        .map(|i| {
            (0..m)
                .map(|alpha| {
                    let mut acc = DiffPoly::zero();
                    for j in 0..d {
                        for beta in 0..m {
                            let coeff = &f[i][j] * &n[alpha][beta];
                            acc = acc + pull_back(&anchors[j][beta], ninv, m).scale(&coeff);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let mut c_new = zeros(d);
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut acc = DiffPoly::zero();
                for a in 0..d {
                    for b in 0..d {
                        for l in 0..d {
                            let coeff = &f[i][a] * &f[j][b] * &finv[l][k];
                            if !coeff.is_zero() {
                                acc = acc + pull_back(&c[l][a][b], ninv, m).scale(&coeff);
                            }
                        }
                    }
                }
                c_new[k][i][j] = acc;
            }
        }
    }
    (a_new, c_new)
}

fn random_small_poly(r: &mut ChaCha8Rng, m: usize, max_degree: usize) -> DiffPoly {
    let mut p = DiffPoly::zero();
    for _ in 0..r.gen_range(0..=2) {
        let mut t = DiffPoly::int(r.gen_range(-2..=2));
        if m > 0 {
            for _ in 0..r.gen_range(0..=max_degree) {
                t = &t * &u(m, r.gen_range(0..m));
            }
        }
        p = p + t;
    }
    p
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Valid,
    Perturbed,
    Random,
}

pub fn random_spec(r: &mut ChaCha8Rng) -> (ClassicalAlgebroidSpec, Origin) {
    let origin = match r.gen_range(0..10) {
        0..=3 => Origin::Valid,
        4..=6 => Origin::Perturbed,
        _ => Origin::Random,
    };
    let (anchors, c, m) = if origin == Origin::Random {
        let m = r.gen_range(0..=3);
        let d = r.gen_range(1..=3);
        let anchors = (0..d)
            .map(|_| (0..m).map(|_| random_small_poly(r, m, 2)).collect())
            .collect();
        let mut c = zeros(d);
        for k in 0..d {
            for i in 0..d {
                for j in i + 1..d {
                    set_c(&mut c, k, i, j, random_small_poly(r, m, 1));
                }
            }
        }
        (anchors, c, m)
    } else {
        let (anchors, c, m) = match r.gen_range(0..5) {
            0 => tangent(r.gen_range(1..=3)),
            1 => so3_action(),
            2 => sl2_action(),
            3 => aff1(),
            _ => {
                let (_, c, _) = so3_action();
                (vec![vec![]; 3], c, 0)
            }
        };
        let d = anchors.len();
        let (f, finv) = random_invertible(r, d);
        let (n, ninv) = random_invertible(r, m);
        let (mut anchors, mut c) = transform(&anchors, &c, m, &f, &finv, &n, &ninv);
        if origin == Origin::Perturbed {
            let junk = loop {
                let p = random_small_poly(r, m, 1);
                if !p.is_zero() {
                    break p;
                }
            };
            if m > 0 && r.gen_bool(0.5) {
                let (i, a) = (r.gen_range(0..d), r.gen_range(0..m));
                anchors[i][a] = &anchors[i][a] + &junk;
            } else if d >= 2 {
                let k = r.gen_range(0..d);
                let i = r.gen_range(0..d - 1);
                let j = r.gen_range(i + 1..d);
                let v = &c[k][i][j] + &junk;
                set_c(&mut c, k, i, j, v);
            }
        }
        (anchors, c, m)
    };
    (ClassicalAlgebroidSpec::new("random", anchors, c, m).expect("antisymmetric by construction"), origin)
}

#[derive(Debug, Default)]
pub struct Tally {
    pub cases: usize,
    pub mismatches: usize,
    pub passing: usize,
    pub failing: usize,
    pub valid_failing: usize,
}

/// Compare the two verdicts on `cases` random specs.
pub fn equivalence(seed: u64, cases: usize) -> Tally {
    let mut r = rng(seed);
    let mut t = Tally::default();
    for _ in 0..cases {
        let (spec, origin) = random_spec(&mut r);
        let direct = classical_checks(&spec).passed();
        let via_q = verify_q2(&classical_q(&spec).unwrap()).unwrap().passed();
        t.cases += 1;
        if direct != via_q {
            t.mismatches += 1;
        }
        if via_q {
            t.passing += 1;
        } else {
            t.failing += 1;
            if origin == Origin::Valid {
                t.valid_failing += 1;
            }
        }
    }
    t
}
