//! Homological evolutionary fields: the variational `Q` of an anchor, its
//! Hamiltonian form through the bi-vector, the master equation, and the
//! classical field of a Lie algebroid over a finite-dimensional base.

use crate::algebroid::{half, minus_one, AnchorSpec, BiDiffOp};
use crate::calculus::{euler, EvolField};
use crate::error::{JetError, Result};
use crate::jetcore::{coords, rat, Bundle, DiffPoly, MultiIndex, Parity};
use crate::operators::TotalDiffOp;
use crate::report::{Value, VerificationReport};

/// Odd field `Q` on the jets of `u` (even) and `b` (odd).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QField {
    pub field: EvolField,
    pub u: Bundle,
    pub b: Bundle,
}

impl QField {
    pub fn new(u: Bundle, b: Bundle, phi_u: Vec<DiffPoly>, phi_b: Vec<DiffPoly>) -> Result<Self> {
        let field = EvolField::new(Parity::Odd, [(u.clone(), phi_u), (b.clone(), phi_b)])?;
        Ok(QField { field, u, b })
    }

    pub fn phi_u(&self) -> &[DiffPoly] {
        self.field.velocity(&self.u).unwrap_or(&[])
    }

    pub fn phi_b(&self) -> &[DiffPoly] {
        self.field.velocity(&self.b).unwrap_or(&[])
    }

    /// Velocity-by-velocity equality with another field on the same bundles.
    pub fn same_velocities(&self, other: &QField) -> bool {
        self.u == other.u
            && self.b == other.b
            && self.phi_u() == other.phi_u()
            && self.phi_b() == other.phi_b()
    }
}

/// Odd copy of the anchor's domain. A domain that is already odd is used
/// as is, so `A(b)` is literally the anchor applied to the ghost.
pub fn odd_neighbour(a: &TotalDiffOp) -> Bundle {
    let d = a.domain();
    if d.parity().is_odd() {
        return d.clone();
    }
    let taken = crate::algebroid::taken_symbols(a);
    let s = crate::algebroid::fresh_symbol("b", &taken);
    d.renamed(&s, Parity::Odd)
}

/// `{{b,b}}`: both slots receive the same odd section, keeping the order
/// coefficient, first slot, second slot.
pub fn bracket_on_ghost(bracket: &BiDiffOp, b: &Bundle) -> Result<Vec<DiffPoly>> {
    let bs = coords(b);
    bracket.apply(&bs, &bs)
}

/// `Q = ∂^{(u)}_{A(b)} - 1/2 ∂^{(b)}_{{{b,b}}}`.
pub fn build_q(spec: &AnchorSpec) -> Result<QField> {
    let bracket = spec.resolved_bracket()?;
    build_q_with(&spec.anchor, &bracket)
}

pub fn build_q_with(a: &TotalDiffOp, bracket: &BiDiffOp) -> Result<QField> {
    let b = odd_neighbour(a);
    let phi_u = a.apply(&coords(&b))?;
    let m = half().times(&minus_one());
    let phi_b = bracket_on_ghost(bracket, &b)?
        .into_iter()
        .map(|x| m.times(&x))
        .collect();
    QField::new(a.codomain().clone(), b, phi_u, phi_b)
}

/// Components `Q(φ_u)` and `Q(φ_b)` of `Q² = ½[Q,Q]`.
pub fn verify_q2(q: &QField) -> Result<VerificationReport> {
    let du = q.field.apply_all(q.phi_u())?;
    let db = q.field.apply_all(q.phi_b())?;
    Ok(VerificationReport::new("verify-q2")
        .residual("du", Value::Polys(du))
        .residual("db", Value::Polys(db))
        .output("phi_u", Value::Polys(q.phi_u().to_vec()))
        .output("phi_b", Value::Polys(q.phi_b().to_vec())))
}

/// Bi-vector density `H = ½ Σ_α A(b)^α · b^α`.
pub fn bivector(a: &TotalDiffOp) -> Result<DiffPoly> {
    if !a.is_square() {
        return Err(JetError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let b = odd_neighbour(a);
    let bs = coords(&b);
    let ab = a.apply(&bs)?;
    let sum: DiffPoly = ab.iter().zip(&bs).map(|(x, y)| x.times(y)).sum();
    Ok(sum.scale(&rat(1, 2)))
}

/// `Q = ∂^{(u)}_{δH/δb} + ∂^{(b)}_{-δH/δu}`.
pub fn hamiltonian_q(h: &DiffPoly, u: &Bundle, b: &Bundle) -> Result<QField> {
    let phi_u = euler(h, b);
    let phi_b = euler(h, u).into_iter().map(|x| -x).collect();
    QField::new(u.clone(), b.clone(), phi_u, phi_b)
}

/// Master equation as a total-divergence test: with
/// `E = Σ_α δL/δb^α · δL/δu^α`, require `δE/δu = 0` and `δE/δb = 0`.
pub fn check_master_equation(l: &DiffPoly, u: &Bundle, b: &Bundle) -> Result<VerificationReport> {
    let lb = euler(l, b);
    let lu = euler(l, u);
    if lb.len() != lu.len() {
        return Err(JetError::ArityMismatch {
            expected: lu.len(),
            found: lb.len(),
        });
    }
    let e: DiffPoly = lb.iter().zip(&lu).map(|(x, y)| x.times(y)).sum();
    Ok(VerificationReport::new("master")
        .residual("euler_u", Value::Polys(euler(&e, u)))
        .residual("euler_b", Value::Polys(euler(&e, b)))
        .output("density", Value::poly(e)))
}

/// Lie algebroid over an `m`-dimensional base with a rank-`d` local basis:
/// anchor components `A_i^α(u)` and structure functions `c^k_ij(u)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalAlgebroidSpec {
    pub name: String,
    pub m: usize,
    pub d: usize,
    /// `anchors[i][α]`.
    pub anchors: Vec<Vec<DiffPoly>>,
    /// `constants[k][i][j]`.
    pub constants: Vec<Vec<Vec<DiffPoly>>>,
    u: Bundle,
    b: Bundle,
}

impl ClassicalAlgebroidSpec {
    /// The base coordinates and fibre generators are `u` and `b`; there are
    /// no base variables, so no jets arise.
    pub fn coordinates(m: usize, d: usize) -> (Bundle, Bundle) {
        (
            Bundle::new("u", m, Parity::Even, vec![]),
            Bundle::new("b", d, Parity::Odd, vec![]),
        )
    }

    pub fn new(
        name: impl Into<String>,
        anchors: Vec<Vec<DiffPoly>>,
        constants: Vec<Vec<Vec<DiffPoly>>>,
        m: usize,
    ) -> Result<Self> {
        let d = anchors.len();
        for row in &anchors {
            if row.len() != m {
                return Err(JetError::ArityMismatch {
                    expected: m,
                    found: row.len(),
                });
            }
        }
        if constants.len() != d {
            return Err(JetError::ArityMismatch {
                expected: d,
                found: constants.len(),
            });
        }
        #[allow(clippy::needless_range_loop)]
        for (k, ck) in constants.iter().enumerate() {
            if ck.len() != d || ck.iter().any(|r| r.len() != d) {
                return Err(JetError::ArityMismatch {
                    expected: d,
                    found: ck.len(),
                });
            }
            for i in 0..d {
                for j in i..d {
                    if ck[i][j] != -&ck[j][i] {
                        return Err(JetError::NotAntisymmetric { k, i, j });
                    }
                }
            }
        }
        let (u, b) = Self::coordinates(m, d);
        Ok(ClassicalAlgebroidSpec {
            name: name.into(),
            m,
            d,
            anchors,
            constants,
            u,
            b,
        })
    }

    pub fn u(&self) -> &Bundle {
        &self.u
    }

    pub fn b(&self) -> &Bundle {
        &self.b
    }

    fn du(&self, alpha: usize, f: &DiffPoly) -> DiffPoly {
        f.partial(&self.u.coord(alpha))
    }

    /// `Σ_α A_n^α ∂_α f`, the anchor image of the `n`-th generator acting on `f`.
    fn rho(&self, n: usize, f: &DiffPoly) -> DiffPoly {
        (0..self.m)
            .map(|a| self.anchors[n][a].times(&self.du(a, f)))
            .sum()
    }
}

/// `φ_{u^α} = Σ_i A_i^α b^i`, `φ_{b^k} = -½ Σ_{ij} b^i c^k_ij b^j`.
pub fn classical_q(spec: &ClassicalAlgebroidSpec) -> Result<QField> {
    let bs = coords(spec.b());
    let phi_u = (0..spec.m)
        .map(|a| (0..spec.d).map(|i| spec.anchors[i][a].times(&bs[i])).sum())
        .collect();
    let phi_b = (0..spec.d)
        .map(|k| {
            let mut acc = DiffPoly::zero();
            for i in 0..spec.d {
                for j in 0..spec.d {
                    acc = acc + bs[i].times(&spec.constants[k][i][j]).times(&bs[j]);
                }
            }
            acc.scale(&rat(-1, 2))
        })
        .collect();
    QField::new(spec.u().clone(), spec.b().clone(), phi_u, phi_b)
}

/// Residuals of the anchor-morphism identity (one tuple per `i < j`,
/// indexed by `β`) and of the cyclic coefficient identity (one tuple per
/// `i < j < n`, indexed by `q`).
pub fn classical_checks(spec: &ClassicalAlgebroidSpec) -> VerificationReport {
    let (m, d) = (spec.m, spec.d);
    let mut morphism = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for beta in 0..m {
                let lhs = spec.rho(i, &spec.anchors[j][beta]) - spec.rho(j, &spec.anchors[i][beta]);
                let rhs: DiffPoly = (0..d)
                    .map(|k| spec.constants[k][i][j].times(&spec.anchors[k][beta]))
                    .sum();
                morphism.push(lhs - rhs);
            }
        }
    }
    let term = |i: usize, j: usize, n: usize, q: usize| -> DiffPoly {
        let quad: DiffPoly = (0..d)
            .map(|l| spec.constants[l][i][j].times(&spec.constants[q][l][n]))
            .sum();
        quad - spec.rho(n, &spec.constants[q][i][j])
    };
    let mut jacobi = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            for n in j + 1..d {
                for q in 0..d {
                    jacobi.push(term(i, j, n, q) + term(j, n, i, q) + term(n, i, j, q));
                }
            }
        }
    }
    VerificationReport::new("classical")
        .residual("anchor_morphism", Value::Polys(morphism))
        .residual("jacobi", Value::Polys(jacobi))
}

/// `u^α` as a polynomial, for assembling classical specs.
pub fn classical_coord(m: usize, alpha: usize) -> DiffPoly {
    let (u, _) = ClassicalAlgebroidSpec::coordinates(m, 0);
    DiffPoly::var(u.jet(alpha, MultiIndex::empty()).expect("no base dependence needed"))
}
