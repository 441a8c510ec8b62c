//! Matrix operators in total derivatives with differential-polynomial
//! coefficients, kept in the normal form `Σ a_σ D_σ` (coefficients left).

use std::collections::BTreeMap;

use crate::calculus::{total_derivative_multi, EvolField};
use crate::error::{JetError, Result};
use crate::jetcore::{coords, int, Bundle, DiffPoly, MultiIndex};
use crate::report::{Value, VerificationReport};

/// Scalar operator `Σ_σ a_σ D_σ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ScalarOp {
    terms: BTreeMap<MultiIndex, DiffPoly>,
}

impl ScalarOp {
    pub fn zero() -> Self {
        ScalarOp::default()
    }

    pub fn identity() -> Self {
        ScalarOp::mult(DiffPoly::one())
    }

    /// Multiplication by `a`.
    pub fn mult(a: DiffPoly) -> Self {
        let mut op = ScalarOp::zero();
        op.add_term(MultiIndex::empty(), a);
        op
    }

    /// `D_σ`.
    pub fn derivative(sigma: MultiIndex) -> Self {
        let mut op = ScalarOp::zero();
        op.add_term(sigma, DiffPoly::one());
        op
    }

    pub fn add_term(&mut self, sigma: MultiIndex, a: DiffPoly) {
        if a.is_zero() {
            return;
        }
        let slot = self.terms.entry(sigma.clone()).or_default();
        *slot = std::mem::take(slot) + a;
        if slot.is_zero() {
            self.terms.remove(&sigma);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &DiffPoly)> {
        self.terms.iter()
    }

    /// Coefficient of `D_σ` (zero if absent).
    pub fn coeff(&self, sigma: &MultiIndex) -> DiffPoly {
        self.terms.get(sigma).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest `|σ|` with a nonzero coefficient; 0 for the zero operator.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Highest jet order among the coefficients.
    pub fn coeff_order(&self) -> u32 {
        self.terms.values().map(DiffPoly::max_order).max().unwrap_or(0)
    }

    pub fn add(&self, other: &ScalarOp) -> ScalarOp {
        let mut out = self.clone();
        for (s, a) in &other.terms {
            out.add_term(s.clone(), a.clone());
        }
        out
    }

    pub fn neg(&self) -> ScalarOp {
        self.map_coeffs(|a| -a)
    }

    pub fn sub(&self, other: &ScalarOp) -> ScalarOp {
        self.add(&other.neg())
    }

    /// `a ∘ self`, i.e. every coefficient multiplied on the left by `a`.
    pub fn left_mul(&self, a: &DiffPoly) -> ScalarOp {
        self.map_coeffs(|c| a.times(c))
    }

    pub fn map_coeffs<F: Fn(&DiffPoly) -> DiffPoly>(&self, f: F) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (s, a) in &self.terms {
            out.add_term(s.clone(), f(a));
        }
        out
    }

    pub fn apply(&self, s: &DiffPoly) -> DiffPoly {
        self.terms
            .iter()
            .map(|(sigma, a)| a.times(&total_derivative_multi(s, sigma)))
            .sum()
    }

    /// Normal form of `self ∘ other`, commuting each `D_σ` past the
    /// coefficients of `other` by the Leibniz rule.
    pub fn compose(&self, other: &ScalarOp) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (sigma, a) in &self.terms {
            for (tau, b) in &other.terms {
                for (rho, weight) in sigma.sub_indices() {
                    let db = total_derivative_multi(b, &rho);
                    if db.is_zero() {
                        continue;
                    }
                    let rest = sigma.minus(&rho).expect("rho <= sigma").plus(tau);
                    let coeff = a.times(&db).scale(&int(weight as i64));
                    out.add_term(rest, coeff);
                }
            }
        }
        out
    }

    /// Formal adjoint `(Σ a_σ D_σ)† = Σ (-D)_σ ∘ a_σ` under the coupling
    /// fixed by the volume form. No boundary terms.
    pub fn adjoint(&self) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (sigma, a) in &self.terms {
            let negate = sigma.order() % 2 == 1;
            for (rho, weight) in sigma.sub_indices() {
                let da = total_derivative_multi(a, &rho);
                if da.is_zero() {
                    continue;
                }
                let w = if negate {
                    -(weight as i64)
                } else {
                    weight as i64
                };
                out.add_term(sigma.minus(&rho).expect("rho <= sigma"), da.scale(&int(w)));
            }
        }
        out
    }

    /// Apply an evolutionary field to every coefficient: `∂_φ(A)`.
    pub fn ev_coeffs(&self, field: &EvolField) -> Result<ScalarOp> {
        let mut out = ScalarOp::zero();
        for (s, a) in &self.terms {
            out.add_term(s.clone(), field.apply(a)?);
        }
        Ok(out)
    }
}

/// Matrix operator from sections of `domain` to sections of `codomain`;
/// `entries` has `codomain.dim()` rows and `domain.dim()` columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalDiffOp {
    domain: Bundle,
    codomain: Bundle,
    entries: Vec<Vec<ScalarOp>>,
}

impl TotalDiffOp {
    pub fn new(domain: Bundle, codomain: Bundle, entries: Vec<Vec<ScalarOp>>) -> Result<Self> {
        if entries.len() != codomain.dim() {
            return Err(JetError::ArityMismatch {
                expected: codomain.dim(),
                found: entries.len(),
            });
        }
        if let Some(row) = entries.iter().find(|r| r.len() != domain.dim()) {
            return Err(JetError::ArityMismatch {
                expected: domain.dim(),
                found: row.len(),
            });
        }
        Ok(TotalDiffOp {
            domain,
            codomain,
            entries,
        })
    }

    /// One-by-one operator.
    pub fn scalar(domain: Bundle, codomain: Bundle, op: ScalarOp) -> Result<Self> {
        TotalDiffOp::new(domain, codomain, vec![vec![op]])
    }

    pub fn zero(domain: Bundle, codomain: Bundle) -> Self {
        let entries = vec![vec![ScalarOp::zero(); domain.dim()]; codomain.dim()];
        TotalDiffOp {
            domain,
            codomain,
            entries,
        }
    }

    pub fn identity(bundle: Bundle) -> Self {
        let n = bundle.dim();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { ScalarOp::identity() } else { ScalarOp::zero() })
                    .collect()
            })
            .collect();
        TotalDiffOp {
            domain: bundle.clone(),
            codomain: bundle,
            entries,
        }
    }

    pub fn domain(&self) -> &Bundle {
        &self.domain
    }

    pub fn codomain(&self) -> &Bundle {
        &self.codomain
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.domain.dim()
    }

    pub fn entry(&self, row: usize, col: usize) -> &ScalarOp {
        &self.entries[row][col]
    }

    pub fn entries(&self) -> &[Vec<ScalarOp>] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(ScalarOp::is_zero)
    }

    pub fn order(&self) -> u32 {
        self.entries.iter().flatten().map(ScalarOp::order).max().unwrap_or(0)
    }

    pub fn coeff_order(&self) -> u32 {
        self.entries
            .iter()
            .flatten()
            .map(ScalarOp::coeff_order)
            .max()
            .unwrap_or(0)
    }

    /// Same entries, new bundle labels of matching dimensions.
    pub fn relabel(&self, domain: Bundle, codomain: Bundle) -> Result<Self> {
        TotalDiffOp::new(domain, codomain, self.entries.clone())
    }

    pub fn apply(&self, s: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
        if s.len() != self.cols() {
            return Err(JetError::ArityMismatch {
                expected: self.cols(),
                found: s.len(),
            });
        }
        Ok(self
            .entries
            .iter()
            .map(|row| row.iter().zip(s).map(|(op, x)| op.apply(x)).sum())
            .collect())
    }

    /// `self ∘ other`; requires `other.codomain == self.domain`.
    pub fn compose(&self, other: &TotalDiffOp) -> Result<TotalDiffOp> {
        if other.codomain != self.domain {
            return Err(JetError::BundleMismatch {
                expected: self.domain.symbol().to_string(),
                found: other.codomain.symbol().to_string(),
            });
        }
        let mid = self.cols();
        let entries = (0..self.rows())
            .map(|i| {
                (0..other.cols())
                    .map(|k| {
                        (0..mid).fold(ScalarOp::zero(), |acc, j| {
                            acc.add(&self.entries[i][j].compose(&other.entries[j][k]))
                        })
                    })
                    .collect()
            })
            .collect();
        TotalDiffOp::new(other.domain.clone(), self.codomain.clone(), entries)
    }

    /// Formal adjoint: transposed matrix of entrywise adjoints, with domain
    /// and codomain exchanged.
    pub fn adjoint(&self) -> TotalDiffOp {
        let entries = (0..self.cols())
            .map(|j| (0..self.rows()).map(|i| self.entries[i][j].adjoint()).collect())
            .collect();
        TotalDiffOp {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            entries,
        }
    }

    /// Entrywise sum; labels are taken from `self`, only shapes must agree.
    pub fn add(&self, other: &TotalDiffOp) -> Result<TotalDiffOp> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(JetError::ArityMismatch {
                expected: self.rows() * self.cols(),
                found: other.rows() * other.cols(),
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.add(b)).collect())
            .collect();
        TotalDiffOp::new(self.domain.clone(), self.codomain.clone(), entries)
    }

    pub fn neg(&self) -> TotalDiffOp {
        self.map_entries(ScalarOp::neg)
    }

    pub fn sub(&self, other: &TotalDiffOp) -> Result<TotalDiffOp> {
        self.add(&other.neg())
    }

    fn map_entries<F: Fn(&ScalarOp) -> ScalarOp>(&self, f: F) -> TotalDiffOp {
        TotalDiffOp {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(&f).collect())
                .collect(),
        }
    }

    /// `∂_φ(A)`: the field applied to every coefficient.
    pub fn ev_coeffs(&self, field: &EvolField) -> Result<TotalDiffOp> {
        let mut entries = Vec::with_capacity(self.rows());
        for row in &self.entries {
            entries.push(row.iter().map(|op| op.ev_coeffs(field)).collect::<Result<Vec<_>>>()?);
        }
        TotalDiffOp::new(self.domain.clone(), self.codomain.clone(), entries)
    }

    /// `ℓ_{A,p}` with `p` the coordinates of the formal bundle `p`.
    pub fn coeff_linearization(&self, p: &Bundle) -> Result<TotalDiffOp> {
        self.coeff_linearization_at(&coords(p))
    }

    /// Operator `φ ↦ (∂_φ(A))(arg)` in `φ`, a section of the codomain whose
    /// jets the coefficients depend on:
    /// entry `(i, α) = Σ_{j,σ,τ} D_σ(arg_j) · ∂a^{ij}_σ/∂u^α_τ · D_τ`.
    pub fn coeff_linearization_at(&self, arg: &[DiffPoly]) -> Result<TotalDiffOp> {
        if arg.len() != self.cols() {
            return Err(JetError::ArityMismatch {
                expected: self.cols(),
                found: arg.len(),
            });
        }
        let u = &self.codomain;
        let mut entries = vec![vec![ScalarOp::zero(); u.dim()]; self.rows()];
        for (i, row) in self.entries.iter().enumerate() {
            for (j, op) in row.iter().enumerate() {
                for (sigma, a) in op.terms() {
                    let d_arg = total_derivative_multi(&arg[j], sigma);
                    if d_arg.is_zero() {
                        continue;
                    }
                    for v in a.jet_vars() {
                        if v.bundle() != u {
                            continue;
                        }
                        let c = a.partial_left(&v).times(&d_arg);
                        entries[i][v.component()].add_term(v.sigma().clone(), c);
                    }
                }
            }
        }
        TotalDiffOp::new(u.clone(), u.clone(), entries)
    }

    /// `A† + A`, defined for square operators.
    pub fn skew_adjoint_residual(&self) -> Result<TotalDiffOp> {
        if !self.is_square() {
            return Err(JetError::NotSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        self.add(&self.adjoint())
    }

    /// Report with the single residual `A† + A`.
    pub fn is_skew_adjoint(&self) -> Result<VerificationReport> {
        Ok(VerificationReport::new("skew-adjoint")
            .residual("skew_adjoint", Value::Op(self.skew_adjoint_residual()?)))
    }
}

pub fn op_apply(a: &TotalDiffOp, s: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
    a.apply(s)
}

pub fn op_compose(a: &TotalDiffOp, b: &TotalDiffOp) -> Result<TotalDiffOp> {
    a.compose(b)
}

pub fn op_adjoint(a: &TotalDiffOp) -> TotalDiffOp {
    a.adjoint()
}

pub fn op_coeff_linearization(a: &TotalDiffOp, p: &Bundle) -> Result<TotalDiffOp> {
    a.coeff_linearization(p)
}

pub fn is_skew_adjoint(a: &TotalDiffOp) -> Result<VerificationReport> {
    a.is_skew_adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcore::{rat, Parity};

    fn dx(k: u32) -> ScalarOp {
        ScalarOp::derivative(MultiIndex::from_counts(vec![k]))
    }

    fn setup() -> (Bundle, Bundle, Bundle) {
        (
            Bundle::over("w", 1, Parity::Even, 1),
            Bundle::over("b", 1, Parity::Odd, 1),
            Bundle::over("p", 1, Parity::Even, 1),
        )
    }

    fn j(b: &Bundle, k: u32) -> DiffPoly {
        DiffPoly::var(b.jet(0, MultiIndex::from_counts(vec![k])).unwrap())
    }

    /// -1/2 D^3 + w D + D∘w
    fn a2_scalar(w: &Bundle) -> ScalarOp {
        let wop = ScalarOp::mult(j(w, 0));
        dx(3)
            .left_mul(&DiffPoly::constant(rat(-1, 2)))
            .add(&wop.compose(&dx(1)))
            .add(&dx(1).compose(&wop))
    }

    #[test]
    fn a2_normal_form_and_application() {
        let (w, b, _) = setup();
        let a2 = a2_scalar(&w);
        assert_eq!(a2.coeff(&MultiIndex::from_counts(vec![3])), DiffPoly::constant(rat(-1, 2)));
        assert_eq!(a2.coeff(&MultiIndex::unit(0)), j(&w, 0).scale(&int(2)));
        assert_eq!(a2.coeff(&MultiIndex::empty()), j(&w, 1));
        let applied = a2.apply(&j(&b, 0));
        let expected = j(&b, 3).scale(&rat(-1, 2)) + (j(&w, 0) * j(&b, 1)).scale(&int(2)) + j(&w, 1) * j(&b, 0);
        assert_eq!(applied, expected);
        assert!(ScalarOp::zero().apply(&j(&b, 0)).is_zero());
    }

    #[test]
    fn toda_operator_application() {
        let u = Bundle::over("u", 1, Parity::Even, 3);
        let p = Bundle::new("p", 1, Parity::Even, vec![0]);
        let ux = DiffPoly::var(u.jet(0, MultiIndex::unit(0)).unwrap());
        let half_z2 = DiffPoly::base(2).pow(2).scale(&rat(1, 2));
        let op = ScalarOp::mult(ux.clone()).add(&dx(1).left_mul(&half_z2));
        assert_eq!(op.apply(&j(&p, 0)), ux * j(&p, 0) + half_z2 * j(&p, 1));
    }

    #[test]
    fn composition_examples() {
        let (w, _, _) = setup();
        let wop = ScalarOp::mult(j(&w, 0));
        let expected = dx(1).left_mul(&j(&w, 0)).add(&ScalarOp::mult(j(&w, 1)));
        assert_eq!(dx(1).compose(&wop), expected);
        assert_eq!(dx(1).compose(&dx(1)), dx(2));
        let a = a2_scalar(&w);
        assert_eq!(a.compose(&ScalarOp::identity()), a);
    }

    #[test]
    fn adjoint_examples() {
        let (w, _, _) = setup();
        let wop = ScalarOp::mult(j(&w, 0));
        let skew_part = wop.compose(&dx(1)).add(&dx(1).compose(&wop));
        assert_eq!(skew_part.adjoint(), skew_part.neg());
        assert_eq!(dx(3).adjoint(), dx(3).neg());
        let wx = ScalarOp::mult(j(&w, 1));
        assert_eq!(wx.adjoint(), wx);
    }

    #[test]
    fn skew_adjointness() {
        let (w, _, p) = setup();
        let a2 = TotalDiffOp::scalar(p.clone(), w.clone(), a2_scalar(&w)).unwrap();
        assert!(a2.is_skew_adjoint().unwrap().passed());
        let bad = TotalDiffOp::scalar(p.clone(), w.clone(), dx(1).add(&ScalarOp::identity())).unwrap();
        let rep = bad.is_skew_adjoint().unwrap();
        assert!(!rep.passed());
        let Some(Value::Op(r)) = rep.residual_value("skew_adjoint") else { panic!() };
        assert_eq!(r.entry(0, 0), &ScalarOp::mult(DiffPoly::int(2)));
        assert!(TotalDiffOp::zero(p.clone(), w.clone()).is_skew_adjoint().unwrap().passed());
    }

    #[test]
    fn a2_coefficient_linearization() {
        let (w, _, p) = setup();
        let a2 = TotalDiffOp::scalar(p.clone(), w.clone(), a2_scalar(&w)).unwrap();
        let l = a2.coeff_linearization(&p).unwrap();
        let expected = ScalarOp::mult(j(&p, 1).scale(&int(2))).add(&dx(1).left_mul(&j(&p, 0)));
        assert_eq!(l.entry(0, 0), &expected);
        let adj = l.adjoint();
        let expected_adj = ScalarOp::mult(j(&p, 1)).add(&dx(1).left_mul(&j(&p, 0)).neg());
        assert_eq!(adj.entry(0, 0), &expected_adj);
        let q = Bundle::over("q", 1, Parity::Even, 1);
        assert_eq!(adj.apply(&[j(&q, 0)]).unwrap(), vec![j(&p, 1) * j(&q, 0) - j(&p, 0) * j(&q, 1)]);
    }

    #[test]
    fn constant_coefficients_have_zero_coeff_linearization() {
        let (w, _, p) = setup();
        let a = TotalDiffOp::scalar(p.clone(), w.clone(), dx(3)).unwrap();
        assert!(a.coeff_linearization(&p).unwrap().is_zero());
    }

    #[test]
    fn compose_checks_bundles_and_arity() {
        let (w, _, p) = setup();
        let a = TotalDiffOp::scalar(p.clone(), w.clone(), dx(1)).unwrap();
        assert!(matches!(a.compose(&a), Err(JetError::BundleMismatch { .. })));
        assert!(matches!(a.apply(&[]), Err(JetError::ArityMismatch { .. })));
        let id = TotalDiffOp::identity(p.clone());
        assert_eq!(a.compose(&id).unwrap(), a);
    }
}
