//! Induced brackets of variational anchors and their verification.
//!
//! Formal arguments `p`, `q`, `r` are even copies of the anchor's domain that
//! keep its dependence on base variables, so an argument such as Toda's `p(x)`
//! stays inert along the other directions.

use std::collections::BTreeMap;

use crate::calculus::{EvolField, ProlongCache};
use crate::error::{JetError, Result};
use crate::jetcore::{coords, int, rat, Bundle, DiffPoly, MultiIndex, Parity};
use crate::operators::TotalDiffOp;
use crate::report::{Value, VerificationReport};

/// Key of one bi-differential term: output component `k`, first-slot
/// component `i` and multi-index `σ`, second-slot component `j` and `τ`.
type BiKey = (usize, usize, MultiIndex, usize, MultiIndex);

/// Bi-differential operation `{{p,q}}^k = Σ c · D_σ(p^i) · D_τ(q^j)`.
///
/// The coefficients depend on base variables and the jets of the anchor's
/// codomain only. Evaluation keeps the order coefficient, first slot, second
/// slot, which matters once odd arguments are substituted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiDiffOp {
    slot_dim: usize,
    out_dim: usize,
    terms: BTreeMap<BiKey, DiffPoly>,
}

impl BiDiffOp {
    pub fn zero(slot_dim: usize, out_dim: usize) -> Self {
        BiDiffOp {
            slot_dim,
            out_dim,
            terms: BTreeMap::new(),
        }
    }

    /// Read off the operation from polynomials bilinear in the jets of two
    /// even formal bundles.
    pub fn from_bilinear(values: &[DiffPoly], p: &Bundle, q: &Bundle) -> Result<Self> {
        if p.parity().is_odd() || q.parity().is_odd() || p == q {
            return Err(JetError::NotBilinear);
        }
        let mut op = BiDiffOp::zero(p.dim().max(q.dim()), values.len());
        for (k, poly) in values.iter().enumerate() {
            for (t, c) in poly.terms() {
                let mut p_jet = None;
                let mut q_jet = None;
                let mut rest = Vec::new();
                for (v, e) in &t.factors {
                    let slot = if v.bundle() == p {
                        &mut p_jet
                    } else if v.bundle() == q {
                        &mut q_jet
                    } else {
                        rest.push((v.clone(), *e));
                        continue;
                    };
                    if *e != 1 || slot.is_some() {
                        return Err(JetError::NotBilinear);
                    }
                    *slot = Some(v.clone());
                }
                let (Some(pv), Some(qv)) = (p_jet, q_jet) else {
                    return Err(JetError::NotBilinear);
                };
                let coeff = DiffPoly::normalize([(c.clone(), t.base.clone(), rest)]);
                op.add_term(
                    (k, pv.component(), pv.sigma().clone(), qv.component(), qv.sigma().clone()),
                    coeff,
                );
            }
        }
        Ok(op)
    }

    fn add_term(&mut self, key: BiKey, c: DiffPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(key.clone()).or_default();
        *slot = std::mem::take(slot) + c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn slot_dim(&self) -> usize {
        self.slot_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BiKey, &DiffPoly)> {
        self.terms.iter()
    }

    /// Highest total differential order `|σ| + |τ|`.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|(_, _, s, _, t)| s.order() + t.order())
            .max()
            .unwrap_or(0)
    }

    pub fn coeff_order(&self) -> u32 {
        self.terms.values().map(DiffPoly::max_order).max().unwrap_or(0)
    }

    /// Evaluate on two sections.
    pub fn apply(&self, p: &[DiffPoly], q: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
        for s in [p, q] {
            if s.len() != self.slot_dim {
                return Err(JetError::ArityMismatch {
                    expected: self.slot_dim,
                    found: s.len(),
                });
            }
        }
        let mut pc = ProlongCache::default();
        let mut qc = ProlongCache::default();
        let mut out = vec![DiffPoly::zero(); self.out_dim];
        for ((k, i, sigma, j, tau), c) in &self.terms {
            let dp = pc.get((0, *i), &p[*i], sigma);
            if dp.is_zero() {
                continue;
            }
            let dq = qc.get((0, *j), &q[*j], tau);
            let term = c.times(&dp).times(&dq);
            out[*k] = std::mem::take(&mut out[*k]) + term;
        }
        Ok(out)
    }

    /// `(p, q) ↦ {{q, p}}` as an operation in `(p, q)`.
    pub fn swapped(&self) -> BiDiffOp {
        let mut out = BiDiffOp::zero(self.slot_dim, self.out_dim);
        for ((k, i, s, j, t), c) in &self.terms {
            out.add_term((*k, *j, t.clone(), *i, s.clone()), c.clone());
        }
        out
    }

    pub fn add(&self, other: &BiDiffOp) -> Result<BiDiffOp> {
        if self.slot_dim != other.slot_dim || self.out_dim != other.out_dim {
            return Err(JetError::ArityMismatch {
                expected: self.out_dim,
                found: other.out_dim,
            });
        }
        let mut out = self.clone();
        for (key, c) in &other.terms {
            out.add_term(key.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> BiDiffOp {
        let mut out = BiDiffOp::zero(self.slot_dim, self.out_dim);
        for (key, c) in &self.terms {
            out.add_term(key.clone(), -c);
        }
        out
    }

    /// `{{p,q}} + {{q,p}}`; zero exactly when the operation is skew.
    pub fn skew_residual(&self) -> BiDiffOp {
        self.add(&self.swapped()).expect("same shape")
    }

    pub fn is_skew(&self) -> bool {
        self.skew_residual().is_zero()
    }

    /// Values on the coordinates of two formal bundles.
    pub fn on_bundles(&self, p: &Bundle, q: &Bundle) -> Result<Vec<DiffPoly>> {
        self.apply(&coords(p), &coords(q))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorKind {
    /// Skew-adjoint anchor; the bracket may be derived from the operator.
    Hamiltonian,
    Generic,
}

/// A variational anchor together with (optionally) a candidate bracket.
#[derive(Clone, Debug)]
pub struct AnchorSpec {
    pub name: String,
    pub anchor: TotalDiffOp,
    pub bracket: Option<BiDiffOp>,
    pub kind: AnchorKind,
}

impl AnchorSpec {
    pub fn hamiltonian(name: impl Into<String>, anchor: TotalDiffOp) -> Self {
        AnchorSpec {
            name: name.into(),
            anchor,
            bracket: None,
            kind: AnchorKind::Hamiltonian,
        }
    }

    pub fn with_bracket(name: impl Into<String>, anchor: TotalDiffOp, bracket: BiDiffOp) -> Self {
        AnchorSpec {
            name: name.into(),
            anchor,
            bracket: Some(bracket),
            kind: AnchorKind::Generic,
        }
    }

    /// Supplied bracket, or the one derived from the Hamiltonian formula.
    pub fn resolved_bracket(&self) -> Result<BiDiffOp> {
        match (&self.bracket, self.kind) {
            (Some(b), _) => Ok(b.clone()),
            (None, AnchorKind::Hamiltonian) => hamiltonian_bracket(&self.anchor),
            (None, AnchorKind::Generic) => Err(JetError::UnresolvedBracket(self.name.clone())),
        }
    }
}

/// First unused symbol among `base`, `base'`, `base''`, ...
pub fn fresh_symbol(base: &str, taken: &[String]) -> String {
    let mut s = base.to_string();
    while taken.iter().any(|t| t == &s) {
        s.push('\'');
    }
    s
}

/// Symbols of the anchor's codomain and of every bundle in its coefficients.
pub(crate) fn taken_symbols(a: &TotalDiffOp) -> Vec<String> {
    let mut taken = vec![a.codomain().symbol().to_string()];
    for op in a.entries().iter().flatten() {
        for (_, c) in op.terms() {
            for v in c.jet_vars() {
                let s = v.bundle().symbol().to_string();
                if !taken.contains(&s) {
                    taken.push(s);
                }
            }
        }
    }
    taken
}

/// Three even formal arguments shaped like the anchor's domain.
pub fn formal_args(a: &TotalDiffOp) -> [Bundle; 3] {
    let mut taken = taken_symbols(a);
    let mut make = |name: &str| {
        let s = fresh_symbol(name, &taken);
        taken.push(s.clone());
        a.domain().renamed(&s, Parity::Even)
    };
    [make("p"), make("q"), make("r")]
}

fn velocity_field(a: &TotalDiffOp, section: &[DiffPoly]) -> Result<EvolField> {
    EvolField::new(Parity::Even, [(a.codomain().clone(), a.apply(section)?)])
}

/// `(∂_{A(p)}(A))(q)`: the field with velocity `A(p)` applied to the
/// coefficients of `A`, then evaluated at `q`.
pub fn ev_operator_at(a: &TotalDiffOp, p: &[DiffPoly], q: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
    a.ev_coeffs(&velocity_field(a, p)?)?.apply(q)
}

fn sub_tuple(a: Vec<DiffPoly>, b: Vec<DiffPoly>) -> Vec<DiffPoly> {
    a.into_iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add_tuple(a: Vec<DiffPoly>, b: Vec<DiffPoly>) -> Vec<DiffPoly> {
    a.into_iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `{{p,q}}_A = (ℓ_{A,p})†(q)` for a Hamiltonian operator.
pub fn hamiltonian_bracket(a: &TotalDiffOp) -> Result<BiDiffOp> {
    if !a.is_square() {
        return Err(JetError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let [p, q, _] = formal_args(a);
    let values = a.coeff_linearization(&p)?.adjoint().apply(&coords(&q))?;
    BiDiffOp::from_bilinear(&values, &p, &q)
}

/// Residuals of skew-adjointness and of the Hamiltonian criterion
/// `(∂_{A(p)}A)(q) - (∂_{A(q)}A)(p) - A((ℓ_{A,p})†(q))`.
pub fn check_hamiltonian(a: &TotalDiffOp) -> Result<VerificationReport> {
    let skew = a.skew_adjoint_residual()?;
    let [p, q, _] = formal_args(a);
    let (ps, qs) = (coords(&p), coords(&q));
    let lhs = sub_tuple(ev_operator_at(a, &ps, &qs)?, ev_operator_at(a, &qs, &ps)?);
    let bracket = a.coeff_linearization(&p)?.adjoint().apply(&qs)?;
    let rhs = a.apply(&bracket)?;
    Ok(VerificationReport::new("check-hamiltonian")
        .residual("skew_adjoint", Value::Op(skew))
        .residual("hamiltonian_identity", Value::Polys(sub_tuple(lhs, rhs)))
        .output("bracket", Value::Polys(bracket)))
}

/// `[p,q]_A = ∂_{A(p)}(q) - ∂_{A(q)}(p) + {{p,q}}_A` for sections that may
/// depend on the codomain jets.
pub fn full_bracket(spec: &AnchorSpec, p: &[DiffPoly], q: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
    let bracket = spec.resolved_bracket()?;
    let a = &spec.anchor;
    let fp = velocity_field(a, p)?;
    let fq = velocity_field(a, q)?;
    let standard = sub_tuple(fp.apply_all(q)?, fq.apply_all(p)?);
    Ok(add_tuple(standard, bracket.apply(p, q)?))
}

/// Operator-part closure residual
/// `(∂_{A(p)}A)(q) - (∂_{A(q)}A)(p) - A({{p,q}})` on formal arguments.
pub fn closure_residual(a: &TotalDiffOp, bracket: &BiDiffOp) -> Result<Vec<DiffPoly>> {
    let [p, q, _] = formal_args(a);
    let (ps, qs) = (coords(&p), coords(&q));
    let lhs = sub_tuple(ev_operator_at(a, &ps, &qs)?, ev_operator_at(a, &qs, &ps)?);
    let rhs = a.apply(&bracket.apply(&ps, &qs)?)?;
    Ok(sub_tuple(lhs, rhs))
}

pub fn check_closure(spec: &AnchorSpec) -> Result<VerificationReport> {
    let bracket = spec.resolved_bracket()?;
    let res = closure_residual(&spec.anchor, &bracket)?;
    Ok(VerificationReport::new("closure").residual("closure", Value::Polys(res)))
}

/// Sign under which a candidate bracket closes the anchor image.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Try `+candidate` and `-candidate` and record which one satisfies the
/// closure identity. When both do (the candidate lies in the kernel
/// directions), `+` is recorded.
pub fn certify_bracket_sign(
    anchor: &TotalDiffOp,
    candidate: &BiDiffOp,
) -> Result<(VerificationReport, Option<Sign>)> {
    let plus = closure_residual(anchor, candidate)?;
    let minus = closure_residual(anchor, &candidate.neg())?;
    let plus_ok = plus.iter().all(DiffPoly::is_zero);
    let minus_ok = minus.iter().all(DiffPoly::is_zero);
    let rep = VerificationReport::new("closure");
    let (rep, sign) = if plus_ok {
        (
            rep.residual("closure", Value::Polys(plus))
                .output("residual_with_minus", Value::Polys(minus)),
            Some(Sign::Plus),
        )
    } else if minus_ok {
        (
            rep.residual("closure", Value::Polys(minus))
                .output("residual_with_plus", Value::Polys(plus)),
            Some(Sign::Minus),
        )
    } else {
        (
            rep.residual("closure_plus", Value::Polys(plus))
                .residual("closure_minus", Value::Polys(minus)),
            None,
        )
    };
    let label = sign.map_or("none", Sign::symbol);
    Ok((rep.note("certified_sign", label), sign))
}

/// One cyclic summand `-∂^{(u)}_{A(r)}({{p,q}}) + {{{{p,q}}, r}}`.
fn jacobi_summand(
    a: &TotalDiffOp,
    bracket: &BiDiffOp,
    p: &[DiffPoly],
    q: &[DiffPoly],
    r: &[DiffPoly],
) -> Result<Vec<DiffPoly>> {
    let pq = bracket.apply(p, q)?;
    let fr = velocity_field(a, r)?;
    let moved = fr.apply_all(&pq)?;
    let nested = bracket.apply(&pq, r)?;
    Ok(sub_tuple(nested, moved))
}

/// Cyclic-sum residual of the reduced Jacobi identity. The field
/// `∂^{(u)}_{A(r)}` only touches codomain jets, i.e. the bracket coefficients.
pub fn jacobi_residual(a: &TotalDiffOp, bracket: &BiDiffOp) -> Result<Vec<DiffPoly>> {
    let [p, q, r] = formal_args(a);
    let (ps, qs, rs) = (coords(&p), coords(&q), coords(&r));
    let s1 = jacobi_summand(a, bracket, &ps, &qs, &rs)?;
    let s2 = jacobi_summand(a, bracket, &qs, &rs, &ps)?;
    let s3 = jacobi_summand(a, bracket, &rs, &ps, &qs)?;
    Ok(add_tuple(add_tuple(s1, s2), s3))
}

pub fn check_jacobi(spec: &AnchorSpec) -> Result<VerificationReport> {
    let bracket = spec.resolved_bracket()?;
    let res = jacobi_residual(&spec.anchor, &bracket)?;
    Ok(VerificationReport::new("jacobi").residual("jacobi", Value::Polys(res)))
}

/// The bracket as polynomials in the formal arguments, with a skewness
/// residual `{{p,q}} + {{q,p}}`.
pub fn bracket_report(spec: &AnchorSpec) -> Result<VerificationReport> {
    let bracket = spec.resolved_bracket()?;
    let [p, q, _] = formal_args(&spec.anchor);
    let values = bracket.on_bundles(&p, &q)?;
    let skew = bracket.skew_residual().on_bundles(&p, &q)?;
    Ok(VerificationReport::new("bracket")
        .residual("skew", Value::Polys(skew))
        .output("bracket", Value::Polys(values)))
}

/// `1/2` as a polynomial, shared by the homological constructions.
pub(crate) fn half() -> DiffPoly {
    DiffPoly::constant(rat(1, 2))
}

pub(crate) fn minus_one() -> DiffPoly {
    DiffPoly::constant(int(-1))
}
