//! Total derivatives, evolutionary fields, linearizations and Euler operators.

use std::collections::{BTreeMap, HashMap};

use crate::error::{JetError, Result};
use crate::jetcore::{int, Bundle, DiffPoly, MultiIndex, Parity, Term};
use crate::operators::{ScalarOp, TotalDiffOp};

/// Total derivative `D_i`: an even derivation acting on base coordinates by
/// `d/dx_i` and on jets by raising the multi-index, for bundles that depend
/// on `x_i`.
pub fn total_derivative(p: &DiffPoly, i: usize) -> DiffPoly {
    let mut out = p.partial_base(i);
    for (t, c) in p.terms() {
        for (pos, (v, k)) in t.factors.iter().enumerate() {
            let Some(raised) = v.raised(i) else { continue };
            let mut factors = Vec::with_capacity(t.factors.len() + 1);
            factors.extend(t.factors[..pos].iter().cloned());
            factors.push((v.clone(), k - 1));
            factors.push((raised, 1));
            factors.extend(t.factors[pos + 1..].iter().cloned());
            out.add_raw(c * int(i64::from(*k)), t.base.clone(), factors);
        }
    }
    out
}

/// `D_sigma`, the composition of total derivatives along `sigma`.
pub fn total_derivative_multi(p: &DiffPoly, sigma: &MultiIndex) -> DiffPoly {
    let mut acc = p.clone();
    for (i, count) in sigma.iter() {
        for _ in 0..count {
            if acc.is_zero() {
                return acc;
            }
            acc = total_derivative(&acc, i);
        }
    }
    acc
}

/// Memo of `D_sigma(phi)` for repeated prolongation of the same sections.
#[derive(Default)]
pub(crate) struct ProlongCache {
    memo: HashMap<(usize, usize, MultiIndex), DiffPoly>,
}

impl ProlongCache {
    pub(crate) fn get(&mut self, key: (usize, usize), base: &DiffPoly, sigma: &MultiIndex) -> DiffPoly {
        if let Some(p) = self.memo.get(&(key.0, key.1, sigma.clone())) {
            return p.clone();
        }
        // Build from the largest cached prefix one derivative at a time.
        let value = match sigma.iter().next() {
            None => base.clone(),
            Some((i, _)) => {
                let lower = sigma.lowered(i).expect("nonzero slot");
                let prev = self.get(key, base, &lower);
                total_derivative(&prev, i)
            }
        };
        self.memo.insert((key.0, key.1, sigma.clone()), value.clone());
        value
    }
}

/// Evolutionary vector field `∂_φ` with a generating section per bundle.
///
/// Bundles absent from the velocity map are inert.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvolField {
    parity: Parity,
    velocities: BTreeMap<Bundle, Vec<DiffPoly>>,
}

impl EvolField {
    /// Checks that each velocity has the parity of its bundle shifted by the
    /// field parity, one entry per fibre component, and no dependence on base
    /// variables the bundle itself does not depend on.
    pub fn new<I>(parity: Parity, velocities: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Bundle, Vec<DiffPoly>)>,
    {
        let mut map = BTreeMap::new();
        for (bundle, vel) in velocities {
            if vel.len() != bundle.dim() {
                return Err(JetError::ArityMismatch {
                    expected: bundle.dim(),
                    found: vel.len(),
                });
            }
            let expected = bundle.parity() + parity;
            for v in &vel {
                let found = v.parity()?;
                if !v.is_zero() && found != expected {
                    return Err(JetError::VelocityParity {
                        bundle: bundle.symbol().to_string(),
                        expected,
                        found,
                    });
                }
                if !depends_within(v, &bundle) {
                    return Err(JetError::VelocityDependence {
                        bundle: bundle.symbol().to_string(),
                    });
                }
            }
            map.insert(bundle, vel);
        }
        Ok(EvolField {
            parity,
            velocities: map,
        })
    }

    pub fn zero(parity: Parity) -> Self {
        EvolField {
            parity,
            velocities: BTreeMap::new(),
        }
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn velocity(&self, bundle: &Bundle) -> Option<&[DiffPoly]> {
        self.velocities.get(bundle).map(Vec::as_slice)
    }

    pub fn velocities(&self) -> impl Iterator<Item = (&Bundle, &[DiffPoly])> {
        self.velocities.iter().map(|(b, v)| (b, v.as_slice()))
    }

    pub fn is_zero(&self) -> bool {
        self.velocities.values().flatten().all(DiffPoly::is_zero)
    }

    /// Apply the field as a graded derivation. An odd field picks up a sign
    /// for every odd factor it passes on its way to the differentiated jet.
    pub fn apply(&self, p: &DiffPoly) -> Result<DiffPoly> {
        if self.parity.is_odd() {
            p.parity()?;
        }
        let keys: Vec<&Bundle> = self.velocities.keys().collect();
        let mut cache = ProlongCache::default();
        let mut out = DiffPoly::zero();
        for (t, c) in p.terms() {
            let mut odd_before = 0usize;
            for (pos, (v, k)) in t.factors.iter().enumerate() {
                let here_odd = v.is_odd();
                if let Some(bi) = keys.iter().position(|b| *b == v.bundle()) {
                    let phi = &self.velocities[keys[bi]][v.component()];
                    let key = (bi, v.component());
                    let d_phi = cache.get(key, phi, v.sigma());
                    if !d_phi.is_zero() {
                        let mut coeff = c * int(i64::from(*k));
                        if self.parity.is_odd() && odd_before % 2 == 1 {
                            coeff = -coeff;
                        }
                        let mut left_factors: Vec<_> = t.factors[..pos].to_vec();
                        left_factors.push((v.clone(), k - 1));
                        let left = DiffPoly::normalize([(coeff, t.base.clone(), left_factors)]);
                        let right = DiffPoly::normalize([(
                            int(1),
                            MultiIndex::empty(),
                            t.factors[pos + 1..].to_vec(),
                        )]);
                        out = out + left.times(&d_phi).times(&right);
                    }
                }
                if here_odd {
                    odd_before += *k as usize;
                }
            }
        }
        Ok(out)
    }

    /// Apply componentwise to a section.
    pub fn apply_all(&self, s: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
        s.iter().map(|p| self.apply(p)).collect()
    }

    /// Graded commutator `[F, G]` with velocities
    /// `F(ψ_G) - (-1)^{|F||G|} G(ψ_F)` on every bundle either field touches.
    pub fn commutator(&self, other: &EvolField) -> Result<EvolField> {
        let negate = self.parity.koszul(other.parity);
        let mut bundles: Vec<Bundle> = self.velocities.keys().cloned().collect();
        for b in other.velocities.keys() {
            if !bundles.contains(b) {
                bundles.push(b.clone());
            }
        }
        let mut vel = Vec::new();
        for b in bundles {
            let mut comps = Vec::with_capacity(b.dim());
            for a in 0..b.dim() {
                let psi_g = other.velocity(&b).map(|v| v[a].clone()).unwrap_or_default();
                let psi_f = self.velocity(&b).map(|v| v[a].clone()).unwrap_or_default();
                let fg = self.apply(&psi_g)?;
                let gf = other.apply(&psi_f)?;
                comps.push(if negate { fg + gf } else { fg - gf });
            }
            vel.push((b, comps));
        }
        EvolField::new(self.parity + other.parity, vel)
    }
}

/// Whether `p` only involves base variables and jets along directions
/// `bundle` depends on.
fn depends_within(p: &DiffPoly, bundle: &Bundle) -> bool {
    let inside = |deps: &[usize]| deps.iter().all(|i| bundle.depends_on_base(*i));
    p.terms().all(|(t, _)| {
        t.base.iter().all(|(i, _)| bundle.depends_on_base(i))
            && t.factors.iter().all(|(v, _)| inside(v.bundle().depends_on()))
    })
}

/// Evaluate an evolutionary field on a polynomial.
pub fn ev_apply(field: &EvolField, p: &DiffPoly) -> Result<DiffPoly> {
    field.apply(p)
}

pub fn ev_commutator(f: &EvolField, g: &EvolField) -> Result<EvolField> {
    f.commutator(g)
}

/// Linearization `ℓ_ψ` with respect to `wrt`: the operator with
/// `ℓ_ψ(φ) = ∂_φ(ψ)` for the even field with velocity `φ` on `wrt`.
///
/// `codomain` labels the rows and must have one component per entry of `psi`.
pub fn linearization(psi: &[DiffPoly], wrt: &Bundle, codomain: &Bundle) -> Result<TotalDiffOp> {
    if psi.len() != codomain.dim() {
        return Err(JetError::ArityMismatch {
            expected: codomain.dim(),
            found: psi.len(),
        });
    }
    let mut entries = vec![vec![ScalarOp::zero(); wrt.dim()]; psi.len()];
    for (a, p) in psi.iter().enumerate() {
        for v in p.jet_vars() {
            if v.bundle() != wrt {
                continue;
            }
            let coeff = p.partial_left(&v);
            entries[a][v.component()].add_term(v.sigma().clone(), coeff);
        }
    }
    TotalDiffOp::new(wrt.clone(), codomain.clone(), entries)
}

/// Variational derivative `δp/δη^α = Σ_σ (-D)_σ (∂p/∂η^α_σ)`, using the right
/// derivative for odd `η`. Annihilates total divergences.
pub fn euler(p: &DiffPoly, wrt: &Bundle) -> Vec<DiffPoly> {
    let mut out = vec![DiffPoly::zero(); wrt.dim()];
    for v in p.jet_vars() {
        if v.bundle() != wrt {
            continue;
        }
        let d = total_derivative_multi(&p.partial(&v), v.sigma());
        let term = if v.sigma().order() % 2 == 1 { -d } else { d };
        let slot = &mut out[v.component()];
        *slot = std::mem::take(slot) + term;
    }
    out
}

/// Keep the terms of `p` that involve no jets of the listed bundles.
pub fn strip_bundles(p: &DiffPoly, bundles: &[&Bundle]) -> DiffPoly {
    p.filter_terms(|t: &Term| {
        t.factors
            .iter()
            .all(|(v, _)| !bundles.iter().any(|b| *b == v.bundle()))
    })
}
