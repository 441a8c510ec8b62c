use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::vars::{JetVar, MultiIndex, Parity};
use crate::error::{JetError, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Factor list entry: a jet coordinate and its power (always 1 for odd jets).
pub type Factor = (JetVar, u32);

/// Monomial key in canonical form: powers of base coordinates and a sorted
/// factor list without repeated odd jets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub base: MultiIndex,
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn one() -> Self {
        Term {
            base: MultiIndex::empty(),
            factors: Vec::new(),
        }
    }

    pub fn parity(&self) -> Parity {
        if self.odd_count() % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    /// Number of odd jet factors.
    pub fn odd_count(&self) -> usize {
        self.factors.iter().filter(|(v, _)| v.is_odd()).count()
    }

    /// Canonical form of an unordered factor list: `Some((negate, factors))`,
    /// or `None` when a repeated odd factor kills the product.
    pub fn canonical(mut factors: Vec<Factor>) -> Option<(bool, Vec<Factor>)> {
        factors.retain(|(_, k)| *k > 0);
        let mut inversions = 0usize;
        for (i, (a, ka)) in factors.iter().enumerate() {
            if !a.is_odd() {
                continue;
            }
            if *ka > 1 {
                return None;
            }
            for (b, _) in &factors[i + 1..] {
                if b.is_odd() {
                    match a.cmp(b) {
                        std::cmp::Ordering::Greater => inversions += 1,
                        std::cmp::Ordering::Equal => return None,
                        std::cmp::Ordering::Less => {}
                    }
                }
            }
        }
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<Factor> = Vec::with_capacity(factors.len());
        for (v, k) in factors {
            match merged.last_mut() {
                Some((last, lk)) if *last == v => *lk += k,
                _ => merged.push((v, k)),
            }
        }
        Some((inversions % 2 == 1, merged))
    }
}

/// Exact polynomial in base coordinates and (even or odd) jet coordinates.
///
/// Always held in canonical form: each key appears once with a nonzero
/// rational coefficient, factors sorted by the global jet order with Koszul
/// signs absorbed into the coefficient.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<Term, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(Term::one(), c);
        p
    }

    pub fn int(n: i64) -> Self {
        DiffPoly::constant(int(n))
    }

    pub fn var(v: JetVar) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(
            Term {
                base: MultiIndex::empty(),
                factors: vec![(v, 1)],
            },
            Rational::one(),
        );
        p
    }

    /// The base coordinate `x_i`.
    pub fn base(i: usize) -> Self {
        DiffPoly::base_monomial(MultiIndex::unit(i))
    }

    pub fn base_monomial(powers: MultiIndex) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(
            Term {
                base: powers,
                factors: Vec::new(),
            },
            Rational::one(),
        );
        p
    }

    /// Build a canonical polynomial from raw, possibly unordered terms.
    pub fn normalize<I>(raw: I) -> Self
    where
        I: IntoIterator<Item = (Rational, MultiIndex, Vec<Factor>)>,
    {
        let mut p = DiffPoly::zero();
        for (c, base, factors) in raw {
            p.add_raw(c, base, factors);
        }
        p
    }

    /// Add one raw term, renormalizing its factors.
    pub fn add_raw(&mut self, c: Rational, base: MultiIndex, factors: Vec<Factor>) {
        if c.is_zero() {
            return;
        }
        if let Some((negate, factors)) = Term::canonical(factors) {
            let c = if negate { -c } else { c };
            self.add_term(Term { base, factors }, c);
        }
    }

    /// Add a term already in canonical form.
    pub(crate) fn add_term(&mut self, t: Term, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(t) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &Rational)> {
        self.terms.iter()
    }

    /// Constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (t, c) = self.terms.iter().next()?;
                (t.factors.is_empty() && t.base.is_empty()).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Parity of a homogeneous polynomial; zero counts as even.
    pub fn parity(&self) -> Result<Parity> {
        let mut it = self.terms.keys().map(Term::parity);
        match it.next() {
            None => Ok(Parity::Even),
            Some(first) => {
                if it.all(|p| p == first) {
                    Ok(first)
                } else {
                    Err(JetError::ParityInhomogeneous)
                }
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.parity().is_ok()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(t, k)| (t.clone(), k * c))
                .collect(),
        }
    }

    pub fn times(&self, other: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                let mut factors = ta.factors.clone();
                factors.extend(tb.factors.iter().cloned());
                out.add_raw(ca * cb, ta.base.plus(&tb.base), factors);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..k {
            acc = acc.times(self);
        }
        acc
    }

    /// Ordinary partial derivative for even `v`; for odd `v` the right
    /// derivative (move `v` to the right end, then strip it).
    pub fn partial(&self, v: &JetVar) -> DiffPoly {
        self.partial_impl(v, true)
    }

    /// Left derivative: move `v` to the left end, then strip it. Agrees with
    /// [`DiffPoly::partial`] for even `v`.
    pub fn partial_left(&self, v: &JetVar) -> DiffPoly {
        self.partial_impl(v, false)
    }

    fn partial_impl(&self, v: &JetVar, right: bool) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (t, c) in &self.terms {
            let Some(pos) = t.factors.iter().position(|(w, _)| w == v) else {
                continue;
            };
            let k = t.factors[pos].1;
            let mut c = c * int(i64::from(k));
            if v.is_odd() {
                let passed = if right {
                    t.factors[pos + 1..].iter().filter(|(w, _)| w.is_odd()).count()
                } else {
                    t.factors[..pos].iter().filter(|(w, _)| w.is_odd()).count()
                };
                if passed % 2 == 1 {
                    c = -c;
                }
            }
            let mut factors = t.factors.clone();
            if k == 1 {
                factors.remove(pos);
            } else {
                factors[pos].1 = k - 1;
            }
            out.add_term(
                Term {
                    base: t.base.clone(),
                    factors,
                },
                c,
            );
        }
        out
    }

    /// Partial derivative along the base coordinate `x_i`.
    pub fn partial_base(&self, i: usize) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (t, c) in &self.terms {
            let k = t.base.get(i);
            if k == 0 {
                continue;
            }
            out.add_term(
                Term {
                    base: t.base.lowered(i).expect("nonzero power"),
                    factors: t.factors.clone(),
                },
                c * int(i64::from(k)),
            );
        }
        out
    }

    pub fn jet_vars(&self) -> BTreeSet<JetVar> {
        self.terms
            .keys()
            .flat_map(|t| t.factors.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    /// Highest jet order occurring, 0 for constants.
    pub fn max_order(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|t| t.factors.iter().map(|(v, _)| v.sigma().order()))
            .max()
            .unwrap_or(0)
    }

    /// Set of odd-factor counts over all terms.
    pub fn odd_degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(Term::odd_count).collect()
    }

    /// Replace each jet factor by `replace(v)` (or keep it when `None`),
    /// multiplying in factor order so signs come out of renormalization.
    pub fn substitute_with<F>(&self, mut replace: F) -> DiffPoly
    where
        F: FnMut(&JetVar) -> Option<DiffPoly>,
    {
        let mut cache: BTreeMap<JetVar, Option<DiffPoly>> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for (t, c) in &self.terms {
            let mut acc = DiffPoly::zero();
            acc.add_term(
                Term {
                    base: t.base.clone(),
                    factors: Vec::new(),
                },
                c.clone(),
            );
            for (v, k) in &t.factors {
                let r = cache.entry(v.clone()).or_insert_with(|| replace(v));
                let factor = match r {
                    Some(p) => p.pow(*k),
                    None => DiffPoly {
                        terms: BTreeMap::from([(
                            Term {
                                base: MultiIndex::empty(),
                                factors: vec![(v.clone(), *k)],
                            },
                            Rational::one(),
                        )]),
                    },
                };
                acc = acc.times(&factor);
                if acc.is_zero() {
                    break;
                }
            }
            out = out + acc;
        }
        out
    }

    /// Keep only the terms whose key satisfies `keep`.
    pub fn filter_terms<F: Fn(&Term) -> bool>(&self, keep: F) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(t, _)| keep(t))
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;

    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        for (t, c) in rhs.terms {
            self.add_term(t, c);
        }
        self
    }
}

impl Add<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;

    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (t, c) in &rhs.terms {
            out.add_term(t.clone(), c.clone());
        }
        out
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;

    fn neg(mut self) -> DiffPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;

    fn neg(self) -> DiffPoly {
        -(self.clone())
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;

    fn sub(self, rhs: DiffPoly) -> DiffPoly {
        self + (-rhs)
    }
}

impl Sub<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;

    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        for (t, c) in &rhs.terms {
            out.add_term(t.clone(), -c.clone());
        }
        out
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;

    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        self.times(&rhs)
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;

    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        self.times(rhs)
    }
}

impl std::iter::Sum for DiffPoly {
    fn sum<I: Iterator<Item = DiffPoly>>(iter: I) -> DiffPoly {
        iter.fold(DiffPoly::zero(), |a, b| a + b)
    }
}
