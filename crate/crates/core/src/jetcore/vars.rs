use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Add;
use std::sync::Arc;

/// Grading of a variable, field or homogeneous polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// `(-1)^(self * other)` as a boolean "negate" flag.
    pub fn koszul(self, other: Parity) -> bool {
        self.is_odd() && other.is_odd()
    }
}

impl Add for Parity {
    type Output = Parity;

    fn add(self, rhs: Parity) -> Parity {
        if self == rhs {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// A coordinate on the base manifold.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseVar {
    pub name: String,
    pub index: usize,
}

/// Exponent vector over base variables. Trailing zeros are trimmed so that
/// equal indices compare equal regardless of how many base variables exist.
///
/// Used both for multi-indices of jets and for powers of base coordinates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn from_counts(mut counts: Vec<u32>) -> Self {
        while counts.last() == Some(&0) {
            counts.pop();
        }
        MultiIndex(counts)
    }

    /// Multi-index `1_i`.
    pub fn unit(i: usize) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = 1;
        MultiIndex(v)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of slots that may be nonzero.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn raised(&self, i: usize) -> Self {
        self.shifted(i, 1)
    }

    pub fn shifted(&self, i: usize, by: u32) -> Self {
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] += by;
        MultiIndex::from_counts(v)
    }

    /// Decrease slot `i` by one; `None` if it is already zero.
    pub fn lowered(&self, i: usize) -> Option<Self> {
        if self.get(i) == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        Some(MultiIndex::from_counts(v))
    }

    pub fn plus(&self, other: &MultiIndex) -> Self {
        let n = self.len().max(other.len());
        MultiIndex::from_counts((0..n).map(|i| self.get(i) + other.get(i)).collect())
    }

    /// `self - other`, if `other <= self` componentwise.
    pub fn minus(&self, other: &MultiIndex) -> Option<Self> {
        let n = self.len().max(other.len());
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            v.push(self.get(i).checked_sub(other.get(i))?);
        }
        Some(MultiIndex::from_counts(v))
    }

    /// All `rho <= self` componentwise, with the multinomial weight
    /// `prod_i binom(self_i, rho_i)`.
    pub fn sub_indices(&self) -> Vec<(MultiIndex, u64)> {
        let mut out = vec![(Vec::new(), 1u64)];
        for &s in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (s as usize + 1));
            for (prefix, w) in &out {
                for r in 0..=s {
                    let mut p = prefix.clone();
                    p.push(r);
                    next.push((p, w * binomial(s, r)));
                }
            }
            out = next;
        }
        out.into_iter()
            .map(|(v, w)| (MultiIndex::from_counts(v), w))
            .collect()
    }

    /// Iterate slots as `(base index, count)` with nonzero count.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (i, c))
    }
}

fn binomial(n: u32, k: u32) -> u64 {
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * u64::from(n - i) / u64::from(i + 1);
    }
    acc
}

impl Ord for MultiIndex {
    // Graded: lower total order first; within one order, heavier in the
    // earlier base variables first (u_xx < u_xy < u_yy).
    fn cmp(&self, other: &Self) -> Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug)]
struct BundleData {
    symbol: String,
    dim: usize,
    parity: Parity,
    depends_on: Vec<usize>,
}

/// A (possibly odd) vector bundle over the base whose jets are coordinates.
///
/// Handles are cheap to clone. Identity is the symbol: two handles with the
/// same symbol are the same bundle.
#[derive(Clone)]
pub struct Bundle(Arc<BundleData>);

impl Bundle {
    /// `depends_on` lists base variable indices along which total derivatives
    /// act nontrivially on this bundle's jets.
    pub fn new(symbol: &str, dim: usize, parity: Parity, depends_on: Vec<usize>) -> Self {
        let mut depends_on = depends_on;
        depends_on.sort_unstable();
        depends_on.dedup();
        Bundle(Arc::new(BundleData {
            symbol: symbol.to_string(),
            dim,
            parity,
            depends_on,
        }))
    }

    /// Bundle depending on all of the first `n_base` base variables.
    pub fn over(symbol: &str, dim: usize, parity: Parity, n_base: usize) -> Self {
        Bundle::new(symbol, dim, parity, (0..n_base).collect())
    }

    pub fn symbol(&self) -> &str {
        &self.0.symbol
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn parity(&self) -> Parity {
        self.0.parity
    }

    pub fn depends_on(&self) -> &[usize] {
        &self.0.depends_on
    }

    pub fn depends_on_base(&self, i: usize) -> bool {
        self.0.depends_on.binary_search(&i).is_ok()
    }

    /// Same shape and dependence, different symbol and parity.
    pub fn renamed(&self, symbol: &str, parity: Parity) -> Bundle {
        Bundle::new(symbol, self.dim(), parity, self.0.depends_on.clone())
    }

    /// Jet coordinate `component` (0-based) with multi-index `sigma`, or
    /// `None` when `sigma` differentiates along a base variable this bundle
    /// does not depend on (the jet is identically zero).
    pub fn jet(&self, component: usize, sigma: MultiIndex) -> Option<JetVar> {
        assert!(component < self.dim(), "component out of range");
        if sigma.iter().any(|(i, _)| !self.depends_on_base(i)) {
            return None;
        }
        Some(JetVar {
            bundle: self.clone(),
            component,
            sigma,
        })
    }

    /// Zeroth-order coordinate.
    pub fn coord(&self, component: usize) -> JetVar {
        self.jet(component, MultiIndex::empty())
            .expect("zeroth jet always exists")
    }
}

impl PartialEq for Bundle {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.symbol == other.0.symbol
    }
}

impl Eq for Bundle {}

impl Hash for Bundle {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.symbol.hash(state);
    }
}

impl Ord for Bundle {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.symbol.cmp(&other.0.symbol)
    }
}

impl PartialOrd for Bundle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}({})", self.0.symbol, self.0.dim, self.0.parity)
    }
}

/// Jet coordinate `u^a_sigma`. Ordered by bundle symbol, then component, then
/// graded order of the multi-index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    bundle: Bundle,
    component: usize,
    sigma: MultiIndex,
}

impl JetVar {
    pub fn bundle(&self) -> &Bundle {
        &self.bundle
    }

    pub fn component(&self) -> usize {
        self.component
    }

    pub fn sigma(&self) -> &MultiIndex {
        &self.sigma
    }

    pub fn parity(&self) -> Parity {
        self.bundle.parity()
    }

    pub fn is_odd(&self) -> bool {
        self.bundle.parity().is_odd()
    }

    /// The jet `D_i` of this one, or `None` if it vanishes.
    pub fn raised(&self, i: usize) -> Option<JetVar> {
        if !self.bundle.depends_on_base(i) {
            return None;
        }
        Some(JetVar {
            bundle: self.bundle.clone(),
            component: self.component,
            sigma: self.sigma.raised(i),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multi_index_order_is_graded() {
        let x = MultiIndex::unit(0);
        let xx = x.raised(0);
        let xy = x.raised(1);
        let yy = MultiIndex::unit(1).raised(1);
        let mut v = vec![yy.clone(), xx.clone(), MultiIndex::empty(), xy.clone(), x.clone()];
        v.sort();
        assert_eq!(v, vec![MultiIndex::empty(), x, xx, xy, yy]);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        assert_eq!(MultiIndex::from_counts(vec![1, 0, 0]), MultiIndex::unit(0));
        assert_eq!(MultiIndex::unit(1).lowered(1), Some(MultiIndex::empty()));
        assert_eq!(MultiIndex::empty().lowered(0), None);
    }

    #[test]
    fn sub_indices_weights() {
        let s = MultiIndex::from_counts(vec![2, 1]);
        let subs = s.sub_indices();
        assert_eq!(subs.len(), 6);
        let total: u64 = subs.iter().map(|(_, w)| w).sum();
        assert_eq!(total, 8); // 2^|sigma|
    }

    #[test]
    fn jets_outside_dependence_vanish() {
        let p = Bundle::new("p", 1, Parity::Even, vec![0]);
        assert!(p.jet(0, MultiIndex::unit(1)).is_none());
        assert!(p.coord(0).raised(1).is_none());
        assert!(p.coord(0).raised(0).is_some());
    }

    #[test]
    fn parity_arithmetic() {
        assert_eq!(Parity::Odd + Parity::Odd, Parity::Even);
        assert_eq!(Parity::Odd + Parity::Even, Parity::Odd);
        assert!(Parity::Odd.koszul(Parity::Odd));
        assert!(!Parity::Odd.koszul(Parity::Even));
    }
}
