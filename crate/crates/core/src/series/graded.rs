//! Graded truncated series over exact rationals.

use super::mono::{Mono, MultiIndex, Trunc};
use crate::rat::Rat;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SeriesError {
    #[error("series is not invertible: constant term is zero")]
    NotInvertible,
    #[error("state-vector by state-vector product requested without a declared product rule")]
    StateProductUndeclared,
    #[error("substituted series for variable {0} has a nonzero constant term")]
    SubstitutionConstantTerm(String),
    #[error("map is not a reversion candidate: linear part is not the identity on {0}")]
    NonIdentityLinearPart(String),
    #[error("z^1 part of the series is not a multiple of phi_0")]
    ZOneNotScalar,
    #[error("series has z-powers >= 2 where none are allowed")]
    UnexpectedHighZPower,
}

/// Coefficient values a graded series can carry: exact scalars or sparse
/// state-space vectors.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&mut self, other: &Self);
    fn neg_inplace(&mut self);
    fn scale(&mut self, k: &Rat);
}

impl Coeff for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn neg_inplace(&mut self) {
        let v = std::mem::replace(self, <Rat as Zero>::zero());
        *self = -v;
    }
    fn scale(&mut self, k: &Rat) {
        *self *= k;
    }
}

/// Sparse element of the extended state space: sector index -> coefficient.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct StateVec(pub BTreeMap<u16, Rat>);

impl StateVec {
    pub fn basis(k: u16) -> Self {
        StateVec(BTreeMap::from([(k, Rat::from_integer(1.into()))]))
    }

    pub fn scaled_basis(k: u16, c: Rat) -> Self {
        if Zero::is_zero(&c) {
            StateVec::default()
        } else {
            StateVec(BTreeMap::from([(k, c)]))
        }
    }

    pub fn component(&self, k: u16) -> Rat {
        self.0.get(&k).cloned().unwrap_or_else(|| Zero::zero())
    }

    pub fn insert_add(&mut self, k: u16, c: Rat) {
        if Zero::is_zero(&c) {
            return;
        }
        let e = self.0.entry(k).or_insert_with(|| Zero::zero());
        *e += c;
        if Zero::is_zero(e) {
            self.0.remove(&k);
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (&u16, &Rat)> {
        self.0.iter()
    }

    /// Keep only components whose sector satisfies the predicate.
    pub fn retain_sectors(&mut self, mut keep: impl FnMut(u16) -> bool) {
        self.0.retain(|&k, _| keep(k));
    }
}

impl fmt::Debug for StateVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, c)| format!("{}*phi_{}", c, k))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Coeff for StateVec {
    fn zero() -> Self {
        StateVec::default()
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add_ref(&mut self, other: &Self) {
        for (k, c) in &other.0 {
            self.insert_add(*k, c.clone());
        }
    }
    fn neg_inplace(&mut self) {
        for c in self.0.values_mut() {
            let v = std::mem::replace(c, <Rat as Zero>::zero());
            *c = -v;
        }
    }
    fn scale(&mut self, k: &Rat) {
        if Zero::is_zero(k) {
            self.0.clear();
            return;
        }
        for c in self.0.values_mut() {
            *c *= k;
        }
    }
}

/// Truncated multivariate series: sparse map from term index to coefficient.
/// Absent terms are zero; no stored term exceeds the truncation.
#[derive(Clone, PartialEq, Debug)]
pub struct GradedSeries<C: Coeff> {
    terms: BTreeMap<MultiIndex, C>,
    pub trunc: Trunc,
}

impl<C: Coeff> GradedSeries<C> {
    pub fn zero(trunc: Trunc) -> Self {
        GradedSeries {
            terms: BTreeMap::new(),
            trunc,
        }
    }

    pub fn constant(c: C, trunc: Trunc) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(MultiIndex::one(), c);
        s
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

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, idx: &MultiIndex) -> C {
        self.terms.get(idx).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&MultiIndex::one())
    }

    /// Add a term, dropping anything outside the truncation and pruning zeros.
    pub fn add_term(&mut self, idx: MultiIndex, c: C) {
        if c.is_zero() || !self.trunc.admits(&idx) {
            return;
        }
        match self.terms.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_ref(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.meet(&other.trunc);
        let mut out = Self::zero(trunc);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), c.clone());
        }
        for (idx, c) in &other.terms {
            out.add_term(idx.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut neg = other.clone();
        neg.negate();
        self.add(&neg)
    }

    pub fn negate(&mut self) {
        for c in self.terms.values_mut() {
            c.neg_inplace();
        }
    }

    pub fn scale(&mut self, k: &Rat) {
        if Zero::is_zero(k) {
            self.terms.clear();
            return;
        }
        for c in self.terms.values_mut() {
            c.scale(k);
        }
    }

    pub fn scaled(&self, k: &Rat) -> Self {
        let mut s = self.clone();
        s.scale(k);
        s
    }

    /// Multiply by a single monomial scaled by `k`.
    pub fn mul_monomial(&self, m: &MultiIndex, k: &Rat) -> Self {
        let mut out = Self::zero(self.trunc);
        if Zero::is_zero(k) {
            return out;
        }
        for (idx, c) in &self.terms {
            let mut c2 = c.clone();
            c2.scale(k);
            out.add_term(idx.mul(m), c2);
        }
        out
    }

    /// Re-truncate to a smaller order.
    pub fn truncated(&self, trunc: Trunc) -> Self {
        let mut out = Self::zero(trunc);
        for (idx, c) in &self.terms {
            out.add_term(idx.clone(), c.clone());
        }
        out
    }

    /// Formal partial derivative in the u-variable `sector`.
    pub fn deriv_u(&self, sector: u16) -> Self {
        let mut out = Self::zero(self.trunc);
        for (idx, c) in &self.terms {
            let e = idx.u.exponent(sector);
            if e == 0 {
                continue;
            }
            let mut idx2 = idx.clone();
            idx2.u = idx2
                .u
                .try_div(&Mono::var(sector))
                .expect("positive exponent");
            let mut c2 = c.clone();
            c2.scale(&Rat::from_integer(e.into()));
            out.add_term(idx2, c2);
        }
        out
    }

    /// Formal partial derivative in the t-variable `sector`.
    pub fn deriv_t(&self, sector: u16) -> Self {
        let mut out = Self::zero(self.trunc);
        for (idx, c) in &self.terms {
            let e = idx.t.exponent(sector);
            if e == 0 {
                continue;
            }
            let mut idx2 = idx.clone();
            idx2.t = idx2
                .t
                .try_div(&Mono::var(sector))
                .expect("positive exponent");
            let mut c2 = c.clone();
            c2.scale(&Rat::from_integer(e.into()));
            out.add_term(idx2, c2);
        }
        out
    }

    /// Module action of a scalar series (convolution, truncated).
    pub fn mul_scalar_series(&self, scalar: &GradedSeries<Rat>) -> Self {
        let trunc = self.trunc.meet(&scalar.trunc);
        let mut out = Self::zero(trunc);
        for (ia, ca) in &self.terms {
            for (ib, cb) in scalar.terms() {
                let idx = ia.mul(ib);
                if !trunc.admits(&idx) {
                    continue;
                }
                let mut c = ca.clone();
                c.scale(cb);
                out.add_term(idx, c);
            }
        }
        out
    }

    /// Drop every term containing the u-variable `sector`.
    pub fn restrict_u_zero(&self, sector: u16) -> Self {
        let mut out = Self::zero(self.trunc);
        for (idx, c) in &self.terms {
            if idx.u.exponent(sector) == 0 {
                out.add_term(idx.clone(), c.clone());
            }
        }
        out
    }
}

impl GradedSeries<Rat> {
    pub fn one(trunc: Trunc) -> Self {
        Self::constant(Rat::from_integer(1.into()), trunc)
    }

    /// Full ring product, truncated to the meet of the input truncations.
    pub fn mul(&self, other: &Self) -> Self {
        other.mul_scalar_series(self)
    }

    /// Reciprocal of a unit series: `self * result = 1` up to truncation.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let c0 = self.constant_term();
        if Zero::is_zero(&c0) {
            return Err(SeriesError::NotInvertible);
        }
        let c0_inv = c0.recip();
        // self = c0 (1 + h): 1/self = Σ_k (-h)^k / c0.
        let mut h = self.scaled(&c0_inv);
        h.add_term(MultiIndex::one(), -Rat::from_integer(1.into()));
        h.negate(); // now holds -h
        let depth = (self.trunc.u_deg + self.trunc.t_deg) as usize + 1;
        let mut acc = Self::one(self.trunc);
        let mut pow = Self::one(self.trunc);
        for _ in 0..depth {
            pow = pow.mul(&h);
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow);
        }
        acc.scale(&c0_inv);
        Ok(acc)
    }
}

impl GradedSeries<StateVec> {
    pub fn basis_term(idx: MultiIndex, sector: u16, c: Rat, trunc: Trunc) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(idx, StateVec::scaled_basis(sector, c));
        s
    }

    /// Component along a basis sector, as a scalar series.
    pub fn component(&self, sector: u16) -> GradedSeries<Rat> {
        let mut out = GradedSeries::zero(self.trunc);
        for (idx, v) in &self.terms {
            let c = v.component(sector);
            if !Zero::is_zero(&c) {
                out.add_term(idx.clone(), c);
            }
        }
        out
    }

    /// Sectors appearing anywhere in the series.
    pub fn sectors(&self) -> std::collections::BTreeSet<u16> {
        let mut s = std::collections::BTreeSet::new();
        for v in self.terms.values() {
            s.extend(v.0.keys().copied());
        }
        s
    }

    /// Keep only components on sectors satisfying the predicate.
    pub fn retain_sectors(&mut self, keep: impl Fn(u16) -> bool) {
        let keys: Vec<MultiIndex> = self.terms.keys().cloned().collect();
        for k in keys {
            let v = self.terms.get_mut(&k).unwrap();
            v.retain_sectors(|s| keep(s));
            if v.is_zero() {
                self.terms.remove(&k);
            }
        }
    }
}

/// Either kind of series, for the generic product entry point.
#[derive(Clone, Debug)]
pub enum SeriesValue {
    Scalar(GradedSeries<Rat>),
    State(GradedSeries<StateVec>),
}

/// Generic bilinear product. Scalar-scalar and scalar-state multiply; a
/// state-by-state product without a declared rule is an error.
pub fn series_mul(a: &SeriesValue, b: &SeriesValue) -> Result<SeriesValue, SeriesError> {
    match (a, b) {
        (SeriesValue::Scalar(x), SeriesValue::Scalar(y)) => Ok(SeriesValue::Scalar(x.mul(y))),
        (SeriesValue::Scalar(s), SeriesValue::State(v))
        | (SeriesValue::State(v), SeriesValue::Scalar(s)) => {
            Ok(SeriesValue::State(v.mul_scalar_series(s)))
        }
        (SeriesValue::State(_), SeriesValue::State(_)) => {
            Err(SeriesError::StateProductUndeclared)
        }
    }
}

/// Product of two state-valued series under an explicit sector product rule
/// (the group product of the state space).
pub fn mul_states_with_rule(
    a: &GradedSeries<StateVec>,
    b: &GradedSeries<StateVec>,
    rule: impl Fn(u16, u16) -> u16,
) -> GradedSeries<StateVec> {
    let trunc = a.trunc.meet(&b.trunc);
    let mut out = GradedSeries::zero(trunc);
    for (ia, va) in a.terms() {
        for (ib, vb) in b.terms() {
            let idx = ia.mul(ib);
            if !trunc.admits(&idx) {
                continue;
            }
            let mut v = StateVec::default();
            for (ka, ca) in va.support() {
                for (kb, cb) in vb.support() {
                    v.insert_add(rule(*ka, *kb), ca * cb);
                }
            }
            out.add_term(idx, v);
        }
    }
    out
}
