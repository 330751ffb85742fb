//! Fermat polynomial combinatorics: charges, narrow sector, pairing, degrees,
//! group product, and the moduli selection rules used as vanishing predicates.

use crate::rat::{format_rat, frac, is_integer, parse_rat, rat_int, to_i64, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("weights must be nonempty")]
    EmptyWeights,
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(u64),
    #[error("gcd(w_1,...,w_N,d) = {0} != 1")]
    GcdNotOne(u64),
    #[error("weight {0} does not divide the degree {1} (not Fermat)")]
    NotFermat(u64, u64),
    #[error("weight {0} exceeds the degree {1}")]
    ChargeAboveOne(u64, u64),
    #[error("index {0} is outside the sector range 0..{1}")]
    SectorOutOfRange(u16, u64),
    #[error("pairing requested on broad index {0}")]
    BroadPairing(u16),
    #[error("invalid epsilon: {0}")]
    BadEpsilon(String),
}

/// Stability parameter. Any rational above 1 is normalized to `Infinity` at
/// construction; `Zero` is the small-stability limit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Epsilon {
    Infinity,
    Zero,
    Finite(Rat),
}

impl Epsilon {
    /// Parse `"infinity"`, `"zero"` or an exact rational `p/q > 0`.
    pub fn parse(s: &str) -> Result<Self, ModelError> {
        match s.trim() {
            "infinity" | "inf" | "oo" => Ok(Epsilon::Infinity),
            "zero" | "0" => Ok(Epsilon::Zero),
            other => {
                let r = parse_rat(other).ok_or_else(|| ModelError::BadEpsilon(other.into()))?;
                Epsilon::from_rat(r)
            }
        }
    }

    pub fn from_rat(r: Rat) -> Result<Self, ModelError> {
        if !r.is_positive() {
            return Err(ModelError::BadEpsilon(format!(
                "epsilon must be positive, got {}",
                format_rat(&r)
            )));
        }
        if r > rat_int(1) {
            Ok(Epsilon::Infinity)
        } else {
            Ok(Epsilon::Finite(r))
        }
    }

    /// The unstable-sum cap `ceil(1/eps)`; `None` encodes the uncapped
    /// small-stability limit.
    pub fn cap(&self) -> Option<u32> {
        match self {
            Epsilon::Infinity => Some(1),
            Epsilon::Zero => None,
            Epsilon::Finite(r) => {
                let c = crate::rat::ceil_div(r.denom(), r.numer());
                Some(u32::try_from(c).expect("cap fits in u32"))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Epsilon::Infinity => "infinity".into(),
            Epsilon::Zero => "zero".into(),
            Epsilon::Finite(r) => format_rat(r),
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// JSON model spec file: `{ "weights": [...], "degree": d }`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct ModelSpec {
    pub weights: Vec<u64>,
    pub degree: u64,
}

/// Combinatorial data of a Fermat polynomial W = sum x_j^{d/w_j} together
/// with its extended state space.
#[derive(Clone, Debug)]
pub struct FermatModel {
    weights: Vec<u64>,
    degree: u64,
    charges: Vec<Rat>,
    total_charge: Rat,
    narrow: BTreeSet<u16>,
    degrees: Vec<Rat>,
}

impl FermatModel {
    pub fn build(weights: &[u64], degree: u64) -> Result<Self, ModelError> {
        if weights.is_empty() {
            return Err(ModelError::EmptyWeights);
        }
        if degree < 2 {
            return Err(ModelError::DegreeTooSmall(degree));
        }
        let mut g = degree;
        for &w in weights {
            g = g.gcd(&w);
        }
        if g != 1 {
            return Err(ModelError::GcdNotOne(g));
        }
        for &w in weights {
            if w > degree {
                return Err(ModelError::ChargeAboveOne(w, degree));
            }
            if degree % w != 0 {
                return Err(ModelError::NotFermat(w, degree));
            }
        }
        let charges: Vec<Rat> = weights
            .iter()
            .map(|&w| Rat::new(BigInt::from(w), BigInt::from(degree)))
            .collect();
        let total_charge = charges.iter().fold(Rat::zero(), |a, b| a + b);
        let mut narrow = BTreeSet::new();
        for k in 0..degree as u16 {
            let all_nonzero = charges
                .iter()
                .all(|q| !frac(&(q * rat_int(k as i64 + 1))).is_zero());
            if all_nonzero {
                narrow.insert(k);
            }
        }
        let degrees: Vec<Rat> = (0..degree as u16)
            .map(|k| {
                charges
                    .iter()
                    .map(|q| frac(&(q * rat_int(k as i64))))
                    .fold(Rat::zero(), |a, b| a + b)
            })
            .collect();
        Ok(FermatModel {
            weights: weights.to_vec(),
            degree,
            charges,
            total_charge,
            narrow,
            degrees,
        })
    }

    pub fn from_spec(spec: &ModelSpec) -> Result<Self, ModelError> {
        Self::build(&spec.weights, spec.degree)
    }

    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            weights: self.weights.clone(),
            degree: self.degree,
        }
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn d(&self) -> u16 {
        self.degree as u16
    }

    pub fn num_variables(&self) -> usize {
        self.weights.len()
    }

    pub fn charges(&self) -> &[Rat] {
        &self.charges
    }

    pub fn total_charge(&self) -> &Rat {
        &self.total_charge
    }

    pub fn narrow(&self) -> &BTreeSet<u16> {
        &self.narrow
    }

    pub fn is_narrow(&self, k: u16) -> bool {
        self.narrow.contains(&k)
    }

    /// deg(phi_k) = sum_j <q_j k>.
    pub fn state_degree(&self, k: u16) -> &Rat {
        &self.degrees[k as usize]
    }

    /// The dual index d-2-k of a narrow index under the perfect pairing.
    pub fn dual(&self, k: u16) -> u16 {
        (self.degree as i64 - 2 - k as i64).rem_euclid(self.degree as i64) as u16
    }

    /// (phi_i, phi_j) = delta_{i+j, d-2}; only defined on narrow indices.
    pub fn pairing(&self, i: u16, j: u16) -> Result<Rat, ModelError> {
        for k in [i, j] {
            if k as u64 >= self.degree {
                return Err(ModelError::SectorOutOfRange(k, self.degree));
            }
            if !self.is_narrow(k) {
                return Err(ModelError::BroadPairing(k));
            }
        }
        Ok(if i as u64 + j as u64 == self.degree - 2 {
            Rat::one()
        } else {
            Rat::zero()
        })
    }

    /// Group product phi_i . phi_j = phi_{i+j mod d}; the output may be broad.
    pub fn group_product(&self, i: u16, j: u16) -> u16 {
        ((i as u64 + j as u64) % self.degree) as u16
    }

    /// Chamber walls 1/n below the given bound, reported by `cmd model`.
    pub fn chamber_walls(max_n: u32) -> Vec<Rat> {
        (1..=max_n).map(|n| Rat::new(1.into(), n.into())).collect()
    }

    /// d * deg(phi_k) as an integer (deg has denominator dividing d).
    pub fn ddeg(&self, k: u16) -> i64 {
        self.weights
            .iter()
            .map(|&w| (w as i64 * k as i64) % self.degree as i64)
            .sum()
    }

    /// d * q = sum of the weights.
    pub fn dq(&self) -> i64 {
        self.weights.iter().map(|&w| w as i64).sum()
    }
}

/// One vanishing reason from the selection rules.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VanishReason {
    BroadInsertion,
    EmptyModuli,
    DegreeMismatch,
}

/// A correlator index: heavy insertions (sector, psi-power), light insertions
/// (sector only), and the stability parameter.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CorrelatorKey {
    pub heavy: Vec<(u16, u32)>,
    pub light: Vec<u16>,
    pub epsilon: Epsilon,
}

impl CorrelatorKey {
    pub fn new(heavy: Vec<(u16, u32)>, light: Vec<u16>, epsilon: Epsilon) -> Self {
        let mut k = CorrelatorKey {
            heavy,
            light,
            epsilon,
        };
        k.canonicalize();
        k
    }

    /// Sort insertions; invariants are symmetric within each group.
    pub fn canonicalize(&mut self) {
        self.heavy.sort_unstable();
        self.light.sort_unstable();
    }

    pub fn m(&self) -> usize {
        self.heavy.len()
    }

    pub fn n(&self) -> usize {
        self.light.len()
    }

    pub fn psi_total(&self) -> u32 {
        self.heavy.iter().map(|&(_, j)| j).sum()
    }
}

/// Existence of the underlying moduli space: the divisibility condition
/// 2 + sum k_i + sum l_i in dZ together with weighted stability m + n*eps > 2.
pub fn moduli_nonempty(model: &FermatModel, key: &CorrelatorKey) -> bool {
    let d = model.degree as i64;
    let sum: i64 = key.heavy.iter().map(|&(k, _)| k as i64).sum::<i64>()
        + key.light.iter().map(|&l| l as i64).sum::<i64>();
    if (2 + sum) % d != 0 {
        return false;
    }
    stability_holds(&key.epsilon, key.m(), key.n())
}

/// m + n*eps > 2, with the infinity chamber forcing n = 0 and the zero
/// chamber taking the limit of small eps.
pub fn stability_holds(eps: &Epsilon, m: usize, n: usize) -> bool {
    match eps {
        Epsilon::Infinity => n == 0 && m > 2,
        Epsilon::Zero => m > 2 || (m == 2 && n >= 1),
        Epsilon::Finite(e) => {
            let lhs = rat_int(m as i64) + rat_int(n as i64) * e;
            lhs > rat_int(2)
        }
    }
}

/// Homological degree of the Witten class:
/// N - 3 - 2q + m - sum deg(phi_{k_i}) + n - sum deg(phi_{l_i}).
pub fn witten_degree(model: &FermatModel, key: &CorrelatorKey) -> Rat {
    let n_vars = rat_int(model.num_variables() as i64);
    let mut acc = n_vars - rat_int(3) - rat_int(2) * model.total_charge();
    acc += rat_int(key.m() as i64);
    for &(k, _) in &key.heavy {
        acc -= model.state_degree(k);
    }
    acc += rat_int(key.n() as i64);
    for &l in &key.light {
        acc -= model.state_degree(l);
    }
    acc
}

/// Selection-rule vanishing: returns the reason an invariant is trivially
/// zero, or `None` when the selection rules allow it to be nonzero.
pub fn trivially_zero(model: &FermatModel, key: &CorrelatorKey) -> Option<VanishReason> {
    let broad = key
        .heavy
        .iter()
        .map(|&(k, _)| k)
        .chain(key.light.iter().copied())
        .any(|k| !model.is_narrow(k));
    if broad {
        return Some(VanishReason::BroadInsertion);
    }
    let wd = witten_degree(model, key);
    if !is_integer(&wd) || wd.is_negative() || to_i64(&wd) != Some(key.psi_total() as i64) {
        return Some(VanishReason::DegreeMismatch);
    }
    if !moduli_nonempty(model, key) {
        return Some(VanishReason::EmptyModuli);
    }
    None
}
