//! Extraction of the primary coordinate sigma from the big I-function and
//! the change of variables to the descendant generating function at the
//! unweighted chamber.
//!
//! The point family I(u) determines, at each u, the ruling subspace spanned
//! by { z^{p-1} I, z^p d_{u^c} I : p >= 1 }. Eliminating all z-powers >= 2
//! and the z^1 deviation from phi_0, order by order in weighted u-degree,
//! lands on the unique point z phi_0 + sigma(u) + O(1/z); reverting sigma
//! expresses the point in the primary coordinate.

use super::ConeError;
use crate::ifun::{big_i, SeriesOrders};
use crate::model::FermatModel;
use crate::rat::{rat_int, Rat};
use crate::series::{
    compose, reversion, Coeff, GradedSeries, Mono, MultiIndex, StateVec, Substitution, Trunc,
    VarKind, Window, ZSeries,
};
use num_traits::{One, Signed};
use std::collections::BTreeMap;

/// Result of the cone-slice extraction.
pub struct SigmaData {
    /// Components of sigma(u), narrow sector -> scalar series; sigma = u + O(wdeg 2).
    pub sigma: BTreeMap<u16, GradedSeries<Rat>>,
    /// The point z phi_0 + sigma(u) + O(1/z), in the same u coordinates.
    pub point: ZSeries<StateVec>,
}

fn correction_generator(
    base: &ZSeries<StateVec>,
    p: i32,
    c: u16,
    window: Window,
) -> ZSeries<StateVec> {
    if c == 0 {
        base.windowed(window).shift_z(p - 1).windowed(window)
    } else {
        base.windowed(window).deriv_u(c).shift_z(p).windowed(window)
    }
}

/// Find sigma(u) and the eliminated point. `big_i` must be narrow-projected
/// with u = 0 slice exactly z phi_0.
pub fn sigma_extract(
    model: &FermatModel,
    big_i: &ZSeries<StateVec>,
) -> Result<SigmaData, ConeError> {
    let trunc = big_i.trunc;
    for (j, g) in big_i.iter() {
        let c = g.constant_term();
        if *j == 1 {
            if c != StateVec::basis(0) {
                return Err(ConeError::BadConeInput(
                    "u = 0 slice of the I-series must be z phi_0".into(),
                ));
            }
        } else if !Coeff::is_zero(&c) {
            return Err(ConeError::BadConeInput(
                "u = 0 slice of the I-series must be z phi_0".into(),
            ));
        }
    }
    // eliminations with z^{p-1} I can climb in z by deg(phi_i) - 1 per unit
    // of weight consumed; widen the working window accordingly
    let climb: i64 = model
        .narrow()
        .iter()
        .filter(|&&i| i > 0)
        .map(|&i| {
            let dd = model.ddeg(i) - model.degree() as i64;
            if dd <= 0 {
                0
            } else {
                (dd * trunc.u_deg as i64).div_euclid(model.degree() as i64 * i as i64) + 1
            }
        })
        .max()
        .unwrap_or(0);
    let top = big_i.window.max.max(1) + climb as i32;
    let window = Window::new(big_i.window.min, top);
    let mut point = big_i.windowed(window);
    let mut gen_cache: BTreeMap<(i32, u16), ZSeries<StateVec>> = BTreeMap::new();
    for nu in 1..=trunc.u_deg {
        for p in (1..=top).rev() {
            // snapshot the error cells at (z^p, weighted degree nu)
            let mut errors: Vec<(MultiIndex, u16, Rat)> = Vec::new();
            let coeff = point.coefficient(p);
            for (idx, v) in coeff.terms() {
                if idx.u.weighted_degree() != nu {
                    continue;
                }
                for (&c, val) in v.support() {
                    errors.push((idx.clone(), c, val.clone()));
                }
            }
            for (idx, c, val) in errors {
                if !model.is_narrow(c) {
                    return Err(ConeError::BroadContent(c));
                }
                let gen = gen_cache
                    .entry((p, c))
                    .or_insert_with(|| correction_generator(big_i, p, c, window));
                let corr = gen.map_coeffs(trunc, |g| g.mul_monomial(&idx, &val));
                point = point.sub(&corr);
            }
            debug_assert!(point
                .coefficient(p)
                .terms()
                .all(|(idx, _)| idx.u.weighted_degree() != nu));
        }
    }
    // the eliminated point must now have the slice shape
    if let Some(max) = point.max_power() {
        if max >= 2 {
            return Err(ConeError::EliminationStuck(
                "z-powers >= 2 survived the triangular solve".into(),
            ));
        }
    }
    let z1 = point.coefficient(1);
    for (idx, v) in z1.terms() {
        let ok = idx.is_one() && v == &StateVec::basis(0);
        if !ok {
            return Err(ConeError::EliminationStuck(
                "z^1 coefficient did not reduce to phi_0".into(),
            ));
        }
    }
    let sigma_vec = point.coefficient(0);
    let mut sigma = BTreeMap::new();
    for &c in model.narrow() {
        let comp = sigma_vec.component(c);
        sigma.insert(c, comp);
    }
    // sigma(u) = u + terms of weighted degree >= 2
    for (&c, comp) in &sigma {
        for (idx, val) in comp.terms() {
            if idx == &MultiIndex::u_var(c) {
                if val != &Rat::one() {
                    return Err(ConeError::SigmaShape(c));
                }
            } else if idx.u.weighted_degree() < 2 || idx.u.count() < 2 {
                return Err(ConeError::SigmaShape(c));
            }
        }
        if comp.coefficient(&MultiIndex::u_var(c)) != Rat::one() {
            return Err(ConeError::SigmaShape(c));
        }
    }
    Ok(SigmaData { sigma, point })
}

/// The descendant generating function at the unweighted chamber, expressed
/// in the primary coordinate, together with its one-descendant-slot
/// negative part.
pub struct BigJ {
    pub sigma: BTreeMap<u16, GradedSeries<Rat>>,
    pub sigma_inv: BTreeMap<u16, GradedSeries<Rat>>,
    /// Negative-part coefficients: (primary monomial, z-depth) -> state value.
    pub neg: BTreeMap<(Mono, u32), StateVec>,
    /// Completeness box of `neg`.
    pub t_deg: u32,
    pub depth: u32,
}

impl BigJ {
    /// `Some(value)` when the slot lies inside the completeness box (absent
    /// slots are exact zeros there), `None` outside.
    pub fn lookup(&self, m: &Mono, j: u32) -> Option<StateVec> {
        if m.trunc_degree() > self.t_deg || j > self.depth {
            return None;
        }
        Some(
            self.neg
                .get(&(m.clone(), j))
                .cloned()
                .unwrap_or_default(),
        )
    }
}

/// Build the primary-coordinate point from the hypergeometric series.
///
/// The elimination multiplies I-content by powers of z, so coefficients of
/// the result at depth j draw on I-coefficients down to j plus the largest
/// positive power in play; the series is enumerated on that deeper window
/// and only the requested depth is kept.
pub fn big_j(model: &FermatModel, orders: &SeriesOrders) -> Result<BigJ, ConeError> {
    let probe_orders = SeriesOrders::new(orders.u_deg, 0);
    let (probe, _) = big_i(model, &probe_orders);
    let zmax = probe.max_power().unwrap_or(1).max(1);
    let climb: i64 = model
        .narrow()
        .iter()
        .filter(|&&i| i > 0)
        .map(|&i| {
            let dd = model.ddeg(i) - model.degree() as i64;
            if dd <= 0 {
                0
            } else {
                (dd * orders.u_deg as i64).div_euclid(model.degree() as i64 * i as i64) + 1
            }
        })
        .max()
        .unwrap_or(0);
    let deep = orders.z_neg + (zmax as i64 + climb) as u32;
    let deep_orders = SeriesOrders::new(orders.u_deg, deep);
    let (mut bi, _) = big_i(model, &deep_orders);
    bi.retain_sectors(|s| model.is_narrow(s));
    let sd = sigma_extract(model, &bi)?;
    let trunc = Trunc::u_only(orders.u_deg);
    let sigma_inv = reversion(&sd.sigma, trunc)?;
    let subst: Substitution = sigma_inv
        .iter()
        .map(|(&i, s)| ((VarKind::U, i), s.clone()))
        .collect();
    let mut composed = ZSeries::zero(trunc, sd.point.window);
    for (j, g) in sd.point.iter() {
        composed.add_term(*j, compose(g, &subst, trunc)?);
    }
    // the regular part must collapse to z phi_0 + (identity coordinate)
    let z1 = composed.coefficient(1);
    let z1_ok = z1.len() == 1 && z1.constant_term() == StateVec::basis(0);
    let mut ident = GradedSeries::<StateVec>::zero(trunc);
    for &i in model.narrow() {
        ident.add_term(MultiIndex::u_var(i), StateVec::basis(i));
    }
    if !z1_ok || composed.coefficient(0) != ident || composed.max_power() != Some(1) {
        return Err(ConeError::Internal(
            "composed point does not have the graph shape z phi_0 + t + O(1/z)".into(),
        ));
    }
    let mut neg = BTreeMap::new();
    for (j, g) in composed.iter() {
        if *j >= 0 {
            continue;
        }
        let depth = (-*j) as u32;
        if depth > orders.z_neg {
            // beyond the completeness guarantee of the deep window
            continue;
        }
        for (idx, v) in g.terms() {
            neg.insert((idx.u.clone(), depth), v.clone());
        }
    }
    Ok(BigJ {
        sigma: sd.sigma,
        sigma_inv,
        neg,
        t_deg: orders.u_deg,
        depth: orders.z_neg,
    })
}

/// Integer-arithmetic selection rules for a negative-part component.
///
/// A coefficient at (primary monomial m, light monomial n, component c) can
/// be nonzero only when c is narrow, the divisibility rule holds, and the
/// Witten degree is a nonnegative integer; that degree pins the unique
/// z-depth 1 + wd at which the component lives.
pub fn pinned_depth(model: &FermatModel, m: &Mono, n: &Mono, c: u16) -> Option<u32> {
    if !model.is_narrow(c) {
        return None;
    }
    let d = model.degree() as i64;
    let dual = model.dual(c) as i64;
    let mut sector_sum = dual;
    let mut count: i64 = 1;
    let mut ddeg_sum: i64 = model.ddeg(model.dual(c));
    for &(s, e) in m.pairs().iter().chain(n.pairs()) {
        if !model.is_narrow(s) {
            return None;
        }
        sector_sum += s as i64 * e as i64;
        count += e as i64;
        ddeg_sum += model.ddeg(s) * e as i64;
    }
    if (2 + sector_sum) % d != 0 {
        return None;
    }
    // d * wd = d(N - 3) - 2 dq + d*count - sum d*deg
    let dwd = d * (model.num_variables() as i64 - 3) - 2 * model.dq() + d * count - ddeg_sum;
    if dwd % d != 0 {
        return None;
    }
    let wd = dwd / d;
    if wd < 0 {
        return None;
    }
    let j = wd + 1;
    u32::try_from(j).ok()
}

/// Verbatim rational-arithmetic route for the same selection data; used to
/// cross-check the integer fast path.
pub fn pinned_depth_slow(model: &FermatModel, m: &Mono, n: &Mono, c: u16) -> Option<u32> {
    use crate::model::{witten_degree, CorrelatorKey, Epsilon};
    if !model.is_narrow(c) {
        return None;
    }
    let mut heavy: Vec<(u16, u32)> = vec![(model.dual(c), 0)];
    let mut light: Vec<u16> = Vec::new();
    for &(s, e) in m.pairs() {
        if !model.is_narrow(s) {
            return None;
        }
        heavy.extend(std::iter::repeat((s, 0)).take(e as usize));
    }
    for &(s, e) in n.pairs() {
        if !model.is_narrow(s) {
            return None;
        }
        light.extend(std::iter::repeat(s).take(e as usize));
    }
    let d = model.degree() as i64;
    let sector_sum: i64 = heavy.iter().map(|&(k, _)| k as i64).sum::<i64>()
        + light.iter().map(|&l| l as i64).sum::<i64>();
    if (2 + sector_sum) % d != 0 {
        return None;
    }
    let key = CorrelatorKey::new(heavy, light, Epsilon::Zero);
    let wd = witten_degree(model, &key);
    if !crate::rat::is_integer(&wd) || wd.is_negative() {
        return None;
    }
    let j = crate::rat::to_i64(&(wd + rat_int(1))).unwrap();
    u32::try_from(j).ok()
}
