//! Machine verification: the regularity criterion, fault injection, and
//! cross-chamber transport.

use super::reconstruct::{ConePoint, SlotKey};
use super::ConeError;
use crate::ifun::RegularParts;
use crate::model::FermatModel;
use crate::rat::{format_rat, Rat};
use crate::series::{
    compose, Coeff, GradedSeries, Mono, MultiIndex, StateVec, Substitution, Trunc, VarKind,
    Window, ZSeries,
};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

/// One nonzero coefficient of the pairing series at a strictly negative
/// z-power, within the conclusive range.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityViolation {
    pub r: u16,
    pub s: u16,
    pub t_mono: String,
    pub u_mono: String,
    pub depth: u32,
    pub value: String,
}

#[derive(Debug, Default, Serialize)]
pub struct RegularityReport {
    pub pairs_checked: usize,
    pub coefficients_checked: usize,
    pub complete_note: String,
    pub violations: Vec<RegularityViolation>,
}

impl RegularityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.coefficients_checked > 0
    }
}

fn sign(j: u32) -> i64 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Evaluate the pairing series of one (r, s) relation over the stored data
/// and collect its strictly negative coefficients on the conclusive range.
///
/// The evaluation is a plain sparse convolution over the stored slots; in
/// particular it shares no selection-rule logic with the solver that
/// produced them.
fn regularity_pair(
    model: &FermatModel,
    point: &ConePoint,
    r: u16,
    s: u16,
) -> (usize, Vec<RegularityViolation>) {
    let req = point.request;
    let dual_s = model.dual(s);
    let mut acc: BTreeMap<(Mono, Mono, u32), Rat> = BTreeMap::new();
    let accumulate = |acc: &mut BTreeMap<(Mono, Mono, u32), Rat>,
                          m: Mono,
                          n: Mono,
                          j: u32,
                          v: Rat| {
        if Coeff::is_zero(&v) {
            return;
        }
        let e = acc.entry((m, n, j)).or_insert_with(|| Coeff::zero());
        e.add_ref(&v);
    };
    // f-term list of the regular shift
    let mut f_terms: Vec<(Mono, u32, StateVec)> = Vec::new();
    let mut f_max_p: i64 = 0;
    for (p, g) in point.f_reg.iter() {
        for (idx, v) in g.terms() {
            f_terms.push((idx.u.clone(), *p as u32, v.clone()));
            f_max_p = f_max_p.max(*p as i64);
        }
    }
    // derivative of the negative part against phi_s
    for (key, v) in &point.slots {
        let er = key.u.exponent(r);
        if er >= 1 {
            let n = key.u.try_div(&Mono::var(r)).unwrap();
            let val = v.component(dual_s) * Rat::from_integer((er as i64).into());
            accumulate(&mut acc, key.t.clone(), n, key.depth, val);
        }
    }
    // regular shift against the primary derivative of the negative part
    for (a, p, vf) in &f_terms {
        let ar = a.exponent(r);
        if ar == 0 {
            continue;
        }
        let a_red = a.try_div(&Mono::var(r)).unwrap();
        for (key, w) in &point.slots {
            let ms = key.t.exponent(s);
            if ms == 0 || key.depth <= *p {
                continue;
            }
            let m = key.t.try_div(&Mono::var(s)).unwrap();
            let j = key.depth - p;
            let n = a_red.mul(&key.u);
            let mut pairing = Rat::from_integer(0.into());
            for (&cf, cv) in vf.support() {
                pairing += cv * w.component(model.dual(cf));
            }
            let mult = ar as i64 * ms as i64 * sign(key.depth);
            accumulate(
                &mut acc,
                m,
                n,
                j,
                pairing * Rat::from_integer(mult.into()),
            );
        }
    }
    // negative part against negative part
    let slots: Vec<(&SlotKey, &StateVec)> = point.slots.iter().collect();
    for (k1, v1) in &slots {
        let er = k1.u.exponent(r);
        if er == 0 {
            continue;
        }
        let n1 = k1.u.try_div(&Mono::var(r)).unwrap();
        for (k2, v2) in &slots {
            let ms = k2.t.exponent(s);
            if ms == 0 {
                continue;
            }
            let m2 = k2.t.try_div(&Mono::var(s)).unwrap();
            let mut pairing = Rat::from_integer(0.into());
            for (&c1, a) in v1.support() {
                pairing += a * v2.component(model.dual(c1));
            }
            if Coeff::is_zero(&pairing) {
                continue;
            }
            let mult = er as i64 * ms as i64 * sign(k2.depth);
            accumulate(
                &mut acc,
                k1.t.mul(&m2),
                n1.mul(&k2.u),
                k1.depth + k2.depth,
                pairing * Rat::from_integer(mult.into()),
            );
        }
    }
    // conclusive range: every reference the relation at (m, n, j) makes must
    // lie inside the request box and away from poisoned slots
    let conclusive = |m: &Mono, n: &Mono, j: u32| -> bool {
        if m.count() + 1 > req.t_deg && req.t_deg > 0 {
            return false;
        }
        if req.t_deg == 0 && m.count() > 0 {
            return false;
        }
        if n.trunc_degree() + (r as u32).max(1) > req.u_deg {
            return false;
        }
        if j > req.z_neg {
            return false;
        }
        // depth reach through the regular shift
        for (a, p, _) in &f_terms {
            if a.exponent(r) >= 1 {
                let a_red = a.try_div(&Mono::var(r)).unwrap();
                if a_red.divides_into(n) && j + p > req.z_neg {
                    return false;
                }
            }
        }
        // poisoned slots inside the reference region poison the relation
        for pk in &point.poisoned {
            let t_ok = pk.t.count() <= m.count() + 1;
            let u_ok = pk.u.trunc_degree() <= n.trunc_degree() + (r as u32).max(1);
            let z_ok = pk.depth as i64 <= j as i64 + f_max_p;
            if t_ok && u_ok && z_ok {
                return false;
            }
        }
        true
    };
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for ((m, n, j), v) in &acc {
        if !conclusive(m, n, *j) {
            continue;
        }
        checked += 1;
        if !Coeff::is_zero(v) {
            violations.push(RegularityViolation {
                r,
                s,
                t_mono: format!("{:?}", m),
                u_mono: format!("{:?}", n),
                depth: *j,
                value: format_rat(v),
            });
        }
    }
    (checked, violations)
}

/// Run the regularity criterion for every narrow (r, s) pair.
pub fn regularity_check(model: &FermatModel, point: &ConePoint) -> RegularityReport {
    let narrow: Vec<u16> = model.narrow().iter().copied().collect();
    let pairs: Vec<(u16, u16)> = narrow
        .iter()
        .flat_map(|&r| narrow.iter().map(move |&s| (r, s)))
        .collect();
    let results: Vec<(usize, Vec<RegularityViolation>)> = pairs
        .par_iter()
        .map(|&(r, s)| regularity_pair(model, point, r, s))
        .collect();
    let mut report = RegularityReport {
        pairs_checked: pairs.len(),
        complete_note: format!(
            "coefficients conclusive within t-deg {} u-deg {} depth {}",
            point.request.t_deg, point.request.u_deg, point.request.z_neg
        ),
        ..Default::default()
    };
    for (checked, mut violations) in results {
        report.coefficients_checked += checked;
        report.violations.append(&mut violations);
    }
    report
}

/// Perturb one stored coefficient by +1 on the given component. Used by the
/// fault-detection checks.
pub fn inject_fault(point: &ConePoint, key: &SlotKey, component: u16) -> ConePoint {
    let mut slots = point.slots.clone();
    slots
        .entry(key.clone())
        .or_default()
        .insert_add(component, Rat::from_integer(1.into()));
    ConePoint {
        f_reg: point.f_reg.clone(),
        slots,
        poisoned: point.poisoned.clone(),
        request: point.request,
    }
}

/// Assemble the full generating-function series of a point:
/// z phi_0 + (primary coordinate) + regular shift + negative part.
pub fn point_series(
    model: &FermatModel,
    point: &ConePoint,
    trunc: Trunc,
) -> ZSeries<StateVec> {
    let f_max = point.f_reg.max_power().unwrap_or(0).max(1);
    let window = Window::new(-(point.request.z_neg as i32), f_max);
    let mut out = ZSeries::zero(trunc, window);
    // t sits at z^0, z phi_0 at z^1
    let mut z0 = GradedSeries::zero(trunc);
    for &k in model.narrow() {
        z0.add_term(
            MultiIndex {
                u: Mono::one(),
                t: Mono::var(k),
            },
            StateVec::basis(k),
        );
    }
    out.add_term(0, z0);
    let mut z1 = GradedSeries::zero(trunc);
    z1.add_term(MultiIndex::one(), StateVec::basis(0));
    out.add_term(1, z1);
    for (p, g) in point.f_reg.iter() {
        out.add_term(*p, g.truncated(trunc));
    }
    for (key, v) in &point.slots {
        let mut g = GradedSeries::zero(trunc);
        g.add_term(
            MultiIndex {
                u: key.u.clone(),
                t: key.t.clone(),
            },
            v.clone(),
        );
        out.add_term(-(key.depth as i32), g);
    }
    out
}

/// The transported series J(tau(t, u), u, z) / J_0(u) with the z^0 part of
/// tau substituted; positive-z descendant directions of tau are out of
/// scope and bounded away by the returned weight limit.
fn transported(
    model: &FermatModel,
    point: &ConePoint,
    parts: &RegularParts,
    trunc: Trunc,
) -> Result<(ZSeries<StateVec>, u32), ConeError> {
    let series = point_series(model, point, trunc);
    let j1_z0 = parts.j1.coefficient(0);
    let mut subst: Substitution = BTreeMap::new();
    for &k in model.narrow() {
        let tk = {
            let mut s = GradedSeries::<Rat>::zero(trunc);
            s.add_term(MultiIndex::t_var(k), Rat::from_integer(1.into()));
            s
        };
        let mut image = parts.j0.truncated(trunc).mul(&tk);
        let mut corr = j1_z0.component(k).truncated(trunc);
        corr.negate();
        image = image.add(&corr);
        subst.insert((VarKind::T, k), image);
    }
    let mut composed = ZSeries::zero(trunc, series.window);
    for (j, g) in series.iter() {
        composed.add_term(*j, compose(g, &subst, trunc)?);
    }
    let j0_inv = parts.j0.truncated(trunc).invert()?;
    let scaled = composed.mul_scalar_series(&j0_inv);
    // least weight of any dropped positive-z tau direction
    let mut w_drop = u32::MAX;
    for (p, g) in parts.j1.iter() {
        if *p <= 0 {
            continue;
        }
        for (idx, _) in g.terms() {
            w_drop = w_drop.min(idx.u.weighted_degree());
        }
    }
    Ok((scaled, w_drop))
}

#[derive(Debug, Serialize)]
pub struct TransportReport {
    pub compared: usize,
    pub mismatches: Vec<String>,
    pub u_wdeg_limit: u32,
    pub t_budget: u32,
    pub note: String,
}

impl TransportReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.compared > 0
    }
}

/// Compare the transported series of two chambers coefficient by
/// coefficient on the range where both are complete and independent of the
/// dropped descendant directions.
pub fn transport_check(
    model: &FermatModel,
    side1: (&ConePoint, &RegularParts),
    side2: (&ConePoint, &RegularParts),
) -> Result<TransportReport, ConeError> {
    let req1 = side1.0.request;
    let req2 = side2.0.request;
    let t_deg = req1.t_deg.min(req2.t_deg);
    let u_deg = req1.u_deg.min(req2.u_deg);
    let z_neg = req1.z_neg.min(req2.z_neg);
    let trunc = Trunc::new(u_deg, t_deg);
    let (lhs, drop1) = transported(model, side1.0, side1.1, trunc)?;
    let (rhs, drop2) = transported(model, side2.0, side2.1, trunc)?;
    let mut u_limit = drop1.min(drop2);
    if u_limit != u32::MAX {
        u_limit -= 1;
    }
    let mut u_limit = u_limit.min(u_deg);
    for p in side1.0.poisoned.iter().chain(side2.0.poisoned.iter()) {
        u_limit = u_limit.min(p.u.weighted_degree().saturating_sub(1));
    }
    let diff = lhs.sub(&rhs);
    let mut compared = 0usize;
    let mut mismatches = Vec::new();
    for (z, g) in diff.iter() {
        for (idx, v) in g.terms() {
            if idx.u.weighted_degree() > u_limit {
                continue;
            }
            if idx.t.count() + idx.u.weighted_degree() > t_deg {
                continue;
            }
            if *z < -(z_neg as i32) {
                continue;
            }
            if !v.is_zero() {
                mismatches.push(format!(
                    "z^{} t {:?} u {:?}: {:?}",
                    z, idx.t, idx.u, v
                ));
            }
        }
    }
    // count the cells examined (union of both supports on the range)
    let mut cells = std::collections::BTreeSet::new();
    for side in [&lhs, &rhs] {
        for (z, g) in side.iter() {
            for (idx, _) in g.terms() {
                if idx.u.weighted_degree() <= u_limit
                    && idx.t.count() + idx.u.weighted_degree() <= t_deg
                    && *z >= -(z_neg as i32)
                {
                    cells.insert((*z, idx.clone()));
                }
            }
        }
    }
    compared += cells.len();
    Ok(TransportReport {
        compared,
        mismatches,
        u_wdeg_limit: u_limit,
        t_budget: t_deg,
        note: "comparison restricted to coefficients independent of positive-z tau directions"
            .into(),
    })
}
