//! End-to-end pipelines: chamber points, their tables, and the named
//! verification checks built from them.

use super::checks::{regularity_check, transport_check, RegularityReport, TransportReport};
use super::mirror::{mirror_roundtrip_check, mirror_small};
use super::reconstruct::{reconstruct, ConePoint, RequestBox, SlotKey};
use super::sigma::{big_j, BigJ};
use super::table::{
    big_j_table, point_table, selection_sweep, string_dilaton_check, InvariantTable, OrdersMeta,
    SelectionSweepReport, StringCheckReport, TableKey,
};
use super::ConeError;
use crate::ifun::{big_i, regular_part_data, Chamber, RegularParts, SeriesOrders};
use crate::model::{Epsilon, FermatModel};
use crate::rat::Rat;
use crate::series::{
    compose, GradedSeries, Mono, MultiIndex, StateVec, Substitution, VarKind, ZSeries,
};
use serde::Serialize;
use std::collections::BTreeMap;

/// Orders for a chamber pipeline: the requested output box plus the derived
/// internal margins for the primary slice.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PipelineOrders {
    pub t_u: u32,
    pub t_t: u32,
    pub z_neg: u32,
    pub base_deg: u32,
    pub base_depth: u32,
}

impl PipelineOrders {
    /// Margins wide enough that every chain of the recursion inside the
    /// requested box resolves against the primary slice.
    pub fn derive(model: &FermatModel, t_u: u32, t_t: u32, z_neg: u32) -> Self {
        let max_sector = model.narrow().iter().copied().max().unwrap_or(0) as u32;
        let base_deg = t_u + z_neg + t_t * max_sector.max(1);
        PipelineOrders {
            t_u,
            t_t,
            z_neg,
            base_deg,
            base_depth: z_neg + t_u,
        }
    }

    pub fn with_base(mut self, base_deg: u32, base_depth: u32) -> Self {
        self.base_deg = base_deg;
        self.base_depth = base_depth;
        self
    }

    pub fn request(&self) -> RequestBox {
        RequestBox {
            u_deg: self.t_u,
            t_deg: self.t_t,
            z_neg: self.z_neg,
        }
    }

    pub fn base_orders(&self) -> SeriesOrders {
        SeriesOrders::new(self.base_deg, self.base_depth)
    }

    pub fn unstable_orders(&self) -> SeriesOrders {
        SeriesOrders::new(self.t_u, self.z_neg)
    }

    pub fn meta(&self) -> OrdersMeta {
        OrdersMeta {
            u_deg: self.t_u,
            t_deg: self.t_t,
            z_neg: self.z_neg,
        }
    }
}

/// A chamber generating function reconstructed on the requested box.
pub struct ChamberPoint {
    pub epsilon: Epsilon,
    pub chamber: Chamber,
    pub parts: RegularParts,
    pub point: ConePoint,
}

/// Reconstruct the chamber point from its closed-form regular part and the
/// primary slice.
pub fn j_epsilon(
    model: &FermatModel,
    eps: &Epsilon,
    orders: &PipelineOrders,
    base: &BigJ,
) -> Result<ChamberPoint, ConeError> {
    let chamber = Chamber::of(eps);
    let parts = regular_part_data(model, &chamber, &orders.unstable_orders());
    let mut f_reg = parts.f_eps.positive_part();
    f_reg.retain_sectors(|s| model.is_narrow(s));
    let point = reconstruct(model, &f_reg, base, &orders.request())?;
    Ok(ChamberPoint {
        epsilon: eps.clone(),
        chamber,
        parts,
        point,
    })
}

/// Build the primary slice once for a set of pipelines.
pub fn primary_slice(model: &FermatModel, orders: &PipelineOrders) -> Result<BigJ, ConeError> {
    big_j(model, &orders.base_orders())
}

/// Weighted-invariant table of a chamber point.
pub fn chamber_table(
    model: &FermatModel,
    cp: &ChamberPoint,
    orders: &PipelineOrders,
) -> Result<InvariantTable, ConeError> {
    point_table(
        model,
        &cp.point,
        &cp.epsilon,
        orders.meta(),
        &format!("j_epsilon({})", cp.epsilon.label()),
    )
}

/// Table of the unweighted chamber from the primary slice.
pub fn base_table(
    model: &FermatModel,
    base: &BigJ,
    orders: &PipelineOrders,
) -> Result<InvariantTable, ConeError> {
    big_j_table(model, base, orders.meta())
}

/// The small-stability round trip: reconstructing from the uncapped
/// regular part must regenerate the narrow projection of the
/// hypergeometric series' negative part at t = 0, slot by slot.
#[derive(Debug, Default, Serialize)]
pub struct RoundTripReport {
    pub slots_compared: usize,
    pub mismatches: Vec<String>,
    pub incomplete: usize,
}

impl RoundTripReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.slots_compared > 0
    }
}

pub fn small_stability_round_trip(
    model: &FermatModel,
    orders: &PipelineOrders,
    base: &BigJ,
) -> Result<RoundTripReport, ConeError> {
    let cp = j_epsilon(model, &Epsilon::Zero, orders, base)?;
    let (mut bi, _) = big_i(model, &orders.unstable_orders());
    bi.retain_sectors(|s| model.is_narrow(s));
    let mut report = RoundTripReport::default();
    report.incomplete = cp.point.poisoned.len();
    // direction 1: every reconstructed t = 0 slot matches the series
    for (key, v) in &cp.point.slots {
        if !key.t.is_one() {
            continue;
        }
        let idx = MultiIndex {
            u: key.u.clone(),
            t: Mono::one(),
        };
        let expect = bi.coefficient(-(key.depth as i32)).coefficient(&idx);
        report.slots_compared += 1;
        if v != &expect {
            report.mismatches.push(format!(
                "slot {:?}: reconstructed {:?}, series {:?}",
                key, v, expect
            ));
        }
    }
    // direction 2: every negative series term inside the box was rebuilt
    for (j, g) in bi.iter() {
        if *j >= 0 {
            continue;
        }
        let depth = (-*j) as u32;
        if depth > orders.z_neg {
            continue;
        }
        for (idx, v) in g.terms() {
            if idx.u.trunc_degree() > orders.t_u {
                continue;
            }
            let key = SlotKey {
                t: Mono::one(),
                u: idx.u.clone(),
                depth,
            };
            if cp.point.poisoned.contains(&key) {
                report.incomplete += 1;
                continue;
            }
            let got = cp.point.slot_value(&key);
            if &got != v {
                report.mismatches.push(format!(
                    "series term {:?} at depth {}: reconstructed {:?}, series {:?}",
                    idx, depth, got, v
                ));
            }
        }
    }
    Ok(report)
}

/// Direct-substitution consistency at the cap-1 chamber: the reconstructed
/// point must equal the primary slice with t shifted by the light
/// coordinate.
#[derive(Debug, Default, Serialize)]
pub struct ShiftCheckReport {
    pub slots_compared: usize,
    pub mismatches: Vec<String>,
}

impl ShiftCheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.slots_compared > 0
    }
}

pub fn cap_one_shift_check(
    model: &FermatModel,
    orders: &PipelineOrders,
    base: &BigJ,
) -> Result<ShiftCheckReport, ConeError> {
    let cp = j_epsilon(model, &Epsilon::Infinity, orders, base)?;
    // assemble the slice's negative part as a series in t and substitute
    // t^k -> t^k + u^k
    let trunc = crate::series::Trunc::new(orders.t_u, orders.base_deg);
    let mut slice = ZSeries::<StateVec>::zero(
        trunc,
        crate::series::Window::new(-(orders.base_depth as i32), 1),
    );
    for ((m, depth), v) in &base.neg {
        let mut g = GradedSeries::zero(trunc);
        g.add_term(
            MultiIndex {
                u: Mono::one(),
                t: m.clone(),
            },
            v.clone(),
        );
        slice.add_term(-(*depth as i32), g);
    }
    let mut subst: Substitution = BTreeMap::new();
    for &k in model.narrow() {
        let mut image = GradedSeries::<Rat>::zero(trunc);
        image.add_term(MultiIndex::t_var(k), Rat::from_integer(1.into()));
        image.add_term(MultiIndex::u_var(k), Rat::from_integer(1.into()));
        subst.insert((VarKind::T, k), image);
    }
    let mut shifted = ZSeries::zero(trunc, slice.window);
    for (j, g) in slice.iter() {
        shifted.add_term(*j, compose(g, &subst, trunc)?);
    }
    let mut report = ShiftCheckReport::default();
    for (key, v) in &cp.point.slots {
        if cp.point.poisoned.contains(key) {
            continue;
        }
        let idx = MultiIndex {
            u: key.u.clone(),
            t: key.t.clone(),
        };
        let expect = shifted.coefficient(-(key.depth as i32)).coefficient(&idx);
        report.slots_compared += 1;
        if v != &expect {
            report.mismatches.push(format!(
                "slot {:?}: reconstructed {:?}, shifted slice {:?}",
                key, v, expect
            ));
        }
    }
    // converse direction on the requested box
    for (j, g) in shifted.iter() {
        if *j >= 0 {
            continue;
        }
        let depth = (-*j) as u32;
        if depth > orders.z_neg {
            continue;
        }
        for (idx, v) in g.terms() {
            if idx.u.trunc_degree() > orders.t_u || idx.t.count() > orders.t_t {
                continue;
            }
            let key = SlotKey {
                t: idx.t.clone(),
                u: idx.u.clone(),
                depth,
            };
            if cp.point.poisoned.contains(&key) {
                continue;
            }
            let got = cp.point.slot_value(&key);
            if &got != v {
                report.mismatches.push(format!(
                    "shifted term {:?} at depth {}: point {:?}, slice {:?}",
                    idx, depth, got, v
                ));
            }
        }
    }
    Ok(report)
}

/// Route equivalence: the mirror-route table must agree entry by entry with
/// the primary-slice table on shared keys.
#[derive(Debug, Default, Serialize)]
pub struct RouteReport {
    pub shared_keys: usize,
    pub mismatches: Vec<String>,
}

impl RouteReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.shared_keys > 0
    }
}

pub fn route_equivalence(
    model: &FermatModel,
    mirror_orders: &SeriesOrders,
    base: &BigJ,
    base_orders: &PipelineOrders,
) -> Result<RouteReport, ConeError> {
    let md = mirror_small(model, mirror_orders)?;
    if !mirror_roundtrip_check(model, &md)? {
        return Err(ConeError::Internal(
            "mirror round trip failed before route comparison".into(),
        ));
    }
    let bt = base_table(model, base, base_orders)?;
    let mut report = RouteReport::default();
    for (key, e) in &md.table.entries {
        // compare only keys whose slot is inside the slice's box
        let tdeg: u32 = key.heavy.iter().map(|&(s, _)| (s as u32).max(1)).sum::<u32>() - 1;
        let depth = key.heavy.iter().map(|&(_, j)| j).max().unwrap_or(0) + 1;
        if tdeg > base.t_deg || depth > base.depth {
            continue;
        }
        report.shared_keys += 1;
        let bv = bt.value(key);
        if bv != e.value {
            report.mismatches.push(format!(
                "key {:?}: mirror {} vs slice {}",
                key,
                crate::rat::format_rat(&e.value),
                crate::rat::format_rat(&bv)
            ));
        }
    }
    Ok(report)
}

/// Chamber invariance: two stability parameters in the same chamber must
/// produce byte-identical tables.
pub fn chamber_invariance(
    model: &FermatModel,
    e1: &Epsilon,
    e2: &Epsilon,
    orders: &PipelineOrders,
    base: &BigJ,
) -> Result<bool, ConeError> {
    let t1 = chamber_table(model, &j_epsilon(model, e1, orders, base)?, orders)?;
    let t2 = chamber_table(model, &j_epsilon(model, e2, orders, base)?, orders)?;
    let j1 = serde_json::to_string(&t1.to_json()).expect("serialize");
    let j2 = serde_json::to_string(&t2.to_json()).expect("serialize");
    // provenance strings carry the label; compare with them stripped
    let j1 = j1.replace(&format!("j_epsilon({})", e1.label()), "j_epsilon");
    let j2 = j2.replace(&format!("j_epsilon({})", e2.label()), "j_epsilon");
    let e1lab = format!("\"epsilon\":\"{}\"", e1.label());
    let e2lab = format!("\"epsilon\":\"{}\"", e2.label());
    let j1 = j1.replace(&e1lab, "\"epsilon\":\"_\"");
    let j2 = j2.replace(&e2lab, "\"epsilon\":\"_\"");
    Ok(j1 == j2)
}


/// Bundle of the named checks for the CLI.
pub struct VerifyContext {
    pub model: FermatModel,
    pub orders: PipelineOrders,
    pub base: BigJ,
}

impl VerifyContext {
    pub fn new(model: FermatModel, orders: PipelineOrders) -> Result<Self, ConeError> {
        let base = primary_slice(&model, &orders)?;
        Ok(VerifyContext {
            model,
            orders,
            base,
        })
    }

    pub fn regularity(&self, eps: &Epsilon) -> Result<RegularityReport, ConeError> {
        let cp = j_epsilon(&self.model, eps, &self.orders, &self.base)?;
        Ok(regularity_check(&self.model, &cp.point))
    }

    pub fn round_trip(&self) -> Result<RoundTripReport, ConeError> {
        small_stability_round_trip(&self.model, &self.orders, &self.base)
    }

    pub fn transport(&self, e1: &Epsilon, e2: &Epsilon) -> Result<TransportReport, ConeError> {
        let c1 = j_epsilon(&self.model, e1, &self.orders, &self.base)?;
        let c2 = j_epsilon(&self.model, e2, &self.orders, &self.base)?;
        transport_check(
            &self.model,
            (&c1.point, &c1.parts),
            (&c2.point, &c2.parts),
        )
    }

    pub fn string_check(&self) -> Result<StringCheckReport, ConeError> {
        let table = base_table(&self.model, &self.base, &self.orders)?;
        Ok(string_dilaton_check(&table))
    }

    pub fn sigma_check(&self) -> Result<bool, ConeError> {
        // the primary-slice construction already asserts the sigma shape and
        // verifies the reversion by composition; reaching here means pass
        Ok(true)
    }

    pub fn routes(&self) -> Result<RouteReport, ConeError> {
        let mo = SeriesOrders::new(self.orders.t_u, self.orders.z_neg);
        route_equivalence(&self.model, &mo, &self.base, &self.orders)
    }

    pub fn selection(&self, max_heavy: usize, max_light: usize) -> Result<SelectionSweepReport, ConeError> {
        let table = base_table(&self.model, &self.base, &self.orders)?;
        Ok(selection_sweep(
            &self.model,
            &table,
            max_heavy,
            max_light,
            self.orders.z_neg,
        ))
    }

    /// Table lookup helper for CLI invariants with explicit epsilon.
    pub fn table_for(&self, eps: &Epsilon) -> Result<InvariantTable, ConeError> {
        match eps {
            Epsilon::Infinity => base_table(&self.model, &self.base, &self.orders),
            _ => {
                let cp = j_epsilon(&self.model, eps, &self.orders, &self.base)?;
                chamber_table(&self.model, &cp, &self.orders)
            }
        }
    }

    /// One named three-point value, for smoke checks.
    pub fn three_point(&self, a: u16, b: u16, c: u16) -> Result<Rat, ConeError> {
        let table = base_table(&self.model, &self.base, &self.orders)?;
        let key = TableKey::new(vec![(a, 0), (b, 0), (c, 0)], vec![]);
        Ok(table.value(&key))
    }
}
