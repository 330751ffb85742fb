//! Indexed storage, extraction and export of correlator values.

use super::reconstruct::{ConePoint, SlotKey};
use super::sigma::BigJ;
use super::ConeError;
use crate::model::{
    moduli_nonempty, trivially_zero, CorrelatorKey, Epsilon, FermatModel, ModelSpec, VanishReason,
};
use crate::rat::{factorial, format_rat, Rat};
use crate::series::Mono;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;

/// Canonical correlator index: sorted heavy (sector, psi-power) pairs and
/// sorted light sectors. The stability parameter lives on the table.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct TableKey {
    pub heavy: Vec<(u16, u32)>,
    pub light: Vec<u16>,
}

impl TableKey {
    pub fn new(mut heavy: Vec<(u16, u32)>, mut light: Vec<u16>) -> Self {
        heavy.sort_unstable();
        light.sort_unstable();
        TableKey { heavy, light }
    }

    pub fn correlator_key(&self, eps: Epsilon) -> CorrelatorKey {
        CorrelatorKey::new(self.heavy.clone(), self.light.clone(), eps)
    }
}

#[derive(Clone, Debug)]
pub struct TableEntry {
    pub value: Rat,
    pub provenance: String,
}

/// Truncation metadata serialized with every table.
#[derive(Clone, Copy, Debug, Serialize, Default)]
pub struct OrdersMeta {
    pub u_deg: u32,
    pub t_deg: u32,
    pub z_neg: u32,
}

/// A table of correlator values for one model and one stability parameter.
/// Values follow the d-normalized convention (d times the cap integral).
pub struct InvariantTable {
    pub model: ModelSpec,
    pub epsilon: Epsilon,
    pub orders: OrdersMeta,
    pub entries: BTreeMap<TableKey, TableEntry>,
}

impl InvariantTable {
    pub fn new(model: ModelSpec, epsilon: Epsilon, orders: OrdersMeta) -> Self {
        InvariantTable {
            model,
            epsilon,
            orders,
            entries: BTreeMap::new(),
        }
    }

    /// Insert a value; an existing entry must agree exactly (permutation
    /// symmetry of the insertions makes many slots land on one key).
    pub fn insert_checked(
        &mut self,
        key: TableKey,
        value: Rat,
        provenance: &str,
    ) -> Result<(), ConeError> {
        match self.entries.get_mut(&key) {
            None => {
                self.entries.insert(
                    key,
                    TableEntry {
                        value,
                        provenance: provenance.to_string(),
                    },
                );
            }
            Some(e) => {
                if e.value != value {
                    return Err(ConeError::Inconsistent(format!(
                        "symmetry violation at {:?}: {} vs {}",
                        key,
                        format_rat(&e.value),
                        format_rat(&value)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Stored value, or zero for any absent key.
    pub fn value(&self, key: &TableKey) -> Rat {
        self.entries
            .get(key)
            .map(|e| e.value.clone())
            .unwrap_or_else(Rat::zero)
    }

    /// Value together with the selection-rule classification of the key.
    pub fn value_with_reason(&self, key: &TableKey, model: &FermatModel) -> (Rat, Option<VanishReason>) {
        let ck = key.correlator_key(self.epsilon.clone());
        (self.value(key), trivially_zero(model, &ck))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The spec wire format.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|(k, e)| {
                serde_json::json!({
                    "heavy": k.heavy.iter().map(|&(s, j)| vec![s as u64, j as u64]).collect::<Vec<_>>(),
                    "light": k.light.clone(),
                    "value": format_rat(&e.value),
                    "provenance": e.provenance,
                })
            })
            .collect();
        serde_json::json!({
            "model": { "weights": self.model.weights, "degree": self.model.degree },
            "epsilon": self.epsilon.label(),
            "normalization": "values are d times the capped integral",
            "orders": self.orders,
            "entries": entries,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("heavy,light,value,provenance\n");
        for (k, e) in &self.entries {
            let heavy = k
                .heavy
                .iter()
                .map(|&(s, j)| format!("{s}:{j}"))
                .collect::<Vec<_>>()
                .join("|");
            let light = k
                .light
                .iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join("|");
            out.push_str(&format!(
                "{},{},{},{}\n",
                heavy,
                light,
                format_rat(&e.value),
                e.provenance
            ));
        }
        out
    }
}

fn mono_sectors(m: &Mono) -> Vec<u16> {
    let mut v = Vec::new();
    for &(s, e) in m.pairs() {
        v.extend(std::iter::repeat(s).take(e as usize));
    }
    v
}

fn symmetry_factor(m: &Mono) -> Rat {
    let mut f = Rat::from_integer(1.into());
    for &(_, e) in m.pairs() {
        f *= factorial(e);
    }
    f
}

/// Read one slot's components into table entries. The slot value is the
/// double-bracket coefficient; multiplying by the exponent factorials
/// undoes the 1/(m! n!) normalization.
fn extract_slot(
    table: &mut InvariantTable,
    model: &FermatModel,
    m: &Mono,
    n: &Mono,
    depth: u32,
    value: &crate::series::StateVec,
    provenance: &str,
) -> Result<(), ConeError> {
    let factor = symmetry_factor(m) * symmetry_factor(n);
    for (&c, val) in value.support() {
        let mut heavy: Vec<(u16, u32)> = mono_sectors(m).into_iter().map(|s| (s, 0)).collect();
        heavy.push((model.dual(c), depth - 1));
        let key = TableKey::new(heavy, mono_sectors(n));
        let ck = key.correlator_key(table.epsilon.clone());
        if !moduli_nonempty(model, &ck) {
            // unstable-term content, not an invariant of this chamber
            continue;
        }
        table.insert_checked(key, val * &factor, provenance)?;
    }
    Ok(())
}

/// Table of the unweighted-chamber invariants carried by the primary slice.
pub fn big_j_table(
    model: &FermatModel,
    base: &BigJ,
    orders: OrdersMeta,
) -> Result<InvariantTable, ConeError> {
    let mut table = InvariantTable::new(model.spec(), Epsilon::Infinity, orders);
    for ((m, depth), v) in &base.neg {
        extract_slot(&mut table, model, m, &Mono::one(), *depth, v, "big_j")?;
    }
    Ok(table)
}

/// Table of weighted invariants carried by a reconstructed point.
pub fn point_table(
    model: &FermatModel,
    point: &ConePoint,
    epsilon: &Epsilon,
    orders: OrdersMeta,
    provenance: &str,
) -> Result<InvariantTable, ConeError> {
    let mut table = InvariantTable::new(model.spec(), epsilon.clone(), orders);
    for (key, v) in &point.slots {
        if point.poisoned.contains(key) {
            continue;
        }
        extract_slot(&mut table, model, &key.t, &key.u, key.depth, v, provenance)?;
    }
    Ok(table)
}

/// Check the string relation on stored pairs: inserting a psi-free phi_0
/// lowers the descendant power by one; with no psi to lower the value is 0.
#[derive(Debug, Default, Serialize)]
pub struct StringCheckReport {
    pub pairs_checked: usize,
    pub zero_checked: usize,
    pub mismatches: Vec<String>,
}

pub fn string_dilaton_check(table: &InvariantTable) -> StringCheckReport {
    let mut report = StringCheckReport::default();
    let model = FermatModel::build(&table.model.weights, table.model.degree)
        .expect("table carries a valid model");
    for (key, entry) in &table.entries {
        let Some(pos) = key.heavy.iter().position(|&(s, j)| s == 0 && j == 0) else {
            continue;
        };
        let mut rest = key.heavy.clone();
        rest.remove(pos);
        // the relation only applies when the reduced moduli exists
        let reduced = TableKey::new(rest.clone(), key.light.clone());
        if !moduli_nonempty(&model, &reduced.correlator_key(table.epsilon.clone())) {
            continue;
        }
        // the single descendant slot, if any
        let slot = rest.iter().position(|&(_, j)| j > 0);
        match slot {
            None => {
                report.zero_checked += 1;
                if !entry.value.is_zero() {
                    report.mismatches.push(format!(
                        "{:?} should vanish by the string relation, got {}",
                        key,
                        format_rat(&entry.value)
                    ));
                }
            }
            Some(i) => {
                let mut lowered = rest.clone();
                lowered[i].1 -= 1;
                let lowered_key = TableKey::new(lowered, key.light.clone());
                let lck = lowered_key.correlator_key(table.epsilon.clone());
                if !moduli_nonempty(&model, &lck) {
                    continue;
                }
                if let Some(lowered_entry) = table.entries.get(&lowered_key) {
                    report.pairs_checked += 1;
                    if lowered_entry.value != entry.value {
                        report.mismatches.push(format!(
                            "string relation fails between {:?} and {:?}: {} vs {}",
                            key,
                            lowered_key,
                            format_rat(&entry.value),
                            format_rat(&lowered_entry.value)
                        ));
                    }
                } else if !entry.value.is_zero() {
                    // lowered key exists but was never produced: a nonzero
                    // parent would contradict it being zero
                    report.pairs_checked += 1;
                    report.mismatches.push(format!(
                        "string relation fails: {:?} nonzero but lowered key absent",
                        key
                    ));
                }
            }
        }
    }
    report
}

/// Exhaustive selection-rule sweep: every swept key that the rules kill must
/// be absent (zero) in the table, and every stored nonzero entry must pass
/// the degree and divisibility rules.
#[derive(Debug, Default, Serialize)]
pub struct SelectionSweepReport {
    pub keys_swept: usize,
    pub nonzero_entries: usize,
    pub failures: Vec<String>,
}

pub fn selection_sweep(
    model: &FermatModel,
    table: &InvariantTable,
    max_heavy: usize,
    max_light: usize,
    max_psi: u32,
) -> SelectionSweepReport {
    let mut report = SelectionSweepReport::default();
    let all: Vec<u16> = (0..model.d()).collect();
    let heavy_monos = super::reconstruct::enumerate_monos(&all, u32::MAX, max_heavy as u32);
    let light_monos = super::reconstruct::enumerate_monos(&all, u32::MAX, max_light as u32);
    for hm in &heavy_monos {
        if hm.count() == 0 {
            continue;
        }
        for lm in &light_monos {
            for slot_pos in 0..hm.pairs().len() {
                let (slot_sector, _) = hm.pairs()[slot_pos];
                for psi in 0..=max_psi {
                    let mut heavy: Vec<(u16, u32)> =
                        mono_sectors(hm).into_iter().map(|s| (s, 0)).collect();
                    // put the descendant power on one insertion of this sector
                    let pos = heavy
                        .iter()
                        .position(|&(s, _)| s == slot_sector)
                        .unwrap();
                    heavy[pos].1 = psi;
                    let key = TableKey::new(heavy, mono_sectors(lm));
                    report.keys_swept += 1;
                    let (value, reason) = table.value_with_reason(&key, model);
                    if reason.is_some() && !value.is_zero() {
                        report.failures.push(format!(
                            "key {:?} is selection-zero ({:?}) but stored {}",
                            key,
                            reason,
                            format_rat(&value)
                        ));
                    }
                }
            }
        }
    }
    for (key, entry) in &table.entries {
        if entry.value.is_zero() {
            continue;
        }
        report.nonzero_entries += 1;
        let ck = key.correlator_key(table.epsilon.clone());
        let wd = crate::model::witten_degree(model, &ck);
        let psi_total = ck.psi_total() as i64;
        let d = model.degree() as i64;
        let sector_sum: i64 = ck.heavy.iter().map(|&(k, _)| k as i64).sum::<i64>()
            + ck.light.iter().map(|&l| l as i64).sum::<i64>();
        let degree_ok = crate::rat::is_integer(&wd)
            && crate::rat::to_i64(&wd) == Some(psi_total)
            && psi_total >= 0;
        let div_ok = (2 + sector_sum) % d == 0;
        if !degree_ok || !div_ok {
            report.failures.push(format!(
                "nonzero entry {:?} violates the selection rules",
                key
            ));
        }
    }
    report
}

/// Convenience: look up one slot of a point as a table-style value.
pub fn slot_invariant(
    model: &FermatModel,
    point: &ConePoint,
    key: &SlotKey,
    c: u16,
) -> Rat {
    let v = point.slot_value(key);
    let factor = symmetry_factor(&key.t) * symmetry_factor(&key.u);
    let _ = model;
    v.component(c) * factor
}
