//! The small-block mirror route: divide the small I-series by I_0, revert
//! the mirror map, and read the degree <= 1 slice of the primary point.

use super::sigma::pinned_depth;
use super::table::{InvariantTable, OrdersMeta, TableKey};
use super::ConeError;
use crate::ifun::{i0_i1, small_i, SeriesOrders};
use crate::model::{moduli_nonempty, Epsilon, FermatModel};
use crate::rat::{factorial, Rat};
use crate::series::{
    compose, reversion, GradedSeries, Mono, MultiIndex, StateVec, Substitution, Trunc, VarKind,
    ZSeries,
};
use num_traits::One;
use std::collections::BTreeMap;

pub struct MirrorData {
    /// Mirror map components on the degree <= 1 block.
    pub eta: BTreeMap<u16, GradedSeries<Rat>>,
    pub eta_inv: BTreeMap<u16, GradedSeries<Rat>>,
    /// The quotient I/I_0, still in the hypergeometric coordinate.
    pub quotient: ZSeries<StateVec>,
    /// The primary point on the block: quotient composed with eta^{-1}.
    pub point: ZSeries<StateVec>,
    pub table: InvariantTable,
}

/// Sectors of the degree <= 1 block.
pub fn small_block(model: &FermatModel) -> Vec<u16> {
    model
        .narrow()
        .iter()
        .copied()
        .filter(|&s| model.state_degree(s) <= &Rat::one())
        .collect()
}

/// Run the mirror route and extract the block-restricted invariant table.
pub fn mirror_small(model: &FermatModel, orders: &SeriesOrders) -> Result<MirrorData, ConeError> {
    let (mut small, _) = small_i(model, orders);
    small.retain_sectors(|s| model.is_narrow(s));
    let (i0, i1) = i0_i1(&small)?;
    let i0_inv = i0.invert()?;
    let eta_vec = i1.mul_scalar_series(&i0_inv);
    let mut eta = BTreeMap::new();
    for &s in &small_block(model) {
        eta.insert(s, eta_vec.component(s));
    }
    let trunc = Trunc::u_only(orders.u_deg);
    let eta_inv = reversion(&eta, trunc)?;
    let quotient = small.mul_scalar_series(&i0_inv);
    let subst: Substitution = eta_inv
        .iter()
        .map(|(&i, s)| ((VarKind::U, i), s.clone()))
        .collect();
    let mut point = ZSeries::zero(trunc, quotient.window);
    for (j, g) in quotient.iter() {
        point.add_term(*j, compose(g, &subst, trunc)?);
    }
    // graph shape on the block: z phi_0 + (block identity) + O(1/z)
    let mut ident = GradedSeries::<StateVec>::zero(trunc);
    for &i in &small_block(model) {
        ident.add_term(MultiIndex::u_var(i), StateVec::basis(i));
    }
    let z1 = point.coefficient(1);
    if point.max_power() != Some(1)
        || z1.len() != 1
        || z1.constant_term() != StateVec::basis(0)
        || point.coefficient(0) != ident
    {
        return Err(ConeError::Internal(
            "mirror route did not produce the graph shape on the block".into(),
        ));
    }
    let meta = OrdersMeta {
        u_deg: orders.u_deg,
        t_deg: orders.u_deg,
        z_neg: orders.z_neg,
    };
    let mut table = InvariantTable::new(model.spec(), Epsilon::Infinity, meta);
    for (j, g) in point.iter() {
        if *j >= 0 {
            continue;
        }
        let depth = (-*j) as u32;
        for (idx, v) in g.terms() {
            let mut factor = Rat::one();
            for &(_, e) in idx.u.pairs() {
                factor *= factorial(e);
            }
            for (&c, val) in v.support() {
                // the block slice must sit at its pinned depth too
                debug_assert_eq!(
                    pinned_depth(model, &idx.u, &Mono::one(), c),
                    Some(depth),
                    "mirror slot off its pinned depth"
                );
                let mut heavy: Vec<(u16, u32)> = Vec::new();
                for &(s, e) in idx.u.pairs() {
                    heavy.extend(std::iter::repeat((s, 0)).take(e as usize));
                }
                heavy.push((model.dual(c), depth - 1));
                let key = TableKey::new(heavy, Vec::new());
                if !moduli_nonempty(model, &key.correlator_key(Epsilon::Infinity)) {
                    continue;
                }
                table.insert_checked(key, val * &factor, "mirror_small")?;
            }
        }
    }
    Ok(MirrorData {
        eta,
        eta_inv,
        quotient,
        point,
        table,
    })
}

/// The mirror identity read back: composing the primary point with the
/// mirror map must reproduce the quotient I/I_0 exactly.
pub fn mirror_roundtrip_check(model: &FermatModel, data: &MirrorData) -> Result<bool, ConeError> {
    let trunc = data.point.trunc;
    let subst: Substitution = data
        .eta
        .iter()
        .map(|(&i, s)| ((VarKind::U, i), s.clone()))
        .collect();
    let mut back = ZSeries::zero(trunc, data.point.window);
    for (j, g) in data.point.iter() {
        back.add_term(*j, compose(g, &subst, trunc)?);
    }
    let _ = model;
    Ok(back == data.quotient.windowed(back.window))
}
