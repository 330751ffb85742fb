//! The cone engine: residue pairing, the regularity criterion, the
//! reconstruction recursion, sigma/eta inversion, invariant extraction and
//! cross-chamber transport.

mod checks;
mod mirror;
mod pairing;
mod pipeline;
mod reconstruct;
mod sigma;
mod table;

pub use checks::{
    inject_fault, point_series, regularity_check, transport_check, RegularityReport,
    RegularityViolation, TransportReport,
};
pub use mirror::{mirror_roundtrip_check, mirror_small, small_block, MirrorData};
pub use pairing::{dilaton_shift, dilaton_unshift, omega_pairing, omega_product, pair_graded, pair_states};
pub use pipeline::{
    base_table, cap_one_shift_check, chamber_invariance, chamber_table, j_epsilon, primary_slice,
    route_equivalence, small_stability_round_trip, ChamberPoint, PipelineOrders, RoundTripReport,
    RouteReport, ShiftCheckReport, VerifyContext,
};
pub use reconstruct::{enumerate_monos, reconstruct, ConePoint, RequestBox, SlotKey};
pub use sigma::{big_j, pinned_depth, pinned_depth_slow, sigma_extract, BigJ, SigmaData};
pub use table::{
    big_j_table, point_table, selection_sweep, slot_invariant, string_dilaton_check,
    InvariantTable, OrdersMeta, SelectionSweepReport, StringCheckReport, TableEntry, TableKey,
};

#[derive(Debug, thiserror::Error)]
pub enum ConeError {
    #[error("broad component phi_{0} present where narrow projection is required")]
    BroadContent(u16),
    #[error("input is not an admissible cone slice: {0}")]
    BadConeInput(String),
    #[error("triangular elimination failed: {0}")]
    EliminationStuck(String),
    #[error("sigma does not have the shape u + O(u^2) in component {0}")]
    SigmaShape(u16),
    #[error("reconstruction inconsistency: {0}")]
    Inconsistent(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("series error: {0}")]
    Series(#[from] crate::series::SeriesError),
}
