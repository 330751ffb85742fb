//! Exact-rational graded truncated series and Laurent-in-z arithmetic.
//!
//! - [`GradedSeries`]: sparse truncated series in u-variables (weighted
//!   grading: deg u^i = i) and t-variables (total-degree grading), with
//!   exact-rational or state-vector coefficients.
//! - [`ZSeries`]: finite-window Laurent object in z whose coefficients are
//!   graded series; carries the polarization split into z-powers >= 0 and
//!   < 0 losslessly.
//! - [`compose`]/[`reversion`]: formal substitution and order-by-order
//!   inversion of maps with identity linear part.

mod compose;
mod dump;
mod graded;
mod mono;
mod zseries;

pub use compose::{compose, reversion, Substitution, VarKind};
pub use dump::dump_zseries;
pub use graded::{
    mul_states_with_rule, series_mul, Coeff, GradedSeries, SeriesError, SeriesValue, StateVec,
};
pub use mono::{Mono, MultiIndex, Trunc};
pub use zseries::{product_window, Window, ZSeries};
