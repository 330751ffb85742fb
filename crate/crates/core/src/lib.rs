//! Exact-arithmetic engine for weighted Landau-Ginzburg theory in genus zero.
//!
//! The crate computes the closed-form hypergeometric I-functions attached to a
//! Fermat polynomial, reconstructs the stability-weighted generating functions
//! J^ε from their regular parts through the cone recursion, extracts correlator
//! tables, and machine-verifies the wall-crossing identities relating the
//! chambers. All arithmetic is over exact rationals; every check is an exact
//! equality on a reported coefficient range.

pub mod cli;
pub mod cone;
pub mod ifun;
pub mod model;
pub mod rat;
pub mod report;
pub mod series;

pub use model::{CorrelatorKey, Epsilon, FermatModel, VanishReason};
pub use rat::Rat;
pub use series::{GradedSeries, MultiIndex, Mono, StateVec, Trunc, Window, ZSeries};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("series error: {0}")]
    Series(#[from] series::SeriesError),
    #[error("model invariant violated: {0}")]
    Model(#[from] model::ModelError),
    #[error("cone engine error: {0}")]
    Cone(#[from] cone::ConeError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config error: {0}")]
    Config(String),
}
