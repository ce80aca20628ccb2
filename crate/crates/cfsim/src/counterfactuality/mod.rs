//! Analyses that decide whether a transmission was counterfactual.
//!
//! Four complementary viewpoints, each with its own submodule:
//!
//! - [`classical`]: the classical-field baseline, where "did light cross
//!   the channel?" has an unambiguous intensity answer.
//! - [`weak_trace`]: the two-state (forward/backward) weak-value trace a
//!   post-selected single photon leaves at every location.
//! - [`crossing`]: a single number per run summarizing how much of the
//!   light, in the chosen light model, was ever on the far side.
//! - [`histories`]: coarse-grained decoherent-histories analysis with a
//!   consistency check, and the verdict it supports.
//! - [`loss`]: abort statistics for the block/open pair and how much bit
//!   information the abort channel leaks.

pub mod classical;
pub mod crossing;
pub mod histories;
pub mod loss;
pub mod weak_trace;

pub use classical::{classical_absence_channel, ClassicalChannelReport};
pub use crossing::{classical_crossing, fock_crossing, CrossingReport};
pub use histories::{
    build_history_family, classify_by_histories, far_cell_names, CounterfactualVerdict, History,
    HistoryClassification, HistoryFamily,
};
pub use loss::{loss_statistics, LossReport};
pub use weak_trace::{weak_trace, WeakSegment, WeakTraceReport};

use crate::optics::OpticsError;
use thiserror::Error;

/// Default magnitude below which a weak value counts as "no presence".
pub const DEFAULT_PRESENCE_EPSILON: f64 = 1e-10;

/// Consistency threshold on off-diagonal decoherence-matrix entries.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Errors from the analysis layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum AnalysisError {
    #[error(transparent)]
    Optics(#[from] OpticsError),
    /// The coarse-graining does not partition the circuit's rails and
    /// terminals exactly.
    #[error("bad coarse-graining: {0}")]
    BadPartition(String),
    /// Cut list not strictly increasing or out of range.
    #[error("bad cut list: {0}")]
    BadCuts(String),
    /// The analysis would enumerate too many histories.
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("bad analysis parameter: {0}")]
    BadParameter(String),
}
