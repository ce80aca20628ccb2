//! Command-line harness: configuration parsing, report serialization, and
//! the `simulate`, `analyze`, `sweep`, and `tune` commands.
//!
//! # Configuration
//!
//! Commands read a flat `key = value` config file (`--config PATH`, `#`
//! comments, later assignments win) and accept the same keys as CLI flags;
//! flags override the file. Unknown keys are usage errors. See
//! [`RawConfig`] for the key list.
//!
//! # Report schema
//!
//! Every command produces a [`ReportTable`]: a list of rows plus, for
//! `sweep`, trend summary lines. JSON output has the shape
//!
//! ```text
//! {"rows": [{"col": value, ...}, ...],
//!  "summary": [{"column": ..., "bob_action": ..., "trend": ...,
//!               "first": ..., "last": ...}, ...]}
//! ```
//!
//! with row columns in first-seen order. CSV output has one header line
//! (the union of row columns), one line per row (floats with 17
//! significant digits, so reruns are byte-identical), and one trailing
//! `# summary ...` comment line per summary entry.
//!
//! Column names are grouped by prefix:
//!
//! | columns | meaning |
//! |---|---|
//! | `protocol`, `param_*`, `bob_action`, `light` | what was run |
//! | `sweep_param`, `sweep_value` | sweep point (sweeps only) |
//! | `p_<TERMINAL>`, `outcome_total` | outcome probabilities |
//! | `weak_*` | weak-trace presence at the information outcome |
//! | `hist_*` | decoherence-functional history classification |
//! | `crossing_*` | classical and single-photon channel-crossing peaks |
//! | `loss_*` | abort/success/leakage statistics across both actions |
//! | `slot_*`, `residual`, `crosstalk`, `converged`, ... | tuner results |
//!
//! The per-terminal probabilities in a row always sum to one within
//! `1e-9`; the harness refuses to emit a row that breaks this.
//!
//! # Exit codes
//!
//! `0` success, `2` usage error, `3` resource guard, `4` tuner ran but did
//! not converge, `1` anything else.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{cmd_analyze, cmd_simulate, cmd_sweep, cmd_tune};
pub use config::{Analysis, RawConfig};
pub use report::{OutputFormat, ReportRow, ReportTable, ReportValue, SummaryLine};

use crate::counterfactuality::AnalysisError;
use crate::optics::OpticsError;
use crate::protocols::ProtocolError;
use crate::tuner::TuneError;
use thiserror::Error;

/// Anything that can stop a command, sorted by how the process should exit.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// The user asked for something the harness cannot parse or build.
    #[error("usage: {0}")]
    Usage(String),
    /// The request was well-formed but too large to honor.
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    /// An internal invariant failed; this is a bug, not a usage problem.
    #[error("internal: {0}")]
    Internal(String),
}

impl HarnessError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Usage(_) => 2,
            HarnessError::Resource(_) => 3,
            HarnessError::Io(_) | HarnessError::Internal(_) => 1,
        }
    }
}

impl From<AnalysisError> for HarnessError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::ResourceGuard(msg) => HarnessError::Resource(msg),
            AnalysisError::BadPartition(_)
            | AnalysisError::BadCuts(_)
            | AnalysisError::BadParameter(_) => HarnessError::Usage(e.to_string()),
            AnalysisError::Optics(inner) => inner.into(),
        }
    }
}

impl From<OpticsError> for HarnessError {
    fn from(e: OpticsError) -> Self {
        HarnessError::Internal(e.to_string())
    }
}

impl From<ProtocolError> for HarnessError {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::InvalidParameter(_) => HarnessError::Usage(e.to_string()),
            ProtocolError::Optics(inner) => inner.into(),
        }
    }
}

impl From<TuneError> for HarnessError {
    fn from(e: TuneError) -> Self {
        match e {
            TuneError::Problem(_) | TuneError::OutOfBounds { .. } => {
                HarnessError::Usage(e.to_string())
            }
            TuneError::Protocol(inner) => inner.into(),
            TuneError::Optics(inner) => inner.into(),
        }
    }
}
