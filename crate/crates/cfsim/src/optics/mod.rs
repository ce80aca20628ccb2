//! Core optical state representation and circuit propagation.
//!
//! States are sparse maps from [`Mode`] (a rail × polarization, or a
//! terminal-event slot) to complex amplitudes. Optical elements act as
//! exactly norm-preserving maps on that space: rotations (beamsplitters,
//! half-wave plates), mode permutations (polarizing beamsplitters, mirrors),
//! and absorber swaps (blockers, detectors, loss channels) that move live
//! amplitude into per-event terminal modes. Because absorption is modeled as
//! a swap into orthogonal event modes, the full evolution stays unitary,
//! post-selection is an ordinary projection, and backward (adjoint)
//! propagation never re-injects absorbed amplitude upstream.

mod circuit;
mod element;
mod mode;
mod state;

pub use circuit::{
    Circuit, CircuitTrace, LightModel, OutcomeDistribution, SourceSpec, TerminalInfo,
};
pub use element::OpticalElement;
pub use mode::{Mode, Polarization, RailId, Region, TerminalId, TerminalKind};
pub use state::PhotonState;

use thiserror::Error;

/// Errors from state construction, element application, and circuit runs.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum OpticsError {
    /// An element references a rail that has no region tag in the circuit.
    #[error("unknown rail `{0}` (no region tag declared)")]
    UnknownRail(String),
    /// An element references a terminal that the circuit does not declare.
    #[error("unknown terminal `{0}` (not declared in the circuit)")]
    UnknownTerminal(String),
    /// Two elements in one stage touch the same rail.
    #[error("stage {stage} has two elements touching rail `{rail}`")]
    StageConflict { stage: usize, rail: String },
    /// An element would write onto an already-occupied mode (non-unitary fan-in).
    #[error("element would overwrite occupied mode {0} (non-unitary fan-in)")]
    OccupiedOutput(String),
    /// A polarization-sensitive element met an unpolarized mode, or vice versa.
    #[error("polarization mismatch: {0}")]
    Polarization(String),
    /// Per-element norm conservation failed beyond tolerance (internal bug guard).
    #[error("norm drift {drift:.3e} beyond 1e-9 at element {element}")]
    NormDrift { element: String, drift: f64 },
    /// Live amplitude remained after the final stage.
    #[error("circuit incomplete: live probability {0:.3e} never reached a terminal")]
    CircuitIncomplete(f64),
    /// Post-selection on an outcome whose probability is numerically zero.
    #[error("null post-selection: outcome `{outcome}` has probability {probability:.3e} < 1e-15")]
    NullPostSelection { outcome: String, probability: f64 },
    /// Input state failed a normalization precondition.
    #[error("input state norm² = {0:.6e}, expected 1 (or vacuum before a source stage)")]
    BadInputNorm(f64),
    /// A computation would exceed a hard resource guard.
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    /// The circuit is structurally malformed (source placement, terminal
    /// kind mismatch, polarization discipline).
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
}
