//! Classical-field baseline: how much intensity is on the far side, cut
//! by cut.
//!
//! A classical field follows exactly the same linear propagation as the
//! single-photon amplitudes, but every nonzero intensity is physically
//! real in every run: there is no post-selection that can remove it. If
//! the far station's action modulates Alice's readout at all, some of the
//! field must have crossed, and this report measures how much.

use super::AnalysisError;
use crate::optics::{Circuit, LightModel, Mode, PhotonState, TerminalId};
use serde::Serialize;
use std::collections::BTreeMap;

/// Far-side intensity per cut for a classical run.
#[derive(Debug, Clone, Serialize)]
pub struct ClassicalChannelReport {
    pub light: LightModel,
    /// `far_intensity[k]` is the fraction of input intensity on far-side
    /// rails or in far-side terminals after `k` stages (`k = 0..=S`).
    pub far_intensity: Vec<f64>,
    pub peak: f64,
    pub peak_cut: usize,
    /// Final intensity fraction delivered to each terminal.
    pub delivered: BTreeMap<TerminalId, f64>,
}

/// Propagate a unit classical field and record the far-side intensity at
/// every stage boundary.
pub fn classical_absence_channel(
    circuit: &Circuit,
    input: &PhotonState,
) -> Result<ClassicalChannelReport, AnalysisError> {
    let trace = circuit.propagate(input)?;
    let mut far_intensity = Vec::with_capacity(trace.states.len());
    let mut peak = 0.0_f64;
    let mut peak_cut = 0usize;
    for (cut, state) in trace.states.iter().enumerate() {
        let mut far = 0.0;
        for (mode, amp) in state.iter() {
            let is_far = match mode {
                Mode::Live { rail, .. } => circuit
                    .regions
                    .get(rail)
                    .map(|r| r.is_far_side())
                    .unwrap_or(false),
                Mode::Absorbed { terminal, .. } => circuit
                    .terminals
                    .get(terminal)
                    .map(|t| t.region.is_far_side())
                    .unwrap_or(false),
            };
            if is_far {
                far += amp.norm_sqr();
            }
        }
        if far > peak {
            peak = far;
            peak_cut = cut;
        }
        far_intensity.push(far);
    }
    let delivered = trace
        .states
        .last()
        .map(|s| s.terminal_mass())
        .unwrap_or_default();
    Ok(ClassicalChannelReport {
        light: LightModel::Classical,
        far_intensity,
        peak,
        peak_cut,
        delivered,
    })
}
