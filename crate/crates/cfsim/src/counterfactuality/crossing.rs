//! Channel-crossing measures: one number for "how much was the light ever
//! on the far side".
//!
//! For classical light the measure is the peak far-side intensity fraction
//! over all stage cuts. For a post-selected single photon it is the peak,
//! over cuts, of the total weak-value magnitude sitting on far-side modes:
//! the first-order trace the photon would have left in Bob's territory.
//! Both are peaks rather than sums, so a photon parked on the far side for
//! many stages counts once, not once per stage.

use super::classical::classical_absence_channel;
use super::weak_trace::WeakTraceReport;
use super::AnalysisError;
use crate::optics::{Circuit, LightModel, PhotonState, TerminalId};
use serde::Serialize;

/// Peak far-side weight for one run.
#[derive(Debug, Clone, Serialize)]
pub struct CrossingReport {
    pub light: LightModel,
    /// Post-selected outcome (single-photon runs only).
    pub outcome: Option<TerminalId>,
    /// Far-side weight per cut (index = number of stages applied).
    pub per_cut: Vec<f64>,
    pub peak: f64,
    pub peak_cut: usize,
    /// Whether any far-side mode was flagged present (single-photon runs).
    pub any_far_presence: bool,
}

/// Classical crossing: peak far-side intensity fraction.
pub fn classical_crossing(
    circuit: &Circuit,
    input: &PhotonState,
) -> Result<CrossingReport, AnalysisError> {
    let report = classical_absence_channel(circuit, input)?;
    Ok(CrossingReport {
        light: LightModel::Classical,
        outcome: None,
        peak: report.peak,
        peak_cut: report.peak_cut,
        any_far_presence: report.peak > 0.0,
        per_cut: report.far_intensity,
    })
}

/// Single-photon crossing for one post-selected outcome: peak over cuts of
/// `Σ |W|` across far-side modes of the weak trace.
pub fn fock_crossing(trace: &WeakTraceReport) -> CrossingReport {
    let cut_count = trace.cut_count();
    let mut per_cut = vec![0.0_f64; cut_count + 1];
    let mut any_far_presence = false;
    for segment in &trace.segments {
        if segment.region.is_far_side() {
            per_cut[segment.cut] += segment.weak_value().norm();
            any_far_presence |= segment.present;
        }
    }
    let (peak_cut, peak) = per_cut.iter().enumerate().fold(
        (0usize, 0.0_f64),
        |(bi, bv), (i, &v)| {
            if v > bv {
                (i, v)
            } else {
                (bi, bv)
            }
        },
    );
    CrossingReport {
        light: LightModel::Fock,
        outcome: Some(trace.outcome.clone()),
        per_cut,
        peak,
        peak_cut,
        any_far_presence,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterfactuality::weak_trace::weak_trace;
    use crate::counterfactuality::DEFAULT_PRESENCE_EPSILON;
    use crate::protocols::{
        build_ev, build_noh, build_salih, build_zeno, BobAction, NOH_DEFAULT_THETA,
    };

    const EPS: f64 = 1e-12;

    fn fock(p: &crate::protocols::ProtocolCircuit, outcome: &str) -> CrossingReport {
        let trace = weak_trace(
            &p.circuit,
            &PhotonState::vacuum(),
            &TerminalId::new(outcome),
            DEFAULT_PRESENCE_EPSILON,
        )
        .unwrap();
        fock_crossing(&trace)
    }

    #[test]
    fn heralded_bits_of_the_exchange_protocol_split_cleanly() {
        // Absorb case, D1 click: no crossing at all.
        let absorb = build_noh(NOH_DEFAULT_THETA, BobAction::Block).unwrap();
        let report = fock(&absorb, "D1");
        assert!(report.peak < EPS);
        assert!(!report.any_far_presence);

        // Reflect case, D2 click: the photon crossed at half weight.
        let reflect = build_noh(NOH_DEFAULT_THETA, BobAction::Open).unwrap();
        let report = fock(&reflect, "D2");
        assert!((report.peak - 0.5).abs() < EPS);
        assert!(report.any_far_presence);
    }

    #[test]
    fn open_chain_photon_is_fully_at_bob_before_detection() {
        let p = build_zeno(5, BobAction::Open).unwrap();
        let report = fock(&p, "DB");
        assert!((report.peak - 1.0).abs() < EPS);
    }

    #[test]
    fn blocked_nested_protocol_signal_bit_never_crosses() {
        for polarized in [false, true] {
            let p = build_salih(2, 2, polarized, BobAction::Block).unwrap();
            let report = fock(&p, "D1");
            assert!(report.peak < EPS, "polarized = {polarized}");
            assert!(!report.any_far_presence);
        }
    }

    #[test]
    fn interaction_free_click_shows_no_crossing_but_classical_light_does() {
        let p = build_ev(BobAction::Block).unwrap();
        let quantum = fock(&p, "D2");
        assert!(quantum.peak < EPS);
        let classical = classical_crossing(&p.circuit, &PhotonState::vacuum()).unwrap();
        assert!(classical.peak > 0.49);
    }

    #[test]
    fn classical_crossing_is_never_zero_when_the_far_action_matters() {
        for action in [BobAction::Block, BobAction::Open] {
            for (m, n) in [(1, 2), (2, 2), (3, 4)] {
                let p = build_salih(m, n, false, action).unwrap();
                let report = classical_crossing(&p.circuit, &PhotonState::vacuum()).unwrap();
                assert!(report.peak > 1e-12, "m={m} n={n} action={action}");
            }
        }
    }
}
