//! Two-state weak-value traces of a post-selected photon.
//!
//! For a run post-selected on one terminal, the forward state `|f(k)⟩` at
//! each stage cut is combined with the backward state `|b(k)⟩` obtained by
//! evolving the selected outcome backward through the adjoint circuit. The
//! weak value of the occupation of mode `m` at cut `k` is
//!
//! ```text
//! W(k, m) = ⟨b(k)|m⟩⟨m|f(k)⟩ / ⟨b|f⟩
//! ```
//!
//! which is what a vanishingly gentle probe coupled to that mode would
//! record, to first order in the coupling. Because the evolution is unitary
//! on the enlarged (live + absorbed-event) space, `Σ_m W(k, m) = 1` holds
//! exactly at every cut; the report tracks the worst numerical defect.
//!
//! The trace is first-order only: correlations a probe pair would see
//! (second-order traces) are outside this model, and the report says so.

use super::AnalysisError;
use crate::optics::{Circuit, LightModel, Mode, OpticsError, PhotonState, Region, TerminalId};
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeSet;

/// Weak value of one mode at one cut.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakSegment {
    /// Stage cut (state after this many stages).
    pub cut: usize,
    /// Mode, rendered stably (`rail`, `rail:H`, `terminal#event`).
    #[serde(rename = "mode", with = "mode_as_string")]
    pub mode: Mode,
    /// Region the mode sits in (terminal region for absorbed modes).
    pub region: Region,
    pub weak_value_re: f64,
    pub weak_value_im: f64,
    /// `|W| > ε`: the mode would register on a first-order probe.
    pub present: bool,
}

mod mode_as_string {
    use super::Mode;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(mode: &Mode, ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_str(mode)
    }
}

impl WeakSegment {
    pub fn weak_value(&self) -> Complex64 {
        Complex64::new(self.weak_value_re, self.weak_value_im)
    }
}

/// Full weak-value trace for one post-selected outcome.
#[derive(Debug, Clone, Serialize)]
pub struct WeakTraceReport {
    pub light: LightModel,
    pub outcome: TerminalId,
    pub outcome_probability: f64,
    pub epsilon: f64,
    /// Worst `|Σ_m W(k, m) − 1|` over all cuts.
    pub completeness_defect: f64,
    /// This model covers single-probe (first-order) traces only.
    pub first_order_only: bool,
    /// Segments ordered by cut, then mode.
    pub segments: Vec<WeakSegment>,
}

impl WeakTraceReport {
    /// Weak value of `mode` at `cut` (zero when unrecorded).
    pub fn weak_value(&self, cut: usize, mode: &Mode) -> Complex64 {
        self.segments
            .iter()
            .find(|s| s.cut == cut && &s.mode == mode)
            .map(|s| s.weak_value())
            .unwrap_or(Complex64::ZERO)
    }

    /// Segments at one cut.
    pub fn at_cut(&self, cut: usize) -> impl Iterator<Item = &WeakSegment> {
        self.segments.iter().filter(move |s| s.cut == cut)
    }

    /// Segments flagged present anywhere on the far side of the channel.
    pub fn far_presences(&self) -> impl Iterator<Item = &WeakSegment> {
        self.segments
            .iter()
            .filter(|s| s.present && s.region.is_far_side())
    }

    /// Number of stage cuts covered (1..=S).
    pub fn cut_count(&self) -> usize {
        self.segments.last().map(|s| s.cut).unwrap_or(0)
    }
}

/// Compute the weak-value trace of the run post-selected on `outcome`.
/// `epsilon` is the presence threshold on `|W|`.
pub fn weak_trace(
    circuit: &Circuit,
    input: &PhotonState,
    outcome: &TerminalId,
    epsilon: f64,
) -> Result<WeakTraceReport, AnalysisError> {
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(AnalysisError::BadParameter(format!(
            "presence threshold must be a finite non-negative number, got {epsilon}"
        )));
    }
    let forward = circuit.propagate(input)?;
    let final_state = forward.states.last().expect("trace has a final state");
    let live = final_state.live_norm_sqr();
    if live > 1e-12 {
        return Err(OpticsError::CircuitIncomplete(live).into());
    }
    if !circuit.terminals.contains_key(outcome) {
        return Err(OpticsError::UnknownTerminal(outcome.to_string()).into());
    }
    let mut boundary = final_state.project_terminal(outcome);
    let outcome_probability = boundary.norm_sqr();
    if outcome_probability < 1e-15 {
        return Err(OpticsError::NullPostSelection {
            outcome: outcome.to_string(),
            probability: outcome_probability,
        }
        .into());
    }
    boundary.normalize();
    let backward = circuit.backward_trace(&boundary)?;
    // ⟨b|f⟩ is cut-independent (unitarity); at the final cut it is √p.
    let denom = boundary.inner(final_state);

    let mut segments = Vec::new();
    let mut completeness_defect: f64 = 0.0;
    for (cut, b) in backward.iter().enumerate().skip(1) {
        let f = forward.cut(cut);
        let mut sum = Complex64::ZERO;
        let modes: BTreeSet<&Mode> = f
            .iter()
            .map(|(m, _)| m)
            .chain(b.iter().map(|(m, _)| m))
            .collect();
        for mode in modes {
            let fa = f.amplitude(mode);
            let ba = b.amplitude(mode);
            let w = ba.conj() * fa / denom;
            sum += w;
            let record = match mode {
                // Live rails are worth recording whenever either state
                // touches them; silence (W = 0) is part of the story.
                Mode::Live { .. } => fa != Complex64::ZERO || ba != Complex64::ZERO,
                // Absorbed events only ever have W ≠ 0 for the selected
                // terminal; everything else would be pages of exact zeros.
                Mode::Absorbed { .. } => w != Complex64::ZERO,
            };
            if record {
                let region = match mode {
                    Mode::Live { rail, .. } => *circuit.regions.get(rail).expect("validated rail"),
                    Mode::Absorbed { terminal, .. } => circuit.terminals[terminal].region,
                };
                segments.push(WeakSegment {
                    cut,
                    mode: mode.clone(),
                    region,
                    weak_value_re: w.re,
                    weak_value_im: w.im,
                    present: w.norm() > epsilon,
                });
            }
        }
        completeness_defect = completeness_defect.max((sum - Complex64::ONE).norm());
    }
    Ok(WeakTraceReport {
        light: LightModel::Fock,
        outcome: outcome.clone(),
        outcome_probability,
        epsilon,
        completeness_defect,
        first_order_only: true,
        segments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterfactuality::DEFAULT_PRESENCE_EPSILON;
    use crate::optics::Polarization;
    use crate::protocols::{build_ev, build_noh, build_salih, BobAction, NOH_DEFAULT_THETA};

    const EPS: f64 = 1e-12;

    fn trace(p: &crate::protocols::ProtocolCircuit, outcome: &str) -> WeakTraceReport {
        weak_trace(
            &p.circuit,
            &PhotonState::vacuum(),
            &TerminalId::new(outcome),
            DEFAULT_PRESENCE_EPSILON,
        )
        .unwrap()
    }

    #[test]
    fn live_bomb_dark_click_leaves_no_trace_in_the_bomb_arm() {
        let p = build_ev(BobAction::Block).unwrap();
        let report = trace(&p, "D2");
        assert!((report.outcome_probability - 0.25).abs() < EPS);
        assert!(report.completeness_defect < 1e-9);
        // The photon that certified the obstacle shows no first-order
        // presence anywhere on Bob's side.
        assert_eq!(report.far_presences().count(), 0);
        // It is fully present on Alice's rail right after the first split.
        let w = report.weak_value(2, &Mode::live("u", None));
        assert!((w.re - 1.0).abs() < EPS && w.im.abs() < EPS);
        assert!(report.weak_value(2, &Mode::live("v", None)).norm() < EPS);
    }

    #[test]
    fn absorb_case_heralded_bit_has_no_channel_trace() {
        let p = build_noh(NOH_DEFAULT_THETA, BobAction::Block).unwrap();
        let report = trace(&p, "D1");
        assert_eq!(report.far_presences().count(), 0);
        for cut in 1..=report.cut_count() {
            assert!(report.weak_value(cut, &Mode::live("b", None)).norm() < EPS);
        }
    }

    #[test]
    fn reflect_case_bit_traverses_the_channel_at_half_weight() {
        let p = build_noh(NOH_DEFAULT_THETA, BobAction::Open).unwrap();
        let report = trace(&p, "D2");
        let w = report.weak_value(2, &Mode::live("b", None));
        assert!((w.re - 0.5).abs() < EPS && w.im.abs() < EPS);
        assert!(report.far_presences().count() > 0);
    }

    #[test]
    fn completeness_holds_at_every_cut_for_the_nested_protocol() {
        let p = build_salih(2, 2, false, BobAction::Block).unwrap();
        let report = trace(&p, "D1");
        assert!(report.completeness_defect < 1e-12);
    }

    #[test]
    fn nested_open_run_shows_presence_inside_but_not_entering_or_leaving() {
        // The discontinuous trace: post-selected on D0 with Bob open, the
        // photon registers inside the first cycle's far arm while both
        // connecting inner-rail segments stay silent.
        let p = build_salih(2, 2, false, BobAction::Open).unwrap();
        let report = trace(&p, "D0");
        assert!((report.outcome_probability - 0.25).abs() < EPS);

        // Cut 2: after the outer splitter, before the inner chain (lead-in).
        let lead_in = report.weak_value(2, &Mode::live("pinn", None));
        assert!(lead_in.norm() < EPS);
        // Cut 3: inside the inner chain, on Bob's arm.
        let inside = report.weak_value(3, &Mode::live("pbob", None));
        assert!((inside.re - 0.5).abs() < EPS && inside.im.abs() < EPS);
        // Cut 5: after the inner chain, before the dump (trailing).
        let trailing = report.weak_value(5, &Mode::live("pinn", None));
        assert!(trailing.norm() < EPS);

        assert!(report
            .far_presences()
            .any(|s| matches!(&s.mode, Mode::Live { rail, .. } if rail.as_str() == "pbob")));
        assert!(report.completeness_defect < 1e-9);
    }

    #[test]
    fn probability_weighted_weak_values_reproduce_forward_occupation() {
        // Duality: summing p(outcome) × W_outcome over all outcomes gives
        // |f|² per mode, the classical intensity fraction, at every cut.
        let p = build_salih(2, 2, false, BobAction::Block).unwrap();
        let forward = p.circuit.propagate(&PhotonState::vacuum()).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        let mut reports = Vec::new();
        for (terminal, prob) in &dist.probabilities {
            if *prob > 1e-15 {
                reports.push((*prob, trace(&p, terminal.as_str())));
            }
        }
        for cut in 1..=p.circuit.stage_count() {
            for (mode, amp) in forward.cut(cut).iter() {
                if !matches!(mode, Mode::Live { .. }) {
                    continue;
                }
                let mixed: Complex64 = reports
                    .iter()
                    .map(|(prob, r)| r.weak_value(cut, mode) * *prob)
                    .sum();
                assert!(
                    (mixed.re - amp.norm_sqr()).abs() < EPS,
                    "cut {cut} mode {mode}"
                );
                assert!(mixed.im.abs() < EPS);
            }
        }
    }

    #[test]
    fn polarized_modes_carry_their_polarization_in_the_report() {
        let p = build_salih(2, 2, true, BobAction::Block).unwrap();
        let report = trace(&p, "D1");
        assert!(report.segments.iter().any(|s| matches!(
            &s.mode,
            Mode::Live {
                pol: Some(Polarization::Vertical),
                ..
            }
        )));
        assert!(report.completeness_defect < 1e-9);
    }

    #[test]
    fn unreachable_outcome_is_rejected() {
        let p = build_salih(2, 2, false, BobAction::Block).unwrap();
        let err = weak_trace(
            &p.circuit,
            &PhotonState::vacuum(),
            &TerminalId::new("D3"),
            DEFAULT_PRESENCE_EPSILON,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            AnalysisError::Optics(OpticsError::NullPostSelection { .. })
        ));
    }
}
