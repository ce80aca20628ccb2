//! Nested outer/inner cycles with a blockable far arm.
//!
//! `M` outer cycles each rotate a small amplitude from Alice's outer rail
//! into an inner interferometer chain; `N` inner cycles each send a small
//! amplitude across to Bob's arm. When Bob blocks, the inner chain is
//! frozen by the absorptions (the Zeno effect), the inner amplitude
//! survives, and it builds up in the outer cycle toward detector `D1`.
//! When Bob leaves his arm open, every inner chain funnels its amplitude
//! completely into the dump `D3`, nothing returns to the outer rail, and
//! the photon drifts toward `D0`.
//!
//! The polarized construction uses wave plates and polarizing splitters
//! exactly as an optical bench would; the unpolarized one replaces each
//! (rotation, split) pair by a plain beamsplitter between dedicated rails.
//! Both yield identical outcome statistics.

use super::{
    params_from, BitMapping, BitOutcome, BobAction, CoarseCell, ProtocolCircuit, ProtocolError,
    ProtocolFamily,
};
use crate::optics::{
    Circuit, OpticalElement, Polarization, RailId, Region, TerminalId, TerminalInfo, TerminalKind,
};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

/// Build the nested-cycle circuit with `m` outer and `n` inner cycles.
pub fn build_salih(
    m: usize,
    n: usize,
    polarized: bool,
    action: BobAction,
) -> Result<ProtocolCircuit, ProtocolError> {
    if m == 0 || n == 0 {
        return Err(ProtocolError::InvalidParameter(
            "outer and inner cycle counts must be at least 1".into(),
        ));
    }
    let (circuit, cuts, cells) = if polarized {
        build_polarized(m, n, action)?
    } else {
        build_unpolarized(m, n, action)?
    };
    Ok(ProtocolCircuit {
        family: ProtocolFamily::Salih,
        bob_action: action,
        circuit,
        mapping: BitMapping::new(&[
            ("D1", BitOutcome::Bit1),
            ("D0", BitOutcome::Bit0),
            ("D3", BitOutcome::Abort),
            ("B", BitOutcome::Abort),
        ]),
        cycle_cuts: cuts,
        cells,
        params: params_from(&[
            ("outer", m.to_string()),
            ("inner", n.to_string()),
            ("polarized", polarized.to_string()),
        ]),
    })
}

fn shared_terminals() -> BTreeMap<TerminalId, TerminalInfo> {
    [
        (
            TerminalId::new("D0"),
            TerminalInfo::new(TerminalKind::Detector, Region::Alice),
        ),
        (
            TerminalId::new("D1"),
            TerminalInfo::new(TerminalKind::Detector, Region::Alice),
        ),
        (
            TerminalId::new("D3"),
            TerminalInfo::new(TerminalKind::LossChannel, Region::Bob),
        ),
        (
            TerminalId::new("B"),
            TerminalInfo::new(TerminalKind::Blocker, Region::Bob),
        ),
    ]
    .into()
}

type BuiltParts = (Circuit, Vec<usize>, Vec<CoarseCell>);

/// Dedicated-rail construction: `pout`/`pinn` carry the two outer-cycle
/// components, `pbob` is the arm crossing to Bob inside each inner cycle.
fn build_unpolarized(m: usize, n: usize, action: BobAction) -> Result<BuiltParts, ProtocolError> {
    let outer_theta = FRAC_PI_2 / m as f64;
    let inner_theta = FRAC_PI_2 / n as f64;
    let mut stages: Vec<Vec<OpticalElement>> = Vec::new();
    let mut cuts = Vec::with_capacity(m + 1);
    stages.push(vec![OpticalElement::source("pout", None)]);
    for _ in 0..m {
        stages.push(vec![OpticalElement::bs(outer_theta, "pout", "pinn")]);
        for _ in 0..n {
            stages.push(vec![OpticalElement::bs(inner_theta, "pbob", "pinn")]);
            stages.push(match action {
                BobAction::Block => vec![OpticalElement::blocker("pbob", "B")],
                BobAction::Open => vec![],
            });
        }
        stages.push(vec![OpticalElement::loss("pbob", "D3")]);
        cuts.push(stages.len());
    }
    stages.push(vec![
        OpticalElement::detector("pout", "D0"),
        OpticalElement::detector("pinn", "D1"),
    ]);
    cuts.push(stages.len());

    let regions: BTreeMap<RailId, Region> = [
        (RailId::new("pout"), Region::Alice),
        (RailId::new("pinn"), Region::Alice),
        (RailId::new("pbob"), Region::Bob),
    ]
    .into();
    let circuit = Circuit::new(stages, regions, shared_terminals())?;
    let cells = vec![
        CoarseCell::new("alice_outer", &["pout"], &["D0"]),
        CoarseCell::new("alice_inner", &["pinn"], &["D1"]),
        CoarseCell::new("bob", &["pbob"], &["B", "D3"]),
    ];
    Ok((circuit, cuts, cells))
}

/// Bench-style construction: wave plates rotate polarization, polarizing
/// splitters route H across to Bob and keep V on Alice's side. Only the H
/// component ever enters Bob's region.
fn build_polarized(m: usize, n: usize, action: BobAction) -> Result<BuiltParts, ProtocolError> {
    let outer_theta = FRAC_PI_2 / m as f64;
    let inner_theta = FRAC_PI_2 / n as f64;
    let mut stages: Vec<Vec<OpticalElement>> = Vec::new();
    let mut cuts = Vec::with_capacity(m + 1);
    stages.push(vec![OpticalElement::source(
        "out",
        Some(Polarization::Horizontal),
    )]);
    for _ in 0..m {
        stages.push(vec![OpticalElement::hwp(outer_theta, "out")]);
        // V leaves for the inner chain, H stays on the outer rail.
        stages.push(vec![OpticalElement::pbs("out", "out", "inn")]);
        for _ in 0..n {
            stages.push(vec![OpticalElement::hwp(inner_theta, "inn")]);
            // H crosses to Bob's arm...
            stages.push(vec![OpticalElement::pbs("inn", "bob", "inn")]);
            stages.push(match action {
                BobAction::Block => vec![OpticalElement::blocker("bob", "B")],
                BobAction::Open => vec![],
            });
            // ...and (when unblocked) rejoins the inner rail.
            stages.push(vec![OpticalElement::pbs("bob", "inn", "bob")]);
        }
        // Whatever reached H by the end of the inner chain is dumped; the V
        // remainder merges back onto the outer rail for the next cycle.
        stages.push(vec![OpticalElement::pbs("inn", "d3r", "inn")]);
        stages.push(vec![OpticalElement::loss("d3r", "D3")]);
        stages.push(vec![OpticalElement::pbs("inn", "inn", "out")]);
        cuts.push(stages.len());
    }
    stages.push(vec![OpticalElement::pbs("out", "d0r", "d1r")]);
    stages.push(vec![
        OpticalElement::detector("d0r", "D0"),
        OpticalElement::detector("d1r", "D1"),
    ]);
    cuts.push(stages.len());

    let regions: BTreeMap<RailId, Region> = [
        (RailId::new("out"), Region::Alice),
        (RailId::new("inn"), Region::Alice),
        (RailId::new("d0r"), Region::Alice),
        (RailId::new("d1r"), Region::Alice),
        (RailId::new("bob"), Region::Bob),
        (RailId::new("d3r"), Region::Bob),
    ]
    .into();
    let circuit = Circuit::new(stages, regions, shared_terminals())?;
    let cells = vec![
        CoarseCell::new("alice_outer", &["out", "d0r"], &["D0"]),
        CoarseCell::new("alice_inner", &["inn", "d1r"], &["D1"]),
        CoarseCell::new("bob", &["bob", "d3r"], &["B", "D3"]),
    ];
    Ok((circuit, cuts, cells))
}

/// Closed-form outer-cycle recurrence. Returns `(p_d0, p_d1)`: starting
/// from `(h, v) = (1, 0)`, each cycle applies the outer rotation and then
/// damps the inner-rail component by `γ = cosᴺ(π/2N)` when Bob blocks or
/// annihilates it when he is open.
pub fn salih_outer_recurrence(m: usize, n: usize, action: BobAction) -> (f64, f64) {
    let (c, s) = {
        let theta = FRAC_PI_2 / m as f64;
        (theta.cos(), theta.sin())
    };
    let gamma = match action {
        BobAction::Block => (FRAC_PI_2 / n as f64).cos().powi(n as i32),
        BobAction::Open => 0.0,
    };
    let (mut h, mut v) = (1.0_f64, 0.0_f64);
    for _ in 0..m {
        let (h2, v2) = (c * h - s * v, gamma * (s * h + c * v));
        h = h2;
        v = v2;
    }
    (h * h, v * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{Mode, PhotonState};

    const EPS: f64 = 1e-12;

    #[test]
    fn blocked_two_by_two_matches_hand_computed_fractions() {
        let p = build_salih(2, 2, false, BobAction::Block).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!((dist.probability("D0") - 1.0 / 16.0).abs() < EPS);
        assert!((dist.probability("D1") - 9.0 / 64.0).abs() < EPS);
        assert!((dist.probability("B") - 51.0 / 64.0).abs() < EPS);
        assert!(dist.probability("D3").abs() < EPS);
    }

    #[test]
    fn open_case_loses_every_inner_cycle_to_the_dump() {
        let p = build_salih(2, 2, false, BobAction::Open).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!((dist.probability("D0") - 0.25).abs() < EPS);
        assert!(dist.probability("D1").abs() < EPS);
        assert!((dist.probability("D3") - 0.75).abs() < EPS);
        assert!(dist.probability("B").abs() < EPS);
    }

    #[test]
    fn simulated_outcomes_match_the_outer_recurrence() {
        for (m, n) in [(1, 1), (2, 3), (3, 4), (5, 2)] {
            for action in [BobAction::Block, BobAction::Open] {
                let p = build_salih(m, n, false, action).unwrap();
                let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
                let (d0, d1) = salih_outer_recurrence(m, n, action);
                assert!((dist.probability("D0") - d0).abs() < EPS, "m={m} n={n}");
                assert!((dist.probability("D1") - d1).abs() < EPS, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn polarized_and_unpolarized_constructions_agree() {
        for (m, n) in [(1, 2), (2, 2), (3, 3)] {
            for action in [BobAction::Block, BobAction::Open] {
                let plain = build_salih(m, n, false, action).unwrap();
                let bench = build_salih(m, n, true, action).unwrap();
                let dp = plain.circuit.run_fock(&PhotonState::vacuum()).unwrap();
                let db = bench.circuit.run_fock(&PhotonState::vacuum()).unwrap();
                for (terminal, p) in &dp.probabilities {
                    assert!(
                        (db.probabilities[terminal] - p).abs() < EPS,
                        "m={m} n={n} action={action} terminal={terminal}"
                    );
                }
            }
        }
    }

    #[test]
    fn only_horizontal_light_ever_reaches_bobs_region() {
        let p = build_salih(2, 2, true, BobAction::Block).unwrap();
        let trace = p.circuit.propagate(&PhotonState::vacuum()).unwrap();
        for state in &trace.states {
            for (mode, amp) in state.iter() {
                if amp.norm_sqr() < 1e-30 {
                    continue;
                }
                if let Mode::Live { rail, pol } = mode {
                    if p.circuit.regions[rail] == Region::Bob {
                        assert_eq!(*pol, Some(Polarization::Horizontal), "rail {rail}");
                    }
                }
            }
        }
    }

    #[test]
    fn open_success_probability_is_independent_of_inner_depth() {
        let expected = (FRAC_PI_2 / 3.0).cos().powi(6);
        for n in [1usize, 2, 5, 9] {
            let p = build_salih(3, n, false, BobAction::Open).unwrap();
            let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
            assert!((dist.probability("D0") - expected).abs() < EPS, "n = {n}");
        }
    }

    #[test]
    fn cycle_cuts_sit_on_outer_cycle_boundaries() {
        let p = build_salih(2, 2, false, BobAction::Block).unwrap();
        // One source stage, then per cycle: outer splitter, two inner
        // (splitter, obstacle) pairs, and the dump stage.
        assert_eq!(p.cycle_cuts, vec![7, 13, 14]);
        assert_eq!(p.circuit.stage_count(), 14);
    }
}
