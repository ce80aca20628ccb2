//! Interaction-free obstacle detection in a balanced interferometer.
//!
//! A single photon enters a balanced two-arm interferometer whose lower arm
//! passes through Bob's station. With nothing in the arm the interferometer
//! is aligned so detector `D1` always fires. A live obstacle (`bomb`)
//! in the arm spoils the interference: half the runs detonate it, a quarter
//! fire `D1`, and a quarter fire `D2`, the otherwise-dark port. A `D2`
//! click therefore certifies the obstacle without the photon having been
//! absorbed by it.

use super::{
    params_from, BitMapping, BitOutcome, BobAction, CoarseCell, ProtocolCircuit, ProtocolError,
    ProtocolFamily,
};
use crate::optics::{
    Circuit, OpticalElement, RailId, Region, TerminalId, TerminalInfo, TerminalKind,
};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

/// Build the interferometer for one state of Bob's arm. `Block` means the
/// bomb is live, `Open` that it is a dud (equivalently: absent).
pub fn build_ev(action: BobAction) -> Result<ProtocolCircuit, ProtocolError> {
    let bomb_stage = match action {
        BobAction::Block => vec![OpticalElement::blocker("v", "bomb")],
        BobAction::Open => vec![],
    };
    // The recombiner writes onto fresh rails: its outputs are detector feeds
    // inside Alice's station, not Bob's arm, and the region tags say so.
    let stages = vec![
        vec![OpticalElement::source("u", None)],
        vec![OpticalElement::bs(FRAC_PI_4, "u", "v")],
        bomb_stage,
        vec![OpticalElement::bs_routed(FRAC_PI_4, "u", "v", "d2r", "d1r")],
        vec![
            OpticalElement::detector("d1r", "D1"),
            OpticalElement::detector("d2r", "D2"),
        ],
    ];
    let regions: BTreeMap<RailId, Region> = [
        (RailId::new("u"), Region::Alice),
        (RailId::new("v"), Region::Bob),
        (RailId::new("d1r"), Region::Alice),
        (RailId::new("d2r"), Region::Alice),
    ]
    .into();
    let terminals: BTreeMap<TerminalId, TerminalInfo> = [
        (
            TerminalId::new("D1"),
            TerminalInfo::new(TerminalKind::Detector, Region::Alice),
        ),
        (
            TerminalId::new("D2"),
            TerminalInfo::new(TerminalKind::Detector, Region::Alice),
        ),
        (
            TerminalId::new("bomb"),
            TerminalInfo::new(TerminalKind::Explosion, Region::Bob),
        ),
    ]
    .into();
    let circuit = Circuit::new(stages, regions, terminals)?;
    let cuts = (1..=circuit.stage_count()).collect();
    Ok(ProtocolCircuit {
        family: ProtocolFamily::Ev,
        bob_action: action,
        circuit,
        mapping: BitMapping::new(&[
            ("D2", BitOutcome::Bit1),
            ("D1", BitOutcome::Bit0),
            ("bomb", BitOutcome::Abort),
        ]),
        cycle_cuts: cuts,
        cells: vec![
            CoarseCell::new("alice", &["u", "d1r", "d2r"], &["D1", "D2"]),
            CoarseCell::new("bob", &["v"], &["bomb"]),
        ],
        params: params_from(&[(
            "bomb",
            match action {
                BobAction::Block => "live".to_string(),
                BobAction::Open => "dud".to_string(),
            },
        )]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::PhotonState;

    const EPS: f64 = 1e-12;

    #[test]
    fn dud_bomb_always_fires_the_aligned_detector() {
        let p = build_ev(BobAction::Open).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!((dist.probability("D1") - 1.0).abs() < EPS);
        assert!(dist.probability("D2").abs() < EPS);
        assert!(dist.probability("bomb").abs() < EPS);
    }

    #[test]
    fn live_bomb_splits_runs_half_quarter_quarter() {
        let p = build_ev(BobAction::Block).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!((dist.probability("bomb") - 0.5).abs() < EPS);
        assert!((dist.probability("D1") - 0.25).abs() < EPS);
        assert!((dist.probability("D2") - 0.25).abs() < EPS);
    }

    #[test]
    fn dark_port_click_is_impossible_without_the_obstacle() {
        // The decoding relies on D2 never firing in the dud case.
        let p = build_ev(BobAction::Open).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        let d2 = p.mapping.terminals_for(BitOutcome::Bit1)[0];
        assert_eq!(d2, &TerminalId::new("D2"));
        assert!(dist.probabilities[d2].abs() < EPS);
    }

    #[test]
    fn both_actions_share_one_stage_grid() {
        let live = build_ev(BobAction::Block).unwrap();
        let dud = build_ev(BobAction::Open).unwrap();
        assert_eq!(live.circuit.stage_count(), dud.circuit.stage_count());
        assert_eq!(live.cycle_cuts, dud.cycle_cuts);
    }
}
