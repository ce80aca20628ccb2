//! Single-cycle exchange with a far station that detects or reflects.
//!
//! Alice's splitter sends part of the photon's amplitude down the channel
//! to Bob. If Bob absorbs (his detector `DB` watches the channel), a click
//! on Alice's `D1` heralds his choice while the photon, conditioned on that
//! click, never took the channel path. If Bob reflects, the folded
//! interferometer is aligned and `D2` always fires. The fold is modeled by
//! applying the same splitter twice, which is the unfolded equivalent of a
//! mirror-return onto one splitter.

use super::{
    params_from, BitMapping, BitOutcome, BobAction, CoarseCell, ProtocolCircuit, ProtocolError,
    ProtocolFamily,
};
use crate::optics::{
    Circuit, OpticalElement, RailId, Region, TerminalId, TerminalInfo, TerminalKind,
};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

/// The balanced choice used throughout the literature on this scheme.
pub const NOH_DEFAULT_THETA: f64 = FRAC_PI_4;

/// Build the exchange circuit. `theta` is the splitter angle (amplitude
/// `sin θ` enters the channel); `Block` means Bob absorbs, `Open` that he
/// reflects.
pub fn build_noh(theta: f64, action: BobAction) -> Result<ProtocolCircuit, ProtocolError> {
    if !theta.is_finite() {
        return Err(ProtocolError::InvalidParameter(format!(
            "splitter angle must be finite, got {theta}"
        )));
    }
    let bob_stage = match action {
        BobAction::Block => vec![OpticalElement::detector("b", "DB")],
        BobAction::Open => vec![],
    };
    // The second splitter pass models the fold's return onto the splitter;
    // its outputs are Alice-side detector feeds, so they get fresh rails
    // rather than writing back onto the channel rail.
    let stages = vec![
        vec![OpticalElement::source("a", None)],
        vec![OpticalElement::bs(theta, "a", "b")],
        bob_stage,
        vec![OpticalElement::bs_routed(theta, "a", "b", "d1r", "d2r")],
        vec![
            OpticalElement::detector("d1r", "D1"),
            OpticalElement::detector("d2r", "D2"),
        ],
    ];
    let regions: BTreeMap<RailId, Region> = [
        (RailId::new("a"), Region::Alice),
        (RailId::new("b"), Region::Channel),
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
            TerminalId::new("DB"),
            TerminalInfo::new(TerminalKind::Detector, Region::Bob),
        ),
    ]
    .into();
    let circuit = Circuit::new(stages, regions, terminals)?;
    let cuts = (1..=circuit.stage_count()).collect();
    Ok(ProtocolCircuit {
        family: ProtocolFamily::Noh,
        bob_action: action,
        circuit,
        mapping: BitMapping::new(&[
            ("D1", BitOutcome::Bit1),
            ("D2", BitOutcome::Bit0),
            ("DB", BitOutcome::Abort),
        ]),
        cycle_cuts: cuts,
        cells: vec![
            CoarseCell::new("alice", &["a", "d1r", "d2r"], &["D1", "D2"]),
            CoarseCell::new("channel", &["b"], &[]),
            CoarseCell::new("bob", &[], &["DB"]),
        ],
        params: params_from(&[
            ("theta", format!("{theta}")),
            (
                "far_station",
                match action {
                    BobAction::Block => "absorb".to_string(),
                    BobAction::Open => "reflect".to_string(),
                },
            ),
        ]),
    })
}
