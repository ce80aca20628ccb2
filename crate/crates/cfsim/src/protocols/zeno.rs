//! Chained weak splitters: the quantum Zeno channel.
//!
//! `N` splitters of angle π/2N each leak a little amplitude from Alice's
//! rail toward Bob. With Bob's side open the leaks add coherently and the
//! photon crosses completely (`DB` fires with certainty). With Bob blocking,
//! every leaked sliver is absorbed, the coherent buildup is interrupted,
//! and the photon survives on Alice's side with probability
//! `cos²ᴺ(π/2N) → 1` as `N` grows.

use super::{
    params_from, BitMapping, BitOutcome, BobAction, CoarseCell, ProtocolCircuit, ProtocolError,
    ProtocolFamily,
};
use crate::optics::{
    Circuit, OpticalElement, RailId, Region, TerminalId, TerminalInfo, TerminalKind,
};
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

/// Build the chain with `cycles` splitters. `Block` places Bob's absorber
/// after every splitter; `Open` leaves his side clear.
pub fn build_zeno(cycles: usize, action: BobAction) -> Result<ProtocolCircuit, ProtocolError> {
    if cycles == 0 {
        return Err(ProtocolError::InvalidParameter(
            "cycle count must be at least 1".into(),
        ));
    }
    let theta = FRAC_PI_2 / cycles as f64;
    let mut stages = Vec::with_capacity(2 * cycles + 2);
    let mut cuts = Vec::with_capacity(cycles + 1);
    stages.push(vec![OpticalElement::source("a", None)]);
    for _ in 0..cycles {
        stages.push(vec![OpticalElement::bs(theta, "a", "b")]);
        stages.push(match action {
            BobAction::Block => vec![OpticalElement::blocker("b", "B")],
            BobAction::Open => vec![],
        });
        cuts.push(stages.len());
    }
    stages.push(vec![
        OpticalElement::detector("a", "DA"),
        OpticalElement::detector("b", "DB"),
    ]);
    cuts.push(stages.len());

    let regions: BTreeMap<RailId, Region> = [
        (RailId::new("a"), Region::Alice),
        (RailId::new("b"), Region::Bob),
    ]
    .into();
    let terminals: BTreeMap<TerminalId, TerminalInfo> = [
        (
            TerminalId::new("DA"),
            TerminalInfo::new(TerminalKind::Detector, Region::Alice),
        ),
        (
            TerminalId::new("DB"),
            TerminalInfo::new(TerminalKind::Detector, Region::Bob),
        ),
        (
            TerminalId::new("B"),
            TerminalInfo::new(TerminalKind::Blocker, Region::Bob),
        ),
    ]
    .into();
    let circuit = Circuit::new(stages, regions, terminals)?;
    Ok(ProtocolCircuit {
        family: ProtocolFamily::Zeno,
        bob_action: action,
        circuit,
        mapping: BitMapping::new(&[
            ("DA", BitOutcome::Bit1),
            ("DB", BitOutcome::Bit0),
            ("B", BitOutcome::Abort),
        ]),
        cycle_cuts: cuts,
        cells: vec![
            CoarseCell::new("alice", &["a"], &["DA"]),
            CoarseCell::new("bob", &["b"], &["DB", "B"]),
        ],
        params: params_from(&[("cycles", cycles.to_string())]),
    })
}

/// Survival probability on Alice's side when Bob blocks: `cos²ᴺ(π/2N)`.
pub fn zeno_blocked_survival(cycles: usize) -> f64 {
    (FRAC_PI_2 / cycles as f64).cos().powi(2 * cycles as i32)
}
