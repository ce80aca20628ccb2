//! Nested interferometer chain with self-cancelling inner arms.
//!
//! An initial splitter diverts amplitude `sin θ0` from the outer rail onto
//! a carrier rail that threads a chain of small interferometers. Each inner
//! interferometer briefly opens an arm into Bob's region and closes again;
//! when its exit angle complements its entry angle (`θ_exit = π/2 − θ_entry`,
//! the "dump lock"), an unobstructed interferometer steers the carrier
//! entirely into a local dump, so an open Bob makes detector `D1`
//! structurally unreachable. A blocking Bob interrupts the cancellation and
//! `D1` can fire. The final splitter (`θf`) recombines the outer rail with
//! whatever survives the chain, feeding `D0` and the exit dump.

use super::{
    params_from, BitMapping, BitOutcome, BobAction, CoarseCell, ProtocolCircuit, ProtocolError,
    ProtocolFamily,
};
use crate::optics::{
    Circuit, OpticalElement, RailId, Region, TerminalId, TerminalInfo, TerminalKind,
};
use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

/// Entry and exit splitter angles of one inner interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerPair {
    pub entry: f64,
    pub exit: f64,
}

/// Full angle assignment for the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct VaidmanAngles {
    pub theta_0: f64,
    pub inner: Vec<InnerPair>,
    pub theta_f: f64,
}

impl VaidmanAngles {
    /// Every splitter at the same angle (the textbook illustration).
    pub fn uniform(inner_count: usize, angle: f64) -> Self {
        VaidmanAngles {
            theta_0: angle,
            inner: vec![
                InnerPair {
                    entry: angle,
                    exit: angle,
                };
                inner_count
            ],
            theta_f: angle,
        }
    }

    /// Chain with every inner exit locked to `π/2 − entry`, which makes an
    /// unobstructed inner interferometer dump its carrier completely.
    pub fn with_dump_lock(theta_0: f64, entries: &[f64], theta_f: f64) -> Self {
        VaidmanAngles {
            theta_0,
            inner: entries
                .iter()
                .map(|&entry| InnerPair {
                    entry,
                    exit: FRAC_PI_2 - entry,
                })
                .collect(),
            theta_f,
        }
    }

    pub fn inner_count(&self) -> usize {
        self.inner.len()
    }

    /// Ordered parameter-slot names for a chain of `inner_count`
    /// interferometers: `theta_0`, `inner1_entry`, `inner1_exit`, ...,
    /// `theta_f`. This is the shared vocabulary of the tuner and the
    /// command-line configuration.
    pub fn slot_names(inner_count: usize) -> Vec<String> {
        let mut names = vec!["theta_0".to_string()];
        for i in 1..=inner_count {
            names.push(format!("inner{i}_entry"));
            names.push(format!("inner{i}_exit"));
        }
        names.push("theta_f".to_string());
        names
    }

    /// Assemble from a slot-name map; every slot must be present.
    pub fn from_slots(
        inner_count: usize,
        slots: &BTreeMap<String, f64>,
    ) -> Result<Self, ProtocolError> {
        let get = |name: &str| {
            slots.get(name).copied().ok_or_else(|| {
                ProtocolError::InvalidParameter(format!("missing angle slot `{name}`"))
            })
        };
        let mut inner = Vec::with_capacity(inner_count);
        for i in 1..=inner_count {
            inner.push(InnerPair {
                entry: get(&format!("inner{i}_entry"))?,
                exit: get(&format!("inner{i}_exit"))?,
            });
        }
        Ok(VaidmanAngles {
            theta_0: get("theta_0")?,
            inner,
            theta_f: get("theta_f")?,
        })
    }

    pub fn to_slots(&self) -> BTreeMap<String, f64> {
        let mut slots = BTreeMap::new();
        slots.insert("theta_0".to_string(), self.theta_0);
        for (i, pair) in self.inner.iter().enumerate() {
            slots.insert(format!("inner{}_entry", i + 1), pair.entry);
            slots.insert(format!("inner{}_exit", i + 1), pair.exit);
        }
        slots.insert("theta_f".to_string(), self.theta_f);
        slots
    }

    fn validate(&self) -> Result<(), ProtocolError> {
        if self.inner.is_empty() {
            return Err(ProtocolError::InvalidParameter(
                "the chain needs at least one inner interferometer".into(),
            ));
        }
        let all = std::iter::once(self.theta_0)
            .chain(self.inner.iter().flat_map(|p| [p.entry, p.exit]))
            .chain(std::iter::once(self.theta_f));
        for angle in all {
            if !angle.is_finite() {
                return Err(ProtocolError::InvalidParameter(format!(
                    "angles must be finite, got {angle}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for VaidmanAngles {
    fn default() -> Self {
        VaidmanAngles::uniform(2, FRAC_PI_4)
    }
}

/// Build the chain circuit for one choice of Bob's action.
pub fn build_vaidman(
    angles: &VaidmanAngles,
    action: BobAction,
) -> Result<ProtocolCircuit, ProtocolError> {
    angles.validate()?;
    let k = angles.inner_count();
    let mut stages: Vec<Vec<OpticalElement>> = Vec::new();
    let mut cuts = Vec::with_capacity(k + 2);
    stages.push(vec![OpticalElement::source("outer", None)]);
    stages.push(vec![OpticalElement::bs(angles.theta_0, "outer", "r")]);
    cuts.push(stages.len());

    let mut chain_rails = vec![RailId::new("r")];
    let mut chain_terms = Vec::new();
    let mut bob_rails = Vec::new();
    let mut bob_terms = Vec::new();
    for (i, pair) in angles.inner.iter().enumerate() {
        let idx = i + 1;
        let arm = format!("c{idx}");
        let obstacle = format!("B{idx}");
        stages.push(vec![OpticalElement::bs(pair.entry, "r", arm.clone())]);
        stages.push(match action {
            BobAction::Block => vec![OpticalElement::blocker(arm.clone(), obstacle.clone())],
            BobAction::Open => vec![],
        });
        let (sink_rail, sink_stage) = if idx == k {
            (
                "d1r".to_string(),
                vec![OpticalElement::detector("d1r", "D1")],
            )
        } else {
            let dump = format!("dump{idx}");
            let drain = format!("DL{idx}");
            chain_rails.push(RailId::new(dump.clone()));
            chain_terms.push(TerminalId::new(drain.clone()));
            (dump.clone(), vec![OpticalElement::loss(dump, drain)])
        };
        stages.push(vec![OpticalElement::bs_routed(
            pair.exit,
            "r",
            arm.clone(),
            "r",
            sink_rail,
        )]);
        stages.push(sink_stage);
        cuts.push(stages.len());
        bob_rails.push(RailId::new(arm));
        bob_terms.push(TerminalId::new(obstacle));
    }
    chain_rails.push(RailId::new("d1r"));
    chain_terms.push(TerminalId::new("D1"));

    stages.push(vec![OpticalElement::bs_routed(
        angles.theta_f,
        "outer",
        "r",
        "d0r",
        "xr",
    )]);
    stages.push(vec![
        OpticalElement::detector("d0r", "D0"),
        OpticalElement::loss("xr", "DLX"),
    ]);
    cuts.push(stages.len());

    let mut regions: BTreeMap<RailId, Region> = [
        (RailId::new("outer"), Region::Alice),
        (RailId::new("d0r"), Region::Alice),
        (RailId::new("xr"), Region::Alice),
    ]
    .into();
    for rail in &chain_rails {
        regions.insert(rail.clone(), Region::Alice);
    }
    for rail in &bob_rails {
        regions.insert(rail.clone(), Region::Bob);
    }

    let mut terminals: BTreeMap<TerminalId, TerminalInfo> = [
        (
            TerminalId::new("D0"),
            TerminalInfo::new(TerminalKind::Detector, Region::Alice),
        ),
        (
            TerminalId::new("D1"),
            TerminalInfo::new(TerminalKind::Detector, Region::Alice),
        ),
        (
            TerminalId::new("DLX"),
            TerminalInfo::new(TerminalKind::LossChannel, Region::Alice),
        ),
    ]
    .into();
    for term in &chain_terms {
        terminals
            .entry(term.clone())
            .or_insert(TerminalInfo::new(TerminalKind::LossChannel, Region::Alice));
    }
    for term in &bob_terms {
        terminals.insert(
            term.clone(),
            TerminalInfo::new(TerminalKind::Blocker, Region::Bob),
        );
    }

    let mut decode = vec![
        ("D1".to_string(), BitOutcome::Bit1),
        ("D0".to_string(), BitOutcome::Bit0),
        ("DLX".to_string(), BitOutcome::Abort),
    ];
    for term in chain_terms.iter().filter(|t| t.as_str() != "D1") {
        decode.push((term.to_string(), BitOutcome::Abort));
    }
    for term in &bob_terms {
        decode.push((term.to_string(), BitOutcome::Abort));
    }
    let mapping = BitMapping {
        decode: decode
            .into_iter()
            .map(|(t, b)| (TerminalId::new(t), b))
            .collect(),
    };

    let circuit = Circuit::new(stages, regions, terminals)?;
    let mut params = params_from(&[("inner_count", k.to_string())]);
    for (name, value) in angles.to_slots() {
        params.insert(name, format!("{value}"));
    }
    Ok(ProtocolCircuit {
        family: ProtocolFamily::Vaidman,
        bob_action: action,
        circuit,
        mapping,
        cycle_cuts: cuts,
        cells: vec![
            CoarseCell {
                name: "outer".into(),
                rails: vec![RailId::new("outer"), RailId::new("d0r"), RailId::new("xr")],
                terminals: vec![TerminalId::new("D0"), TerminalId::new("DLX")],
            },
            CoarseCell {
                name: "chain".into(),
                rails: chain_rails,
                terminals: chain_terms,
            },
            CoarseCell {
                name: "bob".into(),
                rails: bob_rails,
                terminals: bob_terms,
            },
        ],
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::PhotonState;

    const EPS: f64 = 1e-12;

    #[test]
    fn uniform_quarter_pi_chain_matches_hand_computed_fractions() {
        let angles = VaidmanAngles::uniform(2, FRAC_PI_4);

        let open = build_vaidman(&angles, BobAction::Open).unwrap();
        let dist = open.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!((dist.probability("D0") - 0.25).abs() < EPS);
        assert!(dist.probability("D1").abs() < EPS);
        assert!((dist.probability("DL1") - 0.5).abs() < EPS);
        assert!((dist.probability("DLX") - 0.25).abs() < EPS);

        let blocked = build_vaidman(&angles, BobAction::Block).unwrap();
        let dist = blocked.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!((dist.probability("D1") - 1.0 / 32.0).abs() < EPS);
        assert!((dist.probability("D0") - 9.0 / 64.0).abs() < EPS);
        assert!((dist.probability("B1") - 0.25).abs() < EPS);
        assert!((dist.probability("B2") - 1.0 / 16.0).abs() < EPS);
        assert!((dist.probability("DL1") - 0.125).abs() < EPS);
        assert!((dist.probability("DLX") - 25.0 / 64.0).abs() < EPS);
    }

    #[test]
    fn dump_lock_makes_the_signal_detector_unreachable_when_open() {
        let angles = VaidmanAngles::with_dump_lock(0.6, &[0.3, 1.1, 0.75], 0.9);
        let p = build_vaidman(&angles, BobAction::Open).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!(dist.probability("D1").abs() < 1e-15);
        for i in 1..=3 {
            assert!(dist.probability(&format!("B{i}")).abs() < EPS);
        }
        assert!((dist.total() - 1.0).abs() < EPS);
    }

    #[test]
    fn blocking_makes_the_signal_detector_reachable() {
        let angles = VaidmanAngles::with_dump_lock(0.6, &[0.3, 1.1, 0.75], 0.9);
        let p = build_vaidman(&angles, BobAction::Block).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!(dist.probability("D1") > 1e-6);
    }

    #[test]
    fn slots_round_trip_and_enumerate_in_order() {
        assert_eq!(
            VaidmanAngles::slot_names(2),
            vec![
                "theta_0",
                "inner1_entry",
                "inner1_exit",
                "inner2_entry",
                "inner2_exit",
                "theta_f"
            ]
        );
        let angles = VaidmanAngles::with_dump_lock(0.5, &[0.4, 0.8], 1.2);
        let rebuilt = VaidmanAngles::from_slots(2, &angles.to_slots()).unwrap();
        assert_eq!(rebuilt, angles);
        let missing = BTreeMap::from([("theta_0".to_string(), 0.5)]);
        assert!(VaidmanAngles::from_slots(1, &missing).is_err());
    }

    #[test]
    fn single_interferometer_chain_builds_and_conserves() {
        let angles = VaidmanAngles::uniform(1, 0.5);
        let p = build_vaidman(&angles, BobAction::Block).unwrap();
        let dist = p.circuit.run_fock(&PhotonState::vacuum()).unwrap();
        assert!((dist.total() - 1.0).abs() < EPS);
        // No intermediate dumps exist for a one-interferometer chain.
        assert!(!dist.probabilities.contains_key(&TerminalId::new("DL1")));
    }
}
