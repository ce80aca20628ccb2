//! Property tests for the invariants every protocol circuit must satisfy,
//! regardless of family or parameters: probabilities form a distribution,
//! single-photon and classical terminal statistics coincide, and weak
//! values at any cut account for the whole post-selected amplitude.

use cfsim::counterfactuality::weak_trace;
use cfsim::optics::PhotonState;
use cfsim::protocols::{
    build_ev, build_noh, build_salih, build_vaidman, build_zeno, BobAction, ProtocolCircuit,
    VaidmanAngles,
};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn actions() -> impl Strategy<Value = BobAction> {
    prop_oneof![Just(BobAction::Block), Just(BobAction::Open)]
}

/// A protocol circuit drawn from every family at small, varied parameters.
fn protocols() -> impl Strategy<Value = ProtocolCircuit> {
    prop_oneof![
        actions().prop_map(|a| build_ev(a).expect("ev always builds")),
        (0.05f64..1.5, actions()).prop_map(|(theta, a)| build_noh(theta, a).expect("noh in range")),
        (1usize..40, actions()).prop_map(|(n, a)| build_zeno(n, a).expect("zeno in range")),
        (1usize..5, 1usize..5, any::<bool>(), actions())
            .prop_map(|(m, n, pol, a)| { build_salih(m, n, pol, a).expect("salih in range") }),
        (1usize..4, 0.05f64..1.5, 0.05f64..1.5, actions()).prop_map(|(k, e, x, a)| {
            let mut angles = VaidmanAngles::uniform(k, e);
            for pair in &mut angles.inner {
                pair.exit = x;
            }
            build_vaidman(&angles, a).expect("vaidman in range")
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Outcome probabilities are a distribution in both light models.
    #[test]
    fn outcome_probabilities_normalize(protocol in protocols()) {
        let input = PhotonState::vacuum();
        let fock = protocol.circuit.run_fock(&input).unwrap();
        let classical = protocol.circuit.run_classical(&input).unwrap();
        prop_assert!((fock.total() - 1.0).abs() < TOL);
        prop_assert!((classical.total() - 1.0).abs() < TOL);
    }

    /// A single photon and a classical pulse land on every terminal with
    /// the same weight; only the event semantics differ.
    #[test]
    fn light_models_agree_per_terminal(protocol in protocols()) {
        let input = PhotonState::vacuum();
        let fock = protocol.circuit.run_fock(&input).unwrap();
        let classical = protocol.circuit.run_classical(&input).unwrap();
        prop_assert_eq!(fock.probabilities.len(), classical.probabilities.len());
        for (terminal, &p) in &fock.probabilities {
            let q = classical.probability(terminal.as_str());
            prop_assert!((p - q).abs() < TOL, "{}: {} vs {}", terminal, p, q);
        }
    }

    /// Weak values over any cut sum to one for every reachable outcome.
    #[test]
    fn weak_values_are_complete_at_every_cut(protocol in protocols()) {
        let input = PhotonState::vacuum();
        let dist = protocol.circuit.run_fock(&input).unwrap();
        for (terminal, &p) in &dist.probabilities {
            if p < 1e-6 {
                continue;
            }
            let report = weak_trace(&protocol.circuit, &input, terminal, 1e-10).unwrap();
            prop_assert!(report.completeness_defect < TOL,
                "outcome {}: defect {}", terminal, report.completeness_defect);
        }
    }
}
