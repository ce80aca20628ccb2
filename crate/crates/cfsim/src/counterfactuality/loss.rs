//! Abort bookkeeping and the information carried by losses.
//!
//! Every discarded run (a blocker click, a loss channel, an unmapped
//! terminal) is postselected away by the communicating parties, but an
//! eavesdropper who merely counts aborts still sees a channel: when the
//! abort rate depends on Bob's choice, each discarded photon leaks a
//! fraction of a bit. The leakage is quantified as the mutual information
//! between a uniformly random choice and the abort indicator.

use crate::optics::OutcomeDistribution;
use crate::protocols::{BitMapping, BitOutcome, BobAction};
use serde::Serialize;

/// Success, error, and abort probabilities for the two choices, plus the
/// per-run information an abort-counting observer gains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossReport {
    pub p_success_block: f64,
    pub p_success_open: f64,
    pub p_wrong_block: f64,
    pub p_wrong_open: f64,
    pub p_abort_block: f64,
    pub p_abort_open: f64,
    /// `|p_abort_block − p_abort_open|`; zero for a tuned channel.
    pub equal_loss_residual: f64,
    /// Mutual information, in bits, between a uniform choice and the
    /// abort flag: `H((b+o)/2) − (H(b) + H(o))/2`.
    pub leakage_bits: f64,
}

/// Shannon entropy of a coin with bias `p`, in bits, with `0·log 0 = 0`.
fn binary_entropy(p: f64) -> f64 {
    let q = 1.0 - p;
    let mut h = 0.0;
    if p > 0.0 {
        h -= p * p.log2();
    }
    if q > 0.0 {
        h -= q * q.log2();
    }
    h
}

fn tally(dist: &OutcomeDistribution, mapping: &BitMapping, action: BobAction) -> (f64, f64, f64) {
    let expected = BitMapping::expected(action);
    let mut success = 0.0;
    let mut wrong = 0.0;
    let mut abort = 0.0;
    for (terminal, &p) in &dist.probabilities {
        match mapping.outcome(terminal) {
            BitOutcome::Abort | BitOutcome::Undefined => abort += p,
            bit if bit == expected => success += p,
            _ => wrong += p,
        }
    }
    (success, wrong, abort)
}

/// Compare the outcome statistics of the two choices under one decoding.
pub fn loss_statistics(
    block: &OutcomeDistribution,
    open: &OutcomeDistribution,
    mapping: &BitMapping,
) -> LossReport {
    let (p_success_block, p_wrong_block, p_abort_block) = tally(block, mapping, BobAction::Block);
    let (p_success_open, p_wrong_open, p_abort_open) = tally(open, mapping, BobAction::Open);
    let mixed = 0.5 * (p_abort_block + p_abort_open);
    // Mutual information is nonnegative; rounding can leave a tiny
    // negative residue when the two abort rates coincide.
    let leakage_bits = (binary_entropy(mixed)
        - 0.5 * (binary_entropy(p_abort_block) + binary_entropy(p_abort_open)))
    .max(0.0);
    LossReport {
        p_success_block,
        p_success_open,
        p_wrong_block,
        p_wrong_open,
        p_abort_block,
        p_abort_open,
        equal_loss_residual: (p_abort_block - p_abort_open).abs(),
        leakage_bits,
    }
}
