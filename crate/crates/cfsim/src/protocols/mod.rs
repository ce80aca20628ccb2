//! Builders for the five counterfactual-communication protocols.
//!
//! Each builder assembles a staged [`Circuit`] for one choice of Bob's
//! action (blocking or opening his side), together with the bit decoding,
//! the natural cycle-boundary cuts, and a default coarse-graining used by
//! the history analyses. Both actions of a protocol share the same stage
//! grid (empty stages stand in for removed obstacles), so stage cuts and
//! loss statistics line up between the two circuits.

mod ev;
mod noh;
mod salih;
mod vaidman;
mod zeno;

pub use ev::build_ev;
pub use noh::{build_noh, NOH_DEFAULT_THETA};
pub use salih::{build_salih, salih_outer_recurrence};
pub use vaidman::{build_vaidman, InnerPair, VaidmanAngles};
pub use zeno::{build_zeno, zeno_blocked_survival};

use crate::optics::{Circuit, OpticsError, RailId, TerminalId};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors from protocol construction.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProtocolError {
    #[error("invalid protocol parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

/// The five protocol families this crate models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolFamily {
    /// Interaction-free obstacle detection in a single interferometer.
    Ev,
    /// Single-cycle exchange with a detecting or reflecting far station.
    Noh,
    /// Chained weak splitters pinning the photon on Alice's side.
    Zeno,
    /// Nested outer/inner cycles with a blockable far arm.
    Salih,
    /// Nested interferometer chain with self-cancelling inner arms.
    Vaidman,
}

impl fmt::Display for ProtocolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ProtocolFamily::Ev => "ev",
            ProtocolFamily::Noh => "noh",
            ProtocolFamily::Zeno => "zeno",
            ProtocolFamily::Salih => "salih",
            ProtocolFamily::Vaidman => "vaidman",
        };
        write!(f, "{name}")
    }
}

impl FromStr for ProtocolFamily {
    type Err = ProtocolError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ev" => Ok(ProtocolFamily::Ev),
            "noh" => Ok(ProtocolFamily::Noh),
            "zeno" => Ok(ProtocolFamily::Zeno),
            "salih" => Ok(ProtocolFamily::Salih),
            "vaidman" => Ok(ProtocolFamily::Vaidman),
            other => Err(ProtocolError::InvalidParameter(format!(
                "unknown protocol `{other}` (expected ev|noh|zeno|salih|vaidman)"
            ))),
        }
    }
}

/// What Bob does with his end of the apparatus during one transmission.
///
/// `Block` inserts his absorber (a live bomb, a detector, an obstacle);
/// `Open` removes it. By convention `Block` encodes bit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BobAction {
    Block,
    Open,
}

impl fmt::Display for BobAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BobAction::Block => write!(f, "block"),
            BobAction::Open => write!(f, "open"),
        }
    }
}

impl FromStr for BobAction {
    type Err = ProtocolError;

    /// Accepts protocol-specific synonyms: a `live` bomb blocks and a `dud`
    /// does not; an `absorb`ing far station blocks and a `reflect`ing one
    /// does not.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "block" | "live" | "absorb" => Ok(BobAction::Block),
            "open" | "dud" | "reflect" => Ok(BobAction::Open),
            other => Err(ProtocolError::InvalidParameter(format!(
                "unknown action `{other}` (expected block|open, or live|dud, absorb|reflect)"
            ))),
        }
    }
}

/// Logical meaning of one terminal click.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BitOutcome {
    Bit0,
    Bit1,
    Abort,
    Undefined,
}

impl fmt::Display for BitOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitOutcome::Bit0 => write!(f, "bit0"),
            BitOutcome::Bit1 => write!(f, "bit1"),
            BitOutcome::Abort => write!(f, "abort"),
            BitOutcome::Undefined => write!(f, "undefined"),
        }
    }
}

/// Decoding table from terminal clicks to logical outcomes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BitMapping {
    pub decode: BTreeMap<TerminalId, BitOutcome>,
}

impl BitMapping {
    pub fn new(entries: &[(&str, BitOutcome)]) -> Self {
        BitMapping {
            decode: entries
                .iter()
                .map(|(t, b)| (TerminalId::new(*t), *b))
                .collect(),
        }
    }

    /// Outcome a click on `terminal` decodes to (`Undefined` if unmapped).
    pub fn outcome(&self, terminal: &TerminalId) -> BitOutcome {
        self.decode
            .get(terminal)
            .copied()
            .unwrap_or(BitOutcome::Undefined)
    }

    /// Terminals decoding to `outcome`, in deterministic order.
    pub fn terminals_for(&self, outcome: BitOutcome) -> Vec<&TerminalId> {
        self.decode
            .iter()
            .filter(|(_, b)| **b == outcome)
            .map(|(t, _)| t)
            .collect()
    }

    /// The bit value Bob's action should decode to when the run succeeds.
    pub fn expected(action: BobAction) -> BitOutcome {
        match action {
            BobAction::Block => BitOutcome::Bit1,
            BobAction::Open => BitOutcome::Bit0,
        }
    }
}

/// One cell of a coarse-graining: a named group of rails and terminals
/// treated as a single "location" by the history analyses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarseCell {
    pub name: String,
    pub rails: Vec<RailId>,
    pub terminals: Vec<TerminalId>,
}

impl CoarseCell {
    pub fn new(name: &str, rails: &[&str], terminals: &[&str]) -> Self {
        CoarseCell {
            name: name.to_string(),
            rails: rails.iter().map(|r| RailId::new(*r)).collect(),
            terminals: terminals.iter().map(|t| TerminalId::new(*t)).collect(),
        }
    }
}

/// A fully assembled protocol instance: the circuit for one choice of
/// Bob's action plus everything analyses need to interpret it.
#[derive(Debug, Clone)]
pub struct ProtocolCircuit {
    pub family: ProtocolFamily,
    pub bob_action: BobAction,
    pub circuit: Circuit,
    pub mapping: BitMapping,
    /// Stage cuts at cycle boundaries (always ends with the final cut).
    pub cycle_cuts: Vec<usize>,
    /// Default coarse-graining covering every rail and terminal exactly once.
    pub cells: Vec<CoarseCell>,
    /// Construction parameters echoed into reports.
    pub params: BTreeMap<String, String>,
}

impl ProtocolCircuit {
    /// Compact label such as `salih(m=2, n=2, polarized=false, bob=block)`.
    pub fn label(&self) -> String {
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(", ");
        format!("{}({params}, bob={})", self.family, self.bob_action)
    }
}

pub(crate) fn params_from(entries: &[(&str, String)]) -> BTreeMap<String, String> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}
