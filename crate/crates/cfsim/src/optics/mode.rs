//! Mode addressing: rails, polarizations, terminals, regions.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of a spatial rail (an optical path) in a circuit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RailId(pub String);

impl RailId {
    pub fn new(name: impl Into<String>) -> Self {
        RailId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RailId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for RailId {
    fn from(s: &str) -> Self {
        RailId(s.to_string())
    }
}

/// Identifier of a terminal event bucket (detector, blocker, or loss channel).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TerminalId(pub String);

impl TerminalId {
    pub fn new(name: impl Into<String>) -> Self {
        TerminalId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TerminalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TerminalId {
    fn from(s: &str) -> Self {
        TerminalId(s.to_string())
    }
}

/// Linear polarization label. `None` (absence of a label) is expressed by
/// `Option<Polarization>` on modes: unpolarized circuits carry `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "H")]
    Horizontal,
    #[serde(rename = "V")]
    Vertical,
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::Horizontal => f.write_str("H"),
            Polarization::Vertical => f.write_str("V"),
        }
    }
}

/// Whose territory a rail or terminal belongs to. Crossing accounting counts
/// `Channel` and `Bob` as the far side of the communication channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Alice,
    Channel,
    Bob,
}

impl Region {
    /// True for the regions that count as "the photon crossed the channel".
    pub fn is_far_side(self) -> bool {
        matches!(self, Region::Channel | Region::Bob)
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::Alice => f.write_str("alice"),
            Region::Channel => f.write_str("channel"),
            Region::Bob => f.write_str("bob"),
        }
    }
}

/// What kind of device a terminal is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalKind {
    Detector,
    Blocker,
    LossChannel,
    Explosion,
}

/// One basis mode of the single-excitation space.
///
/// `Live` modes are photon-on-a-rail modes; `Absorbed` modes are orthogonal
/// event slots created when an absorber element (blocker, detector, loss
/// channel) removes amplitude from a rail. The `event` index is the flat
/// index of the absorbing element within its circuit, which keeps separate
/// absorption events orthogonal and makes backward propagation well-defined.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Live {
        rail: RailId,
        pol: Option<Polarization>,
    },
    Absorbed {
        terminal: TerminalId,
        event: u32,
        pol: Option<Polarization>,
    },
}

impl Mode {
    pub fn live(rail: impl Into<String>, pol: Option<Polarization>) -> Self {
        Mode::Live {
            rail: RailId::new(rail),
            pol,
        }
    }

    /// The rail this mode lives on, if it is still a live mode.
    pub fn rail(&self) -> Option<&RailId> {
        match self {
            Mode::Live { rail, .. } => Some(rail),
            Mode::Absorbed { .. } => None,
        }
    }

    /// The terminal this mode was absorbed into, if any.
    pub fn terminal(&self) -> Option<&TerminalId> {
        match self {
            Mode::Live { .. } => None,
            Mode::Absorbed { terminal, .. } => Some(terminal),
        }
    }

    pub fn polarization(&self) -> Option<Polarization> {
        match self {
            Mode::Live { pol, .. } => *pol,
            Mode::Absorbed { pol, .. } => *pol,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Live { rail, pol: None } => write!(f, "{rail}"),
            Mode::Live { rail, pol: Some(p) } => write!(f, "{rail}:{p}"),
            Mode::Absorbed {
                terminal,
                event,
                pol: None,
            } => write!(f, "{terminal}#{event}"),
            Mode::Absorbed {
                terminal,
                event,
                pol: Some(p),
            } => write!(f, "{terminal}#{event}:{p}"),
        }
    }
}
