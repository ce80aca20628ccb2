//! Optical elements and their (adjoint) action on states.

use super::mode::{Mode, Polarization, RailId, TerminalId};
use super::state::PhotonState;
use super::OpticsError;
use num_complex::Complex64;
use std::collections::BTreeSet;
use std::fmt;

/// Tolerance for the per-element norm-conservation guard. Every element is
/// an exact rotation, permutation, or swap, so any drift beyond this is an
/// internal bug, not physics.
const NORM_DRIFT_TOL: f64 = 1e-9;

/// One linear-optical element.
///
/// Rotation elements (`BeamSplitter`, `HalfWavePlateRotation`) use the real
/// rotation matrix convention `[[cos θ, −sin θ], [sin θ, cos θ]]` with no
/// reflection phase. Elements carry explicit output rails where routing
/// matters; an output rail different from the input rail is exactly a fused
/// mirror relabeling, kept fused so per-rail region tags stay truthful at
/// every stage boundary.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    /// Injects amplitude 1 at (rail, pol). Must be the first stage.
    Source {
        rail: RailId,
        pol: Option<Polarization>,
    },
    /// 2×2 rotation between two rails, identical for every polarization.
    BeamSplitter {
        theta: f64,
        in_a: RailId,
        in_b: RailId,
        out_a: RailId,
        out_b: RailId,
    },
    /// Routes the H component of `input` to `out_h` and the V component to
    /// `out_v`. Doubles as a polarization merge when an output rail already
    /// carries the complementary polarization.
    PolarizingBeamSplitter {
        input: RailId,
        out_h: RailId,
        out_v: RailId,
    },
    /// Rotates polarization by `theta` within one rail's (H, V) plane.
    HalfWavePlateRotation { theta: f64, rail: RailId },
    /// Identity relabeling of a rail (no phase).
    Mirror { from: RailId, to: RailId },
    /// Absorbs everything on `rail` into `terminal` (an obstacle).
    Blocker { rail: RailId, terminal: TerminalId },
    /// Absorbs everything on `rail` into `terminal` (a photodetector).
    Detector { rail: RailId, terminal: TerminalId },
    /// Absorbs everything on `rail` into `terminal` (an unmonitored dump).
    LossChannel { rail: RailId, terminal: TerminalId },
}

impl OpticalElement {
    // ---------- constructors ----------

    pub fn source(rail: impl Into<String>, pol: Option<Polarization>) -> Self {
        OpticalElement::Source {
            rail: RailId::new(rail),
            pol,
        }
    }

    /// In-place beamsplitter on two rails.
    pub fn bs(theta: f64, a: impl Into<String>, b: impl Into<String>) -> Self {
        let a = RailId::new(a);
        let b = RailId::new(b);
        OpticalElement::BeamSplitter {
            theta,
            in_a: a.clone(),
            in_b: b.clone(),
            out_a: a,
            out_b: b,
        }
    }

    /// Beamsplitter with explicit output rails.
    pub fn bs_routed(
        theta: f64,
        in_a: impl Into<String>,
        in_b: impl Into<String>,
        out_a: impl Into<String>,
        out_b: impl Into<String>,
    ) -> Self {
        OpticalElement::BeamSplitter {
            theta,
            in_a: RailId::new(in_a),
            in_b: RailId::new(in_b),
            out_a: RailId::new(out_a),
            out_b: RailId::new(out_b),
        }
    }

    pub fn pbs(
        input: impl Into<String>,
        out_h: impl Into<String>,
        out_v: impl Into<String>,
    ) -> Self {
        OpticalElement::PolarizingBeamSplitter {
            input: RailId::new(input),
            out_h: RailId::new(out_h),
            out_v: RailId::new(out_v),
        }
    }

    pub fn hwp(theta: f64, rail: impl Into<String>) -> Self {
        OpticalElement::HalfWavePlateRotation {
            theta,
            rail: RailId::new(rail),
        }
    }

    pub fn mirror(from: impl Into<String>, to: impl Into<String>) -> Self {
        OpticalElement::Mirror {
            from: RailId::new(from),
            to: RailId::new(to),
        }
    }

    pub fn blocker(rail: impl Into<String>, terminal: impl Into<String>) -> Self {
        OpticalElement::Blocker {
            rail: RailId::new(rail),
            terminal: TerminalId::new(terminal),
        }
    }

    pub fn detector(rail: impl Into<String>, terminal: impl Into<String>) -> Self {
        OpticalElement::Detector {
            rail: RailId::new(rail),
            terminal: TerminalId::new(terminal),
        }
    }

    pub fn loss(rail: impl Into<String>, terminal: impl Into<String>) -> Self {
        OpticalElement::LossChannel {
            rail: RailId::new(rail),
            terminal: TerminalId::new(terminal),
        }
    }

    // ---------- structure queries ----------

    /// Rails this element reads or writes (for stage-disjointness checks).
    pub fn touched_rails(&self) -> Vec<&RailId> {
        match self {
            OpticalElement::Source { rail, .. } => vec![rail],
            OpticalElement::BeamSplitter {
                in_a,
                in_b,
                out_a,
                out_b,
                ..
            } => {
                let mut v = vec![in_a, in_b, out_a, out_b];
                v.sort();
                v.dedup();
                v
            }
            OpticalElement::PolarizingBeamSplitter {
                input,
                out_h,
                out_v,
            } => {
                let mut v = vec![input, out_h, out_v];
                v.sort();
                v.dedup();
                v
            }
            OpticalElement::HalfWavePlateRotation { rail, .. } => vec![rail],
            OpticalElement::Mirror { from, to } => vec![from, to],
            OpticalElement::Blocker { rail, .. }
            | OpticalElement::Detector { rail, .. }
            | OpticalElement::LossChannel { rail, .. } => vec![rail],
        }
    }

    /// Terminal this element feeds, if it is an absorber.
    pub fn terminal(&self) -> Option<&TerminalId> {
        match self {
            OpticalElement::Blocker { terminal, .. }
            | OpticalElement::Detector { terminal, .. }
            | OpticalElement::LossChannel { terminal, .. } => Some(terminal),
            _ => None,
        }
    }

    /// True for elements that move amplitude into a terminal.
    pub fn is_absorber(&self) -> bool {
        self.terminal().is_some()
    }

    /// True for elements only meaningful on polarized states.
    pub fn requires_polarization(&self) -> bool {
        matches!(
            self,
            OpticalElement::PolarizingBeamSplitter { .. }
                | OpticalElement::HalfWavePlateRotation { .. }
        )
    }

    // ---------- action ----------

    /// Apply the element to `state`. `event` is the element's flat index in
    /// its circuit and keys the absorbed-event modes created by absorbers.
    pub fn apply(&self, state: &mut PhotonState, event: u32) -> Result<(), OpticsError> {
        match self {
            OpticalElement::Source { rail, pol } => {
                let mode = Mode::Live {
                    rail: rail.clone(),
                    pol: *pol,
                };
                if state.amplitude(&mode) != Complex64::ZERO {
                    return Err(OpticsError::OccupiedOutput(mode.to_string()));
                }
                state.set(mode, Complex64::new(1.0, 0.0));
                Ok(())
            }
            OpticalElement::BeamSplitter {
                theta,
                in_a,
                in_b,
                out_a,
                out_b,
            } => rotate_rails(state, *theta, in_a, in_b, out_a, out_b, self),
            OpticalElement::PolarizingBeamSplitter {
                input,
                out_h,
                out_v,
            } => {
                require_polarized_rail(state, input)?;
                let h = state.take(&live(input, Polarization::Horizontal));
                let v = state.take(&live(input, Polarization::Vertical));
                put(state, live(out_h, Polarization::Horizontal), h)?;
                put(state, live(out_v, Polarization::Vertical), v)?;
                Ok(())
            }
            OpticalElement::HalfWavePlateRotation { theta, rail } => {
                require_polarized_rail(state, rail)?;
                let h = state.take(&live(rail, Polarization::Horizontal));
                let v = state.take(&live(rail, Polarization::Vertical));
                let (c, s) = (theta.cos(), theta.sin());
                let before = h.norm_sqr() + v.norm_sqr();
                let h2 = c * h - s * v;
                let v2 = s * h + c * v;
                check_drift(before, h2.norm_sqr() + v2.norm_sqr(), self)?;
                put(state, live(rail, Polarization::Horizontal), h2)?;
                put(state, live(rail, Polarization::Vertical), v2)?;
                Ok(())
            }
            OpticalElement::Mirror { from, to } => {
                for pol in pols_on_rail(state, from) {
                    let amp = state.take(&Mode::Live {
                        rail: from.clone(),
                        pol,
                    });
                    put(
                        state,
                        Mode::Live {
                            rail: to.clone(),
                            pol,
                        },
                        amp,
                    )?;
                }
                Ok(())
            }
            OpticalElement::Blocker { rail, terminal }
            | OpticalElement::Detector { rail, terminal }
            | OpticalElement::LossChannel { rail, terminal } => {
                for pol in pols_on_rail(state, rail) {
                    let amp = state.take(&Mode::Live {
                        rail: rail.clone(),
                        pol,
                    });
                    put(
                        state,
                        Mode::Absorbed {
                            terminal: terminal.clone(),
                            event,
                            pol,
                        },
                        amp,
                    )?;
                }
                Ok(())
            }
        }
    }

    /// Apply the adjoint of the element (for backward evolution). `event`
    /// must be the same flat index the forward pass used.
    pub fn apply_adjoint(&self, state: &mut PhotonState, event: u32) -> Result<(), OpticsError> {
        match self {
            // The backward state before the photon exists is not used by any
            // analysis; the adjoint source is the identity.
            OpticalElement::Source { .. } => Ok(()),
            OpticalElement::BeamSplitter {
                theta,
                in_a,
                in_b,
                out_a,
                out_b,
            } => {
                // A routed splitter relabels rails, so its unitary extension
                // pairs each vacated input rail with a freshly created output
                // rail. Backward amplitude may sit on a vacated rail (legal
                // for a post-selected wave even though the forward wave never
                // puts any there); the adjoint carries it across the element
                // instead of colliding with the rotated part.
                let vacated = [in_a, in_b]
                    .into_iter()
                    .filter(|rail| *rail != out_a && *rail != out_b);
                let fresh = [out_a, out_b]
                    .into_iter()
                    .filter(|rail| *rail != in_a && *rail != in_b);
                let mut parked = Vec::new();
                for (input, output) in vacated.zip(fresh) {
                    for pol in pols_on_rail(state, input) {
                        let amp = state.take(&Mode::Live {
                            rail: input.clone(),
                            pol,
                        });
                        parked.push((
                            Mode::Live {
                                rail: output.clone(),
                                pol,
                            },
                            amp,
                        ));
                    }
                }
                rotate_rails(state, -*theta, out_a, out_b, in_a, in_b, self)?;
                for (mode, amp) in parked {
                    put(state, mode, amp)?;
                }
                Ok(())
            }
            OpticalElement::PolarizingBeamSplitter {
                input,
                out_h,
                out_v,
            } => {
                // Exact adjoint of the swap each polarization leg performs;
                // backward amplitude on the input rail returns to the leg's
                // output rail rather than colliding with it.
                for (pol, output) in [
                    (Polarization::Horizontal, out_h),
                    (Polarization::Vertical, out_v),
                ] {
                    if output == input {
                        continue;
                    }
                    let outgoing = state.take(&live(output, pol));
                    let incoming = state.take(&live(input, pol));
                    state.set(live(input, pol), outgoing);
                    state.set(live(output, pol), incoming);
                }
                Ok(())
            }
            OpticalElement::HalfWavePlateRotation { theta, rail } => {
                OpticalElement::HalfWavePlateRotation {
                    theta: -*theta,
                    rail: rail.clone(),
                }
                .apply(state, event)
            }
            OpticalElement::Mirror { from, to } => {
                // The mirror is a rail swap, so its adjoint is the same swap.
                // Unlike the forward pass there is no fan-in to lint: a
                // backward wave may occupy either rail.
                let pols: BTreeSet<Option<Polarization>> = pols_on_rail(state, from)
                    .into_iter()
                    .chain(pols_on_rail(state, to))
                    .collect();
                for pol in pols {
                    let downstream = state.take(&Mode::Live {
                        rail: to.clone(),
                        pol,
                    });
                    let upstream = state.take(&Mode::Live {
                        rail: from.clone(),
                        pol,
                    });
                    state.set(
                        Mode::Live {
                            rail: from.clone(),
                            pol,
                        },
                        downstream,
                    );
                    state.set(
                        Mode::Live {
                            rail: to.clone(),
                            pol,
                        },
                        upstream,
                    );
                }
                Ok(())
            }
            OpticalElement::Blocker { rail, terminal }
            | OpticalElement::Detector { rail, terminal }
            | OpticalElement::LossChannel { rail, terminal } => {
                // The absorber is a swap Live(rail) ↔ Absorbed(terminal, event);
                // its adjoint is the same swap. Backward amplitude sitting on
                // the rail parks into the event mode (it can never re-enter
                // upstream), and only amplitude on this element's own event
                // mode continues backward along the rail.
                let pols: BTreeSet<Option<Polarization>> = pols_on_rail(state, rail)
                    .into_iter()
                    .chain(event_pols(state, terminal, event))
                    .collect();
                for pol in pols {
                    let live_amp = state.take(&Mode::Live {
                        rail: rail.clone(),
                        pol,
                    });
                    let event_mode = Mode::Absorbed {
                        terminal: terminal.clone(),
                        event,
                        pol,
                    };
                    let event_amp = state.take(&event_mode);
                    state.set(
                        Mode::Live {
                            rail: rail.clone(),
                            pol,
                        },
                        event_amp,
                    );
                    state.set(event_mode, live_amp);
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for OpticalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpticalElement::Source { rail, pol } => match pol {
                Some(p) => write!(f, "Source({rail}:{p})"),
                None => write!(f, "Source({rail})"),
            },
            OpticalElement::BeamSplitter {
                theta,
                in_a,
                in_b,
                out_a,
                out_b,
            } => {
                if in_a == out_a && in_b == out_b {
                    write!(f, "BS({theta:.6}, {in_a}, {in_b})")
                } else {
                    write!(f, "BS({theta:.6}, {in_a},{in_b} -> {out_a},{out_b})")
                }
            }
            OpticalElement::PolarizingBeamSplitter {
                input,
                out_h,
                out_v,
            } => write!(f, "PBS({input} -> H:{out_h}, V:{out_v})"),
            OpticalElement::HalfWavePlateRotation { theta, rail } => {
                write!(f, "HWP({theta:.6}, {rail})")
            }
            OpticalElement::Mirror { from, to } => write!(f, "Mirror({from} -> {to})"),
            OpticalElement::Blocker { rail, terminal } => {
                write!(f, "Blocker({rail} -> {terminal})")
            }
            OpticalElement::Detector { rail, terminal } => {
                write!(f, "Detector({rail} -> {terminal})")
            }
            OpticalElement::LossChannel { rail, terminal } => {
                write!(f, "Loss({rail} -> {terminal})")
            }
        }
    }
}

// ---------- helpers ----------

fn live(rail: &RailId, pol: Polarization) -> Mode {
    Mode::Live {
        rail: rail.clone(),
        pol: Some(pol),
    }
}

/// Insert with a fan-in guard: the target mode must be empty.
fn put(state: &mut PhotonState, mode: Mode, amp: Complex64) -> Result<(), OpticsError> {
    if amp == Complex64::ZERO {
        return Ok(());
    }
    if state.amplitude(&mode) != Complex64::ZERO {
        return Err(OpticsError::OccupiedOutput(mode.to_string()));
    }
    state.set(mode, amp);
    Ok(())
}

/// Polarizations present on a rail (empty set when the rail is empty).
fn pols_on_rail(state: &PhotonState, rail: &RailId) -> BTreeSet<Option<Polarization>> {
    [
        None,
        Some(Polarization::Horizontal),
        Some(Polarization::Vertical),
    ]
    .into_iter()
    .filter(|pol| {
        state.amplitude(&Mode::Live {
            rail: rail.clone(),
            pol: *pol,
        }) != Complex64::ZERO
    })
    .collect()
}

fn event_pols(
    state: &PhotonState,
    terminal: &TerminalId,
    event: u32,
) -> BTreeSet<Option<Polarization>> {
    [
        None,
        Some(Polarization::Horizontal),
        Some(Polarization::Vertical),
    ]
    .into_iter()
    .filter(|pol| {
        state.amplitude(&Mode::Absorbed {
            terminal: terminal.clone(),
            event,
            pol: *pol,
        }) != Complex64::ZERO
    })
    .collect()
}

fn require_polarized_rail(state: &PhotonState, rail: &RailId) -> Result<(), OpticsError> {
    if state.amplitude(&Mode::Live {
        rail: rail.clone(),
        pol: None,
    }) != Complex64::ZERO
    {
        return Err(OpticsError::Polarization(format!(
            "polarization-sensitive element on unpolarized amplitude at rail `{rail}`"
        )));
    }
    Ok(())
}

/// Shared 2×2 rotation for the beamsplitter (forward and adjoint): reads the
/// two input rails per polarization, writes `[[c,−s],[s,c]]` times the pair
/// to the output rails.
fn rotate_rails(
    state: &mut PhotonState,
    theta: f64,
    in_a: &RailId,
    in_b: &RailId,
    out_a: &RailId,
    out_b: &RailId,
    elem: &OpticalElement,
) -> Result<(), OpticsError> {
    let pols: BTreeSet<Option<Polarization>> = pols_on_rail(state, in_a)
        .into_iter()
        .chain(pols_on_rail(state, in_b))
        .collect();
    let (c, s) = (theta.cos(), theta.sin());
    for pol in pols {
        let a = state.take(&Mode::Live {
            rail: in_a.clone(),
            pol,
        });
        let b = state.take(&Mode::Live {
            rail: in_b.clone(),
            pol,
        });
        let before = a.norm_sqr() + b.norm_sqr();
        let a2 = c * a - s * b;
        let b2 = s * a + c * b;
        check_drift(before, a2.norm_sqr() + b2.norm_sqr(), elem)?;
        put(
            state,
            Mode::Live {
                rail: out_a.clone(),
                pol,
            },
            a2,
        )?;
        put(
            state,
            Mode::Live {
                rail: out_b.clone(),
                pol,
            },
            b2,
        )?;
    }
    Ok(())
}

fn check_drift(before: f64, after: f64, elem: &OpticalElement) -> Result<(), OpticsError> {
    let drift = (after - before).abs();
    if drift > NORM_DRIFT_TOL {
        return Err(OpticsError::NormDrift {
            element: elem.to_string(),
            drift,
        });
    }
    Ok(())
}
