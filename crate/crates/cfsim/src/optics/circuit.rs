//! Staged circuits: validation, forward/backward propagation, outcome
//! distributions, and post-selection.

use super::element::OpticalElement;
use super::mode::{Polarization, RailId, Region, TerminalId, TerminalKind};
use super::state::PhotonState;
use super::OpticsError;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

/// Drift tolerance on the aggregate norm after a full run (the per-element
/// guard is tighter; this catches accumulation over very deep circuits).
const RUN_NORM_TOL: f64 = 1e-9;

/// Completeness tolerance: live probability allowed to remain after the last
/// stage of a run that reports outcome probabilities.
const COMPLETENESS_TOL: f64 = 1e-12;

/// Post-selection probabilities below this are treated as selecting on a
/// numerically impossible outcome.
const NULL_OUTCOME_TOL: f64 = 1e-15;

/// Upper bound on `states × modes` entries a stored trace may hold.
const TRACE_ENTRY_GUARD: usize = 20_000_000;

/// Which semantics the intensity numbers carry. Per-terminal values are
/// identical for both models (the propagation is linear either way); the tag
/// records whether they mean single-photon detection probabilities or
/// classical field intensity fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LightModel {
    /// One photon: values are probabilities of mutually exclusive events.
    Fock,
    /// Classical field: values are intensity fractions, all simultaneously real.
    Classical,
}

impl fmt::Display for LightModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LightModel::Fock => write!(f, "fock"),
            LightModel::Classical => write!(f, "classical"),
        }
    }
}

/// Declared kind and region of one terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TerminalInfo {
    pub kind: TerminalKind,
    pub region: Region,
}

impl TerminalInfo {
    pub fn new(kind: TerminalKind, region: Region) -> Self {
        TerminalInfo { kind, region }
    }
}

/// Where and with which polarization the circuit's source emits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpec {
    pub rail: RailId,
    pub pol: Option<Polarization>,
}

/// Final probability (or intensity) per declared terminal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    pub light: LightModel,
    pub probabilities: BTreeMap<TerminalId, f64>,
}

impl OutcomeDistribution {
    /// Probability of the named terminal (0 when it is not present).
    pub fn probability(&self, terminal: &str) -> f64 {
        self.probabilities
            .get(&TerminalId::new(terminal))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }
}

/// Forward states at every stage boundary: `states[k]` is the state after
/// the first `k` stages, so `states[0]` is the input and `states[S]` the
/// final state of an `S`-stage circuit.
#[derive(Debug, Clone)]
pub struct CircuitTrace {
    pub states: Vec<PhotonState>,
}

impl CircuitTrace {
    /// State at cut `k` (after `k` stages).
    pub fn cut(&self, k: usize) -> &PhotonState {
        &self.states[k]
    }

    /// Number of stages traced (`states` has one more entry).
    pub fn stage_count(&self) -> usize {
        self.states.len() - 1
    }
}

/// A staged optical circuit.
///
/// Elements within one stage act on disjoint rails (simultaneously);
/// stages act in order. Every rail carries a [`Region`] tag and every
/// terminal a [`TerminalInfo`], so analyses can ask where amplitude sits
/// without consulting the protocol that built the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub stages: Vec<Vec<OpticalElement>>,
    pub regions: BTreeMap<RailId, Region>,
    pub terminals: BTreeMap<TerminalId, TerminalInfo>,
}

impl Circuit {
    pub fn new(
        stages: Vec<Vec<OpticalElement>>,
        regions: BTreeMap<RailId, Region>,
        terminals: BTreeMap<TerminalId, TerminalInfo>,
    ) -> Result<Self, OpticsError> {
        let c = Circuit {
            stages,
            regions,
            terminals,
        };
        c.validate()?;
        Ok(c)
    }

    // ---------- structure ----------

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Flat element index of the first element of each stage.
    pub fn stage_offsets(&self) -> Vec<u32> {
        let mut offsets = Vec::with_capacity(self.stages.len());
        let mut n: u32 = 0;
        for stage in &self.stages {
            offsets.push(n);
            n += stage.len() as u32;
        }
        offsets
    }

    pub fn element_count(&self) -> usize {
        self.stages.iter().map(Vec::len).sum()
    }

    /// The source element's emission spec, if the circuit has one.
    pub fn source(&self) -> Option<SourceSpec> {
        self.stages.iter().flatten().find_map(|e| match e {
            OpticalElement::Source { rail, pol } => Some(SourceSpec {
                rail: rail.clone(),
                pol: *pol,
            }),
            _ => None,
        })
    }

    /// True when the source emits a definite polarization.
    pub fn polarized(&self) -> bool {
        self.source().map(|s| s.pol.is_some()).unwrap_or(false)
    }

    /// Region of a declared terminal.
    pub fn terminal_region(&self, terminal: &TerminalId) -> Option<Region> {
        self.terminals.get(terminal).map(|info| info.region)
    }

    /// Structural checks: declared rails and terminals, per-stage rail
    /// disjointness, source placement, polarization discipline, terminal
    /// kinds matching the elements that feed them.
    pub fn validate(&self) -> Result<(), OpticsError> {
        let mut source_count = 0usize;
        for (k, stage) in self.stages.iter().enumerate() {
            let mut stage_rails: BTreeMap<&RailId, ()> = BTreeMap::new();
            for elem in stage {
                for rail in elem.touched_rails() {
                    if !self.regions.contains_key(rail) {
                        return Err(OpticsError::UnknownRail(rail.to_string()));
                    }
                    if stage_rails.insert(rail, ()).is_some() {
                        return Err(OpticsError::StageConflict {
                            stage: k,
                            rail: rail.to_string(),
                        });
                    }
                }
                if let Some(terminal) = elem.terminal() {
                    let info = self
                        .terminals
                        .get(terminal)
                        .ok_or_else(|| OpticsError::UnknownTerminal(terminal.to_string()))?;
                    let ok = match elem {
                        OpticalElement::Blocker { .. } => {
                            matches!(info.kind, TerminalKind::Blocker | TerminalKind::Explosion)
                        }
                        OpticalElement::Detector { .. } => info.kind == TerminalKind::Detector,
                        OpticalElement::LossChannel { .. } => {
                            info.kind == TerminalKind::LossChannel
                        }
                        _ => true,
                    };
                    if !ok {
                        return Err(OpticsError::InvalidCircuit(format!(
                            "terminal `{terminal}` is declared {:?} but fed by {elem}",
                            info.kind
                        )));
                    }
                }
                if let OpticalElement::Source { .. } = elem {
                    source_count += 1;
                    if k != 0 {
                        return Err(OpticsError::InvalidCircuit(format!(
                            "source must sit in the first stage, found one in stage {k}"
                        )));
                    }
                }
            }
        }
        if source_count > 1 {
            return Err(OpticsError::InvalidCircuit(format!(
                "{source_count} sources declared, at most one allowed"
            )));
        }
        if let Some(spec) = self.source() {
            if spec.pol.is_none() {
                if let Some(elem) = self
                    .stages
                    .iter()
                    .flatten()
                    .find(|e| e.requires_polarization())
                {
                    return Err(OpticsError::InvalidCircuit(format!(
                        "unpolarized source but polarization-sensitive element {elem}"
                    )));
                }
            }
        }
        Ok(())
    }

    // ---------- propagation ----------

    fn check_run_input(&self, input: &PhotonState) -> Result<(), OpticsError> {
        if self.source().is_some() {
            if !input.is_vacuum() {
                return Err(OpticsError::BadInputNorm(input.norm_sqr()));
            }
        } else if (input.norm_sqr() - 1.0).abs() > COMPLETENESS_TOL {
            return Err(OpticsError::BadInputNorm(input.norm_sqr()));
        }
        Ok(())
    }

    /// Apply stages `from..to` to `state` in place, with the same flat
    /// event indexing a full run would use.
    pub fn evolve_segment(
        &self,
        state: &mut PhotonState,
        from: usize,
        to: usize,
    ) -> Result<(), OpticsError> {
        let offsets = self.stage_offsets();
        let to = to.min(self.stage_count());
        if from >= to {
            return Ok(());
        }
        for (stage, offset) in self.stages[from..to].iter().zip(&offsets[from..to]) {
            for (pos, elem) in stage.iter().enumerate() {
                elem.apply(state, offset + pos as u32)?;
            }
        }
        Ok(())
    }

    /// Propagate `input` through all stages without storing intermediates.
    /// Memory stays proportional to the state size, so this is the entry
    /// point for very deep circuits.
    pub fn evolve(&self, input: &PhotonState) -> Result<PhotonState, OpticsError> {
        self.validate()?;
        let mut state = input.clone();
        let expected = input.norm_sqr() + if self.source().is_some() { 1.0 } else { 0.0 };
        self.evolve_segment(&mut state, 0, self.stage_count())?;
        let drift = (state.norm_sqr() - expected).abs();
        if drift > RUN_NORM_TOL {
            return Err(OpticsError::NormDrift {
                element: "whole circuit".into(),
                drift,
            });
        }
        Ok(state)
    }

    fn trace_guard(&self) -> Result<(), OpticsError> {
        let mode_bound = self.regions.len() * 3
            + self
                .stages
                .iter()
                .flatten()
                .filter(|e| e.is_absorber())
                .count()
                * 3;
        let entries = (self.stage_count() + 1).saturating_mul(mode_bound);
        if entries > TRACE_ENTRY_GUARD {
            return Err(OpticsError::ResourceGuard(format!(
                "trace would hold up to {entries} amplitude entries \
                 (limit {TRACE_ENTRY_GUARD}); use evolve() for deep circuits"
            )));
        }
        Ok(())
    }

    /// Propagate `input` and keep the state at every stage boundary.
    pub fn propagate(&self, input: &PhotonState) -> Result<CircuitTrace, OpticsError> {
        self.validate()?;
        self.trace_guard()?;
        let mut states = Vec::with_capacity(self.stage_count() + 1);
        states.push(input.clone());
        let mut event: u32 = 0;
        for stage in &self.stages {
            let mut state = states.last().unwrap().clone();
            for elem in stage {
                elem.apply(&mut state, event)?;
                event += 1;
            }
            states.push(state);
        }
        Ok(CircuitTrace { states })
    }

    /// Evolve the boundary state backward through the adjoint circuit.
    /// Returns states indexed like [`CircuitTrace`]: entry `k` is the
    /// backward state at cut `k`, entry `S` the given boundary itself.
    pub fn backward_trace(&self, boundary: &PhotonState) -> Result<Vec<PhotonState>, OpticsError> {
        self.validate()?;
        self.trace_guard()?;
        let offsets = self.stage_offsets();
        let mut states = vec![PhotonState::vacuum(); self.stage_count() + 1];
        states[self.stage_count()] = boundary.clone();
        for k in (0..self.stage_count()).rev() {
            let mut state = states[k + 1].clone();
            for (pos, elem) in self.stages[k].iter().enumerate().rev() {
                elem.apply_adjoint(&mut state, offsets[k] + pos as u32)?;
            }
            states[k] = state;
        }
        Ok(states)
    }

    fn run(
        &self,
        input: &PhotonState,
        light: LightModel,
    ) -> Result<OutcomeDistribution, OpticsError> {
        self.check_run_input(input)?;
        let final_state = self.evolve(input)?;
        let live = final_state.live_norm_sqr();
        if live > COMPLETENESS_TOL {
            return Err(OpticsError::CircuitIncomplete(live));
        }
        let mut probabilities: BTreeMap<TerminalId, f64> =
            self.terminals.keys().map(|t| (t.clone(), 0.0)).collect();
        for (terminal, mass) in final_state.terminal_mass() {
            probabilities.insert(terminal, mass);
        }
        Ok(OutcomeDistribution {
            light,
            probabilities,
        })
    }

    /// Single-photon run: detection probabilities per terminal.
    pub fn run_fock(&self, input: &PhotonState) -> Result<OutcomeDistribution, OpticsError> {
        self.run(input, LightModel::Fock)
    }

    /// Classical-field run: intensity fraction per terminal. Same linear
    /// propagation as [`Circuit::run_fock`]; only the event semantics differ.
    pub fn run_classical(&self, input: &PhotonState) -> Result<OutcomeDistribution, OpticsError> {
        self.run(input, LightModel::Classical)
    }

    /// Probability of the outcome and the normalized final state given that
    /// all amplitude ended in `outcome`'s terminal events.
    pub fn post_select(
        &self,
        input: &PhotonState,
        outcome: &TerminalId,
    ) -> Result<(f64, PhotonState), OpticsError> {
        self.check_run_input(input)?;
        if !self.terminals.contains_key(outcome) {
            return Err(OpticsError::UnknownTerminal(outcome.to_string()));
        }
        let final_state = self.evolve(input)?;
        let live = final_state.live_norm_sqr();
        if live > COMPLETENESS_TOL {
            return Err(OpticsError::CircuitIncomplete(live));
        }
        let mut selected = final_state.project_terminal(outcome);
        let probability = selected.norm_sqr();
        if probability < NULL_OUTCOME_TOL {
            return Err(OpticsError::NullPostSelection {
                outcome: outcome.to_string(),
                probability,
            });
        }
        selected.normalize();
        Ok((probability, selected))
    }
}
