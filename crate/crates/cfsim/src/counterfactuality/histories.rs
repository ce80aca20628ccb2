//! Coarse-grained history families and their consistency.
//!
//! A history assigns the photon to one cell of a coarse-graining (a named
//! group of rails and terminals) at each of a list of stage cuts, and to
//! one final terminal. Its branch vector is the input state alternately
//! evolved and projected along that assignment; the decoherence matrix
//! collects the overlaps `D(α, β) = ⟨C_β ψ | C_α ψ⟩`. When the real parts
//! of all off-diagonal entries vanish, the branch weights behave as
//! probabilities of mutually exclusive stories and talk of "the photon's
//! path" is licensed; otherwise the family is inconsistent and no such
//! talk is meaningful at this graining.

use super::{AnalysisError, CONSISTENCY_TOL};
use crate::optics::{Circuit, Mode, OpticsError, PhotonState, RailId, TerminalId};
use crate::protocols::CoarseCell;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;

/// Branch norms² below this are dropped during enumeration. Dropped mass
/// is bounded by the prune floor times the branch count, far below every
/// decision threshold in this crate.
const PRUNE_TOL: f64 = 1e-30;

/// Histories with probability below this floor are ignored by the verdict.
const HISTORY_PROB_FLOOR: f64 = 1e-12;

/// Hard ceiling on `cells^cuts × outcomes` before enumeration starts.
const FAMILY_SIZE_GUARD: f64 = 1e6;

/// One history: a cell index per cut, a final terminal, and the branch
/// vector the projections leave behind.
#[derive(Debug, Clone)]
pub struct History {
    pub cell_path: Vec<usize>,
    pub outcome: TerminalId,
    pub branch: PhotonState,
    pub probability: f64,
}

/// A family of histories over fixed cuts and cells.
#[derive(Debug, Clone)]
pub struct HistoryFamily {
    /// Stage cuts at which cells were assigned (final-stage cut excluded;
    /// the outcome split plays that role).
    pub cuts: Vec<usize>,
    pub cell_names: Vec<String>,
    pub histories: Vec<History>,
    /// `decoherence[i][j] = ⟨branch_i | branch_j⟩`.
    pub decoherence: Vec<Vec<Complex64>>,
    pub max_offdiag_re: f64,
    pub max_offdiag_mag: f64,
    /// `|Σ_ij D(i,j) − 1|`; the double sum telescopes to the full final
    /// norm, so this also bounds the pruned mass.
    pub trace_defect: f64,
    pub consistent: bool,
}

impl HistoryFamily {
    /// Human-readable path such as `alice_outer->bob->B`.
    pub fn label(&self, history: &History) -> String {
        let mut parts: Vec<String> = history
            .cell_path
            .iter()
            .map(|&c| self.cell_names[c].clone())
            .collect();
        parts.push(history.outcome.to_string());
        parts.join("->")
    }

    /// Total probability assigned to an outcome by the family's diagonal.
    pub fn outcome_probability(&self, outcome: &TerminalId) -> f64 {
        self.histories
            .iter()
            .filter(|h| &h.outcome == outcome)
            .map(|h| h.probability)
            .sum()
    }
}

/// The verdict a consistent-histories analysis supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterfactualVerdict {
    /// Consistent family, and every non-negligible history reaching the
    /// information outcome stays out of the far cells.
    Counterfactual,
    /// Consistent family, but some history reaching the outcome crosses.
    NotCounterfactual,
    /// Inconsistent family: history probabilities are not defined, so the
    /// question has no answer at this coarse-graining.
    Meaningless,
}

/// Outcome of [`classify_by_histories`].
#[derive(Debug, Clone, Serialize)]
pub struct HistoryClassification {
    pub verdict: CounterfactualVerdict,
    pub consistent: bool,
    pub max_offdiag_re: f64,
    pub max_offdiag_mag: f64,
    pub outcome_probability: f64,
    pub history_count: usize,
    /// A crossing history reaching the outcome, when one exists.
    pub crossing_history: Option<String>,
}

/// Cell index of every rail and terminal in the partition.
type CellLookup = (BTreeMap<RailId, usize>, BTreeMap<TerminalId, usize>);

fn cell_lookup(circuit: &Circuit, cells: &[CoarseCell]) -> Result<CellLookup, AnalysisError> {
    let mut rail_cell: BTreeMap<RailId, usize> = BTreeMap::new();
    let mut term_cell: BTreeMap<TerminalId, usize> = BTreeMap::new();
    for (idx, cell) in cells.iter().enumerate() {
        for rail in &cell.rails {
            if !circuit.regions.contains_key(rail) {
                return Err(AnalysisError::BadPartition(format!(
                    "cell `{}` names unknown rail `{rail}`",
                    cell.name
                )));
            }
            if rail_cell.insert(rail.clone(), idx).is_some() {
                return Err(AnalysisError::BadPartition(format!(
                    "rail `{rail}` appears in more than one cell"
                )));
            }
        }
        for term in &cell.terminals {
            if !circuit.terminals.contains_key(term) {
                return Err(AnalysisError::BadPartition(format!(
                    "cell `{}` names unknown terminal `{term}`",
                    cell.name
                )));
            }
            if term_cell.insert(term.clone(), idx).is_some() {
                return Err(AnalysisError::BadPartition(format!(
                    "terminal `{term}` appears in more than one cell"
                )));
            }
        }
    }
    for rail in circuit.regions.keys() {
        if !rail_cell.contains_key(rail) {
            return Err(AnalysisError::BadPartition(format!(
                "rail `{rail}` not covered by any cell"
            )));
        }
    }
    for term in circuit.terminals.keys() {
        if !term_cell.contains_key(term) {
            return Err(AnalysisError::BadPartition(format!(
                "terminal `{term}` not covered by any cell"
            )));
        }
    }
    Ok((rail_cell, term_cell))
}

/// Build the family of histories for `circuit` over the given cuts and
/// coarse-graining. Cuts must be strictly increasing stage boundaries; a
/// final-stage cut is allowed but redundant (the outcome split refines it).
pub fn build_history_family(
    circuit: &Circuit,
    input: &PhotonState,
    cuts: &[usize],
    cells: &[CoarseCell],
) -> Result<HistoryFamily, AnalysisError> {
    circuit.validate()?;
    let stage_count = circuit.stage_count();
    for pair in cuts.windows(2) {
        if pair[0] >= pair[1] {
            return Err(AnalysisError::BadCuts(format!(
                "cuts must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    if let Some(&first) = cuts.first() {
        if first == 0 {
            return Err(AnalysisError::BadCuts("cut 0 precedes the source".into()));
        }
    }
    if let Some(&last) = cuts.last() {
        if last > stage_count {
            return Err(AnalysisError::BadCuts(format!(
                "cut {last} beyond the final stage {stage_count}"
            )));
        }
    }
    if cells.is_empty() {
        return Err(AnalysisError::BadPartition("no cells given".into()));
    }
    let (rail_cell, term_cell) = cell_lookup(circuit, cells)?;

    let proj_cuts: Vec<usize> = cuts.iter().copied().filter(|&k| k < stage_count).collect();
    let family_size =
        (cells.len() as f64).powi(proj_cuts.len() as i32) * circuit.terminals.len().max(1) as f64;
    if family_size > FAMILY_SIZE_GUARD {
        return Err(AnalysisError::ResourceGuard(format!(
            "up to {family_size:.1e} histories ({} cells over {} cuts, {} outcomes); \
             coarsen the cells or drop cuts",
            cells.len(),
            proj_cuts.len(),
            circuit.terminals.len()
        )));
    }

    // Reject incomplete circuits up front so the outcome split is total.
    let final_state = circuit.evolve(input)?;
    let live = final_state.live_norm_sqr();
    if live > 1e-12 {
        return Err(OpticsError::CircuitIncomplete(live).into());
    }

    let cell_of = |mode: &Mode| -> usize {
        match mode {
            Mode::Live { rail, .. } => rail_cell[rail],
            Mode::Absorbed { terminal, .. } => term_cell[terminal],
        }
    };

    // Alternate evolve and project, breadth-first over the cuts.
    let mut frontier: Vec<(Vec<usize>, PhotonState)> = vec![(Vec::new(), input.clone())];
    let mut prev_cut = 0usize;
    for &cut in &proj_cuts {
        let mut next = Vec::with_capacity(frontier.len() * cells.len());
        for (path, mut state) in frontier {
            circuit.evolve_segment(&mut state, prev_cut, cut)?;
            for idx in 0..cells.len() {
                let projected = state.project(|m| cell_of(m) == idx);
                if projected.norm_sqr() > PRUNE_TOL {
                    let mut new_path = path.clone();
                    new_path.push(idx);
                    next.push((new_path, projected));
                }
            }
        }
        frontier = next;
        prev_cut = cut;
    }

    let mut histories = Vec::new();
    for (path, mut state) in frontier {
        circuit.evolve_segment(&mut state, prev_cut, stage_count)?;
        for terminal in circuit.terminals.keys() {
            let branch = state.project_terminal(terminal);
            let probability = branch.norm_sqr();
            if probability > PRUNE_TOL {
                histories.push(History {
                    cell_path: path.clone(),
                    outcome: terminal.clone(),
                    branch,
                    probability,
                });
            }
        }
    }

    let n = histories.len();
    let mut decoherence = vec![vec![Complex64::ZERO; n]; n];
    let mut max_offdiag_re: f64 = 0.0;
    let mut max_offdiag_mag: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let d = histories[i].branch.inner(&histories[j].branch);
            decoherence[i][j] = d;
            decoherence[j][i] = d.conj();
            if i != j {
                max_offdiag_re = max_offdiag_re.max(d.re.abs());
                max_offdiag_mag = max_offdiag_mag.max(d.norm());
            }
        }
    }
    let total: Complex64 = decoherence.iter().flatten().sum();
    let trace_defect = (total - Complex64::ONE).norm();

    Ok(HistoryFamily {
        cuts: proj_cuts,
        cell_names: cells.iter().map(|c| c.name.clone()).collect(),
        histories,
        decoherence,
        max_offdiag_re,
        max_offdiag_mag,
        trace_defect,
        consistent: max_offdiag_re < CONSISTENCY_TOL,
    })
}

/// Names of the cells that contain any far-side rail or terminal.
pub fn far_cell_names(circuit: &Circuit, cells: &[CoarseCell]) -> Vec<String> {
    cells
        .iter()
        .filter(|cell| {
            cell.rails.iter().any(|r| {
                circuit
                    .regions
                    .get(r)
                    .map(|reg| reg.is_far_side())
                    .unwrap_or(false)
            }) || cell.terminals.iter().any(|t| {
                circuit
                    .terminals
                    .get(t)
                    .map(|info| info.region.is_far_side())
                    .unwrap_or(false)
            })
        })
        .map(|cell| cell.name.clone())
        .collect()
}

/// Decide what the family says about runs ending in `info_outcome`.
pub fn classify_by_histories(
    family: &HistoryFamily,
    info_outcome: &TerminalId,
    far_cells: &[String],
) -> HistoryClassification {
    let far_idx: Vec<usize> = family
        .cell_names
        .iter()
        .enumerate()
        .filter(|(_, name)| far_cells.contains(name))
        .map(|(i, _)| i)
        .collect();
    let outcome_probability = family.outcome_probability(info_outcome);
    let mut crossing_history = None;
    if family.consistent {
        for history in &family.histories {
            if &history.outcome != info_outcome || history.probability <= HISTORY_PROB_FLOOR {
                continue;
            }
            if history.cell_path.iter().any(|c| far_idx.contains(c)) {
                crossing_history = Some(family.label(history));
                break;
            }
        }
    }
    let verdict = if !family.consistent {
        CounterfactualVerdict::Meaningless
    } else if crossing_history.is_some() {
        CounterfactualVerdict::NotCounterfactual
    } else {
        CounterfactualVerdict::Counterfactual
    };
    HistoryClassification {
        verdict,
        consistent: family.consistent,
        max_offdiag_re: family.max_offdiag_re,
        max_offdiag_mag: family.max_offdiag_mag,
        outcome_probability,
        history_count: family.histories.len(),
        crossing_history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{OpticalElement, Region, TerminalInfo, TerminalKind};
    use crate::protocols::{build_ev, build_salih, build_zeno, BobAction};
    use std::f64::consts::FRAC_PI_4;

    const EPS: f64 = 1e-12;

    fn family_for(p: &crate::protocols::ProtocolCircuit) -> HistoryFamily {
        build_history_family(&p.circuit, &PhotonState::vacuum(), &p.cycle_cuts, &p.cells).unwrap()
    }

    #[test]
    fn which_path_histories_of_a_balanced_interferometer_are_inconsistent() {
        let circuit = Circuit::new(
            vec![
                vec![OpticalElement::source("a", None)],
                vec![OpticalElement::bs(FRAC_PI_4, "a", "b")],
                vec![OpticalElement::bs(FRAC_PI_4, "a", "b")],
                vec![
                    OpticalElement::detector("a", "DARK"),
                    OpticalElement::detector("b", "BRIGHT"),
                ],
            ],
            [
                (RailId::new("a"), Region::Alice),
                (RailId::new("b"), Region::Alice),
            ]
            .into(),
            [
                (
                    TerminalId::new("DARK"),
                    TerminalInfo::new(TerminalKind::Detector, Region::Alice),
                ),
                (
                    TerminalId::new("BRIGHT"),
                    TerminalInfo::new(TerminalKind::Detector, Region::Alice),
                ),
            ]
            .into(),
        )
        .unwrap();
        let cells = vec![
            CoarseCell::new("up", &["a"], &["DARK"]),
            CoarseCell::new("down", &["b"], &["BRIGHT"]),
        ];
        let family = build_history_family(&circuit, &PhotonState::vacuum(), &[2], &cells).unwrap();
        assert_eq!(family.histories.len(), 4);
        for h in &family.histories {
            assert!((h.probability - 0.25).abs() < EPS);
        }
        // The two branches feeding each detector interfere maximally.
        assert!((family.max_offdiag_re - 0.25).abs() < EPS);
        assert!(!family.consistent);
        assert!(family.trace_defect < EPS);
    }

    #[test]
    fn obstructed_interferometer_histories_are_consistent_and_certify() {
        let p = build_ev(BobAction::Block).unwrap();
        let family = family_for(&p);
        assert!(family.consistent);
        assert!(family.max_offdiag_mag < EPS);
        let far = far_cell_names(&p.circuit, &p.cells);
        assert_eq!(far, vec!["bob".to_string()]);
        let class = classify_by_histories(&family, &TerminalId::new("D2"), &far);
        assert_eq!(class.verdict, CounterfactualVerdict::Counterfactual);
        assert!((class.outcome_probability - 0.25).abs() < EPS);

        // The exploded runs crossed, and the family says so.
        let class = classify_by_histories(&family, &TerminalId::new("bomb"), &far);
        assert_eq!(class.verdict, CounterfactualVerdict::NotCounterfactual);
        assert_eq!(
            class.crossing_history.as_deref(),
            Some("alice->bob->bob->bob->bomb")
        );
    }

    #[test]
    fn single_outer_cycle_blocked_run_is_counterfactual() {
        for n in [1usize, 2, 4] {
            let p = build_salih(1, n, false, BobAction::Block).unwrap();
            let family = family_for(&p);
            assert!(family.consistent, "n = {n}");
            let far = far_cell_names(&p.circuit, &p.cells);
            let class = classify_by_histories(&family, &TerminalId::new("D1"), &far);
            assert_eq!(
                class.verdict,
                CounterfactualVerdict::Counterfactual,
                "n = {n}"
            );
        }
    }

    #[test]
    fn two_outer_cycles_make_the_default_graining_inconsistent() {
        let p = build_salih(2, 2, false, BobAction::Block).unwrap();
        let family = family_for(&p);
        assert!(!family.consistent);
        // The two routes into D0 (stay outer vs. detour through the inner
        // rail) interfere with weight 1/8.
        assert!((family.max_offdiag_re - 0.125).abs() < EPS);
        let far = far_cell_names(&p.circuit, &p.cells);
        let class = classify_by_histories(&family, &TerminalId::new("D1"), &far);
        assert_eq!(class.verdict, CounterfactualVerdict::Meaningless);
    }

    #[test]
    fn decoherence_matrix_is_hermitian_with_unit_trace() {
        let p = build_salih(2, 2, false, BobAction::Block).unwrap();
        let family = family_for(&p);
        let n = family.histories.len();
        for i in 0..n {
            for j in 0..n {
                let d = family.decoherence[i][j];
                let dt = family.decoherence[j][i];
                assert!((d - dt.conj()).norm() < EPS);
            }
        }
        let diag: f64 = (0..n).map(|i| family.decoherence[i][i].re).sum();
        let offdiag: Complex64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| family.decoherence[i][j])
            .sum();
        assert!(((diag + offdiag.re) - 1.0).abs() < EPS);
        assert!(family.trace_defect < EPS);
    }

    #[test]
    fn oversized_families_are_refused_up_front() {
        let p = build_zeno(25, BobAction::Block).unwrap();
        let err = build_history_family(&p.circuit, &PhotonState::vacuum(), &p.cycle_cuts, &p.cells)
            .unwrap_err();
        assert!(matches!(err, AnalysisError::ResourceGuard(_)));
    }

    #[test]
    fn bad_cell_partitions_are_rejected() {
        let p = build_ev(BobAction::Block).unwrap();
        let missing = vec![CoarseCell::new(
            "alice",
            &["u", "d1r", "d2r"],
            &["D1", "D2"],
        )];
        assert!(matches!(
            build_history_family(&p.circuit, &PhotonState::vacuum(), &[2], &missing),
            Err(AnalysisError::BadPartition(_))
        ));
        let doubled = vec![
            CoarseCell::new("alice", &["u", "d1r", "d2r"], &["D1", "D2", "bomb"]),
            CoarseCell::new("bob", &["v", "u"], &[]),
        ];
        assert!(matches!(
            build_history_family(&p.circuit, &PhotonState::vacuum(), &[2], &doubled),
            Err(AnalysisError::BadPartition(_))
        ));
    }

    #[test]
    fn unsorted_cuts_are_rejected() {
        let p = build_ev(BobAction::Block).unwrap();
        assert!(matches!(
            build_history_family(&p.circuit, &PhotonState::vacuum(), &[3, 2], &p.cells),
            Err(AnalysisError::BadCuts(_))
        ));
    }
}
