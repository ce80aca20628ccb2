//! Solves for chain splitter angles that make the losses equal.
//!
//! The nested-chain protocol aborts at different rates depending on Bob's
//! action unless its splitter angles are chosen carefully, and an
//! unbalanced abort rate leaks information to anyone counting lost
//! photons. This module searches the angle space for assignments that
//! equalize the two loss rates, optionally while also driving both
//! wrong-detector probabilities to zero, using a bounded derivative-free
//! simplex descent restarted from a deterministic grid of seeds.
//!
//! Angles live in the open interval `(0, π/2)`: an endpoint would turn a
//! splitter into a pass-through or a mirror, and the fully lossy corner
//! assignments that "equalize" loss by never letting light into the chain
//! are exactly the endpoints. The solver therefore clamps its search to a
//! small margin inside the interval.

mod simplex;

use crate::counterfactuality::loss_statistics;
use crate::optics::{OpticsError, PhotonState};
use crate::protocols::{build_vaidman, BobAction, ProtocolError, VaidmanAngles};
use serde::Serialize;
use simplex::SimplexOptions;
use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// A result counts as converged once its objective score is below this.
pub const CONVERGENCE_TOL: f64 = 1e-9;

/// Converged solutions must leave the open-run signal detector this dark;
/// the dump-locked topology guarantees it structurally, so anything
/// larger indicates the search wandered into a leaky configuration.
pub const OPEN_LEAK_GUARD: f64 = 1e-12;

/// Distance the solver keeps from the interval endpoints. Wide enough to
/// exclude the degenerate zero-throughput corners, narrow enough to leave
/// every physically useful assignment reachable.
const BOUND_MARGIN: f64 = 1e-3;

/// Per-seed descent stops early once the squared score falls below this.
const SEED_TARGET: f64 = 1e-26;

/// Errors from problem construction, evaluation, or solving.
#[derive(Debug, Error)]
pub enum TuneError {
    #[error("invalid tuning problem: {0}")]
    Problem(String),
    #[error("angle slot `{slot}` = {value} is outside the open interval (0, π/2)")]
    OutOfBounds { slot: String, value: f64 },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

/// What the search should drive to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Only `|p_loss_block − p_loss_open|`.
    EqualLoss,
    /// Loss difference and both wrong-detector probabilities together.
    EqualLossAndZeroCrosstalk,
}

impl Objective {
    /// Scalar score the solver minimizes (via its square).
    pub fn score(self, metrics: &TuneMetrics) -> f64 {
        let diff = metrics.residual();
        match self {
            Objective::EqualLoss => diff,
            Objective::EqualLossAndZeroCrosstalk => (diff * diff
                + metrics.p_d0_block * metrics.p_d0_block
                + metrics.p_d1_open * metrics.p_d1_open)
                .sqrt(),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Objective::EqualLoss => "equal_loss",
            Objective::EqualLossAndZeroCrosstalk => "equal_loss_and_zero_crosstalk",
        })
    }
}

impl std::str::FromStr for Objective {
    type Err = TuneError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "equal_loss" => Ok(Objective::EqualLoss),
            "equal_loss_and_zero_crosstalk" | "equal_loss_zero_crosstalk" => {
                Ok(Objective::EqualLossAndZeroCrosstalk)
            }
            other => Err(TuneError::Problem(format!(
                "unknown objective `{other}` (expected `equal_loss` or \
                 `equal_loss_and_zero_crosstalk`)"
            ))),
        }
    }
}

/// Loss and detector statistics of one angle assignment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TuneMetrics {
    pub p_loss_block: f64,
    pub p_loss_open: f64,
    pub p_d0_block: f64,
    pub p_d1_block: f64,
    pub p_d0_open: f64,
    pub p_d1_open: f64,
}

impl TuneMetrics {
    /// The equal-loss residual `|p_loss_block − p_loss_open|`.
    pub fn residual(&self) -> f64 {
        (self.p_loss_block - self.p_loss_open).abs()
    }

    /// Worst wrong-detector probability across the two actions.
    pub fn crosstalk(&self) -> f64 {
        self.p_d1_open.max(self.p_d0_block)
    }
}

/// An angle-tuning problem: which slots are searched, which are pinned,
/// and what counts as solved. Free and fixed slots are disjoint and
/// together cover every slot of the chain, which is checked on
/// construction; free values are always passed in canonical slot order.
#[derive(Debug, Clone)]
pub struct TuneProblem {
    inner_count: usize,
    free: Vec<String>,
    fixed: BTreeMap<String, f64>,
    pub objective: Objective,
}

fn in_open_interval(value: f64) -> bool {
    value.is_finite() && value > 0.0 && value < FRAC_PI_2
}

impl TuneProblem {
    pub fn new(
        inner_count: usize,
        free: &[&str],
        fixed: &BTreeMap<String, f64>,
        objective: Objective,
    ) -> Result<Self, TuneError> {
        if inner_count < 2 {
            return Err(TuneError::Problem(format!(
                "the chain needs at least two inner interferometers, got {inner_count}"
            )));
        }
        let universe = VaidmanAngles::slot_names(inner_count);
        for name in free {
            if !universe.iter().any(|u| u == name) {
                return Err(TuneError::Problem(format!("unknown free slot `{name}`")));
            }
        }
        for (name, &value) in fixed {
            if !universe.iter().any(|u| u == name) {
                return Err(TuneError::Problem(format!("unknown fixed slot `{name}`")));
            }
            if !in_open_interval(value) {
                return Err(TuneError::OutOfBounds {
                    slot: name.clone(),
                    value,
                });
            }
        }
        let mut ordered_free = Vec::new();
        for name in &universe {
            let is_free = free.iter().any(|f| f == name);
            let is_fixed = fixed.contains_key(name);
            match (is_free, is_fixed) {
                (true, true) => {
                    return Err(TuneError::Problem(format!(
                        "slot `{name}` is both free and fixed"
                    )))
                }
                (false, false) => {
                    return Err(TuneError::Problem(format!(
                        "slot `{name}` is neither free nor fixed"
                    )))
                }
                (true, false) => ordered_free.push(name.clone()),
                (false, true) => {}
            }
        }
        Ok(TuneProblem {
            inner_count,
            free: ordered_free,
            fixed: fixed.clone(),
            objective,
        })
    }

    /// The standard search: inner pairs pinned with exits locked to
    /// `π/2 − entry`, entry and exit splitters of the whole chain free.
    pub fn dump_locked(entries: &[f64], objective: Objective) -> Result<Self, TuneError> {
        let mut fixed = BTreeMap::new();
        for (i, &entry) in entries.iter().enumerate() {
            fixed.insert(format!("inner{}_entry", i + 1), entry);
            fixed.insert(format!("inner{}_exit", i + 1), FRAC_PI_2 - entry);
        }
        TuneProblem::new(entries.len(), &["theta_0", "theta_f"], &fixed, objective)
    }

    pub fn inner_count(&self) -> usize {
        self.inner_count
    }

    /// Free slot names, in the order `evaluate` expects their values.
    pub fn free_slots(&self) -> &[String] {
        &self.free
    }

    pub fn fixed_slots(&self) -> &BTreeMap<String, f64> {
        &self.fixed
    }

    fn assemble(&self, free_values: &[f64]) -> Result<BTreeMap<String, f64>, TuneError> {
        if free_values.len() != self.free.len() {
            return Err(TuneError::Problem(format!(
                "expected {} free values, got {}",
                self.free.len(),
                free_values.len()
            )));
        }
        let mut slots = self.fixed.clone();
        for (name, &value) in self.free.iter().zip(free_values) {
            if !in_open_interval(value) {
                return Err(TuneError::OutOfBounds {
                    slot: name.clone(),
                    value,
                });
            }
            slots.insert(name.clone(), value);
        }
        Ok(slots)
    }

    /// Build both circuits for this assignment and read off the metrics.
    pub fn evaluate(&self, free_values: &[f64]) -> Result<TuneMetrics, TuneError> {
        let slots = self.assemble(free_values)?;
        let angles = VaidmanAngles::from_slots(self.inner_count, &slots)?;
        let blocked = build_vaidman(&angles, BobAction::Block)?;
        let open = build_vaidman(&angles, BobAction::Open)?;
        let input = PhotonState::vacuum();
        let block_dist = blocked.circuit.run_fock(&input)?;
        let open_dist = open.circuit.run_fock(&input)?;
        let loss = loss_statistics(&block_dist, &open_dist, &blocked.mapping);
        Ok(TuneMetrics {
            p_loss_block: loss.p_abort_block,
            p_loss_open: loss.p_abort_open,
            p_d0_block: block_dist.probability("D0"),
            p_d1_block: block_dist.probability("D1"),
            p_d0_open: open_dist.probability("D0"),
            p_d1_open: open_dist.probability("D1"),
        })
    }

    /// Deterministic grid of starting points over the free slots: up to
    /// five values per dimension, capped at 625 seeds overall.
    pub fn default_seeds(&self) -> Vec<Vec<f64>> {
        let dims = self.free.len();
        if dims == 0 {
            return vec![Vec::new()];
        }
        let per_dim = (1..=5usize)
            .rev()
            .find(|&k| (k as f64).powi(dims as i32) <= 625.0)
            .unwrap_or(1);
        let values: Vec<f64> = (1..=per_dim)
            .map(|i| FRAC_PI_2 * i as f64 / (per_dim + 1) as f64)
            .collect();
        let mut seeds = Vec::with_capacity(per_dim.pow(dims as u32));
        let mut counters = vec![0usize; dims];
        loop {
            seeds.push(counters.iter().map(|&c| values[c]).collect());
            let mut axis = dims;
            loop {
                if axis == 0 {
                    return seeds;
                }
                axis -= 1;
                counters[axis] += 1;
                if counters[axis] < per_dim {
                    break;
                }
                counters[axis] = 0;
            }
        }
    }
}

/// Best assignment a search found, with its verified statistics.
#[derive(Debug, Clone, Serialize)]
pub struct TuneResult {
    /// Full slot assignment, fixed and solved slots together.
    pub params: BTreeMap<String, f64>,
    /// Solved values of the free slots, in canonical order.
    pub free_values: Vec<f64>,
    /// `|p_loss_block − p_loss_open|` at the solution.
    pub residual: f64,
    /// `max(P(D1|open), P(D0|block))` at the solution.
    pub crosstalk: f64,
    /// The objective score; equals `residual` for the plain objective.
    pub objective_score: f64,
    pub metrics: TuneMetrics,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    pub seed_count: usize,
    /// Running best score per iteration, non-increasing.
    #[serde(skip)]
    pub score_history: Vec<f64>,
}

impl TuneResult {
    fn from_point(
        problem: &TuneProblem,
        free_values: Vec<f64>,
        iterations: usize,
        evaluations: usize,
        seed_count: usize,
        score_history: Vec<f64>,
    ) -> Result<Self, TuneError> {
        let metrics = problem.evaluate(&free_values)?;
        let score = problem.objective.score(&metrics);
        let converged = score < CONVERGENCE_TOL && metrics.p_d1_open <= OPEN_LEAK_GUARD;
        Ok(TuneResult {
            params: problem.assemble(&free_values)?,
            free_values,
            residual: metrics.residual(),
            crosstalk: metrics.crosstalk(),
            objective_score: score,
            metrics,
            converged,
            iterations,
            evaluations,
            seed_count,
            score_history,
        })
    }
}

/// Search for an equal-loss assignment, restarting the descent from each
/// seed and keeping the best point found. A failed search is reported as
/// a result with `converged = false`, not as an error.
pub fn solve_equal_loss(
    problem: &TuneProblem,
    seeds: &[Vec<f64>],
) -> Result<TuneResult, TuneError> {
    if seeds.is_empty() {
        return Err(TuneError::Problem("at least one seed is required".into()));
    }
    let dims = problem.free.len();
    for seed in seeds {
        if seed.len() != dims {
            return Err(TuneError::Problem(format!(
                "seed has {} coordinates, expected {dims}",
                seed.len()
            )));
        }
        for (name, &value) in problem.free.iter().zip(seed) {
            if !in_open_interval(value) {
                return Err(TuneError::OutOfBounds {
                    slot: name.clone(),
                    value,
                });
            }
        }
    }

    if dims == 0 {
        // Nothing to search; report the pinned assignment as found.
        let metrics = problem.evaluate(&[])?;
        let score = problem.objective.score(&metrics);
        return TuneResult::from_point(problem, Vec::new(), 0, 1, seeds.len(), vec![score]);
    }

    let lower = vec![BOUND_MARGIN; dims];
    let upper = vec![FRAC_PI_2 - BOUND_MARGIN; dims];
    let options = SimplexOptions {
        target: SEED_TARGET,
        ..SimplexOptions::default()
    };

    let mut best_point: Option<Vec<f64>> = None;
    let mut best_value = f64::INFINITY;
    let mut iterations = 0usize;
    let mut evaluations = 0usize;
    let mut score_history = Vec::new();
    for seed in seeds {
        let mut squared = |point: &[f64]| -> f64 {
            match problem.evaluate(point) {
                Ok(metrics) => {
                    let s = problem.objective.score(&metrics);
                    s * s
                }
                // Clamped points stay inside the domain, so evaluation
                // cannot fail here; treat a failure as an infinitely bad
                // point rather than aborting the whole search.
                Err(_) => f64::INFINITY,
            }
        };
        let outcome = simplex::minimize(&mut squared, seed, &lower, &upper, &options);
        iterations += outcome.iterations;
        evaluations += outcome.evaluations;
        for value in outcome.history {
            let running = best_value.min(value);
            score_history.push(running.max(0.0).sqrt());
        }
        if outcome.value < best_value {
            best_value = outcome.value;
            best_point = Some(outcome.point);
        }
        if best_value < SEED_TARGET {
            break;
        }
    }

    TuneResult::from_point(
        problem,
        best_point.expect("at least one seed was searched"),
        iterations,
        evaluations,
        seeds.len(),
        score_history,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4};

    const EPS: f64 = 1e-12;

    fn all_free_problem() -> TuneProblem {
        let names = VaidmanAngles::slot_names(2);
        let free: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        TuneProblem::new(2, &free, &BTreeMap::new(), Objective::EqualLoss).unwrap()
    }

    #[test]
    fn uniform_quarter_pi_assignment_is_the_frozen_baseline() {
        let problem = all_free_problem();
        let metrics = problem.evaluate(&[FRAC_PI_4; 6]).unwrap();
        assert!((metrics.p_loss_block - 53.0 / 64.0).abs() < EPS);
        assert!((metrics.p_loss_open - 0.75).abs() < EPS);
        assert!((metrics.residual() - 5.0 / 64.0).abs() < EPS);
        assert!((metrics.p_d0_block - 9.0 / 64.0).abs() < EPS);
        assert!((metrics.p_d1_block - 1.0 / 32.0).abs() < EPS);
        assert!((metrics.p_d0_open - 0.25).abs() < EPS);
        assert!(metrics.p_d1_open < EPS);
        assert!((metrics.crosstalk() - 9.0 / 64.0).abs() < EPS);
    }

    #[test]
    fn pinned_analytic_solution_verifies_without_searching() {
        // With inner pairs (π/4, π/4) and (π/3, π/6), the zero-crosstalk
        // and equal-loss conditions solve in closed form to
        // tan θ0 = 8√6/3 and tan θf = 1/√2.
        let mut fixed = BTreeMap::new();
        fixed.insert("inner1_entry".to_string(), FRAC_PI_4);
        fixed.insert("inner1_exit".to_string(), FRAC_PI_4);
        fixed.insert("inner2_entry".to_string(), FRAC_PI_3);
        fixed.insert("inner2_exit".to_string(), FRAC_PI_2 - FRAC_PI_3);
        fixed.insert("theta_0".to_string(), (8.0 * 6f64.sqrt() / 3.0).atan());
        fixed.insert("theta_f".to_string(), (1.0 / 2f64.sqrt()).atan());
        let problem =
            TuneProblem::new(2, &[], &fixed, Objective::EqualLossAndZeroCrosstalk).unwrap();
        let result = solve_equal_loss(&problem, &problem.default_seeds()).unwrap();
        assert!(result.converged);
        assert_eq!(result.iterations, 0);
        assert!(result.residual < EPS);
        assert!(result.metrics.p_d0_block < EPS);
        assert!(result.metrics.p_d1_open < EPS);
        assert!((result.metrics.p_d1_block - 2.0 / 131.0).abs() < EPS);
        assert!((result.metrics.p_loss_block - 129.0 / 131.0).abs() < EPS);
    }

    #[test]
    fn default_seeds_recover_the_analytic_solution() {
        let problem = TuneProblem::dump_locked(
            &[FRAC_PI_4, FRAC_PI_3],
            Objective::EqualLossAndZeroCrosstalk,
        )
        .unwrap();
        let result = solve_equal_loss(&problem, &problem.default_seeds()).unwrap();
        assert!(result.converged, "best score {}", result.objective_score);
        assert!(result.residual < CONVERGENCE_TOL);
        assert!(result.crosstalk < CONVERGENCE_TOL);
        assert!(result.metrics.p_d1_open <= OPEN_LEAK_GUARD);
        let theta_0 = result.params["theta_0"];
        let theta_f = result.params["theta_f"];
        assert!((theta_0 - (8.0 * 6f64.sqrt() / 3.0).atan()).abs() < 1e-3);
        assert!((theta_f - (1.0 / 2f64.sqrt()).atan()).abs() < 1e-3);
        assert!((result.metrics.p_d1_block - 2.0 / 131.0).abs() < 1e-5);
    }

    #[test]
    fn solver_reports_honestly_and_reproducibly() {
        let problem = TuneProblem::dump_locked(
            &[FRAC_PI_4, FRAC_PI_3],
            Objective::EqualLossAndZeroCrosstalk,
        )
        .unwrap();
        let result = solve_equal_loss(&problem, &[vec![1.3, 0.6]]).unwrap();
        assert!(result.converged);
        // Re-evaluating the reported point reproduces the reported numbers.
        let again = problem.evaluate(&result.free_values).unwrap();
        assert!((again.residual() - result.residual).abs() < EPS);
        assert!((problem.objective.score(&again) - result.objective_score).abs() < EPS);
        // The running best score never increases.
        for pair in result.score_history.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-300);
        }
    }

    #[test]
    fn invalid_problems_are_rejected() {
        let fixed: BTreeMap<String, f64> = BTreeMap::new();
        assert!(matches!(
            TuneProblem::new(1, &["theta_0"], &fixed, Objective::EqualLoss),
            Err(TuneError::Problem(_))
        ));
        assert!(matches!(
            TuneProblem::new(2, &["theta_9"], &fixed, Objective::EqualLoss),
            Err(TuneError::Problem(_))
        ));
        // Missing coverage: only theta_0 accounted for.
        assert!(matches!(
            TuneProblem::new(2, &["theta_0"], &fixed, Objective::EqualLoss),
            Err(TuneError::Problem(_))
        ));
        let mut overlap = BTreeMap::new();
        overlap.insert("theta_0".to_string(), FRAC_PI_4);
        let names = VaidmanAngles::slot_names(2);
        let free: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        assert!(matches!(
            TuneProblem::new(2, &free, &overlap, Objective::EqualLoss),
            Err(TuneError::Problem(_))
        ));
        let mut outside = overlap.clone();
        outside.insert("theta_0".to_string(), -0.2);
        assert!(matches!(
            TuneProblem::new(2, &[], &outside, Objective::EqualLoss),
            Err(TuneError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn bad_seeds_are_rejected() {
        let problem =
            TuneProblem::dump_locked(&[FRAC_PI_4, FRAC_PI_3], Objective::EqualLoss).unwrap();
        assert!(matches!(
            solve_equal_loss(&problem, &[]),
            Err(TuneError::Problem(_))
        ));
        assert!(matches!(
            solve_equal_loss(&problem, &[vec![0.4]]),
            Err(TuneError::Problem(_))
        ));
        assert!(matches!(
            solve_equal_loss(&problem, &[vec![-0.1, 0.4]]),
            Err(TuneError::OutOfBounds { .. })
        ));
        assert!(matches!(
            solve_equal_loss(&problem, &[vec![0.4, FRAC_PI_2]]),
            Err(TuneError::OutOfBounds { .. })
        ));
    }

    #[test]
    fn seed_grid_is_deterministic_and_capped() {
        let problem =
            TuneProblem::dump_locked(&[FRAC_PI_4, FRAC_PI_3], Objective::EqualLoss).unwrap();
        let seeds = problem.default_seeds();
        assert_eq!(seeds.len(), 25);
        assert_eq!(seeds, problem.default_seeds());
        for seed in &seeds {
            assert!(seed.iter().all(|&v| in_open_interval(v)));
        }
        let wide = all_free_problem();
        let seeds = wide.default_seeds();
        // Three per dimension would overflow the cap in six dimensions.
        assert_eq!(seeds.len(), 64);
    }
}
