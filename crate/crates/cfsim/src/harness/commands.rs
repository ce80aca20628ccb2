//! The four operations behind the command-line subcommands.
//!
//! Each command turns a [`RawConfig`](super::RawConfig) into a
//! [`ReportTable`](super::ReportTable): `simulate` emits outcome rows,
//! `analyze` adds the requested analysis columns, `sweep` repeats either
//! over a parameter list and appends trend summaries, and `tune` runs the
//! equal-loss solver. Sweep points are evaluated concurrently but written
//! in sweep-value order, so output bytes never depend on scheduling.

use super::config::{Analysis, RawConfig};
use super::report::{ReportRow, ReportTable, ReportValue, SummaryLine};
use super::HarnessError;
use crate::counterfactuality::{
    build_history_family, classical_crossing, classify_by_histories, far_cell_names, fock_crossing,
    loss_statistics, weak_trace, AnalysisError, CounterfactualVerdict,
};
use crate::optics::{LightModel, OpticsError, PhotonState, TerminalId};
use crate::protocols::{BitMapping, BobAction, ProtocolCircuit};
use crate::tuner::TuneResult;

/// Per-terminal probabilities must sum to one within this, per row.
const ROW_TOTAL_TOL: f64 = 1e-9;

fn verdict_name(verdict: CounterfactualVerdict) -> &'static str {
    match verdict {
        CounterfactualVerdict::Counterfactual => "counterfactual",
        CounterfactualVerdict::NotCounterfactual => "not_counterfactual",
        CounterfactualVerdict::Meaningless => "meaningless",
    }
}

/// The outcome analyses post-select on: the configured override, or the
/// terminal that decodes to the bit Bob's action is sending.
fn info_outcome(
    protocol: &ProtocolCircuit,
    requested: Option<&str>,
) -> Result<TerminalId, HarnessError> {
    if let Some(name) = requested {
        let id = TerminalId::new(name);
        if !protocol.circuit.terminals.contains_key(&id) {
            return Err(HarnessError::Usage(format!(
                "outcome: protocol has no terminal `{name}`"
            )));
        }
        return Ok(id);
    }
    let expected = BitMapping::expected(protocol.bob_action);
    protocol
        .mapping
        .terminals_for(expected)
        .first()
        .map(|t| (*t).clone())
        .ok_or_else(|| {
            HarnessError::Internal("protocol decodes no terminal to its success bit".into())
        })
}

fn run_distribution(
    protocol: &ProtocolCircuit,
    light: LightModel,
) -> Result<crate::optics::OutcomeDistribution, HarnessError> {
    let input = PhotonState::vacuum();
    let dist = match light {
        LightModel::Fock => protocol.circuit.run_fock(&input),
        LightModel::Classical => protocol.circuit.run_classical(&input),
    }?;
    Ok(dist)
}

fn analyze_one(
    raw: &RawConfig,
    action: BobAction,
    analyses: &[Analysis],
    light: LightModel,
) -> Result<ReportRow, HarnessError> {
    let protocol = raw.build_protocol(action)?;
    let input = PhotonState::vacuum();
    let mut row = ReportRow::new();
    row.text("protocol", protocol.family.to_string());
    for (key, value) in &protocol.params {
        row.text(format!("param_{key}"), value.clone());
    }
    row.text("bob_action", protocol.bob_action.to_string());
    row.text("light", light.to_string());

    for analysis in analyses {
        match analysis {
            Analysis::Outcomes => {
                let dist = run_distribution(&protocol, light)?;
                let total = dist.total();
                if (total - 1.0).abs() > ROW_TOTAL_TOL {
                    return Err(HarnessError::Internal(format!(
                        "row probabilities sum to {total}, expected 1"
                    )));
                }
                for (terminal, &p) in &dist.probabilities {
                    row.number(format!("p_{terminal}"), p);
                }
                row.number("outcome_total", total);
            }
            Analysis::WeakTrace => {
                let outcome = info_outcome(&protocol, raw.outcome_override())?;
                row.text("weak_outcome", outcome.to_string());
                match weak_trace(&protocol.circuit, &input, &outcome, raw.epsilon()?) {
                    Ok(report) => {
                        let crossing = fock_crossing(&report);
                        let far_presence = report.far_presences().next().is_some();
                        row.number("weak_outcome_probability", report.outcome_probability);
                        row.number("weak_epsilon", report.epsilon);
                        row.number("weak_completeness_defect", report.completeness_defect);
                        row.number("weak_far_peak", crossing.peak);
                        row.flag("weak_far_presence", far_presence);
                        row.text(
                            "weak_verdict",
                            if far_presence {
                                "Bob-region presence"
                            } else {
                                "no Bob-region presence"
                            },
                        );
                    }
                    Err(AnalysisError::Optics(OpticsError::NullPostSelection { .. })) => {
                        row.number("weak_outcome_probability", 0.0);
                        row.text("weak_verdict", "outcome unreachable");
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Analysis::Histories => {
                let outcome = info_outcome(&protocol, raw.outcome_override())?;
                let family = build_history_family(
                    &protocol.circuit,
                    &input,
                    &protocol.cycle_cuts,
                    &protocol.cells,
                )?;
                let far = far_cell_names(&protocol.circuit, &protocol.cells);
                let class = classify_by_histories(&family, &outcome, &far);
                row.text("hist_outcome", outcome.to_string());
                row.flag("hist_consistent", class.consistent);
                row.number("hist_max_offdiag_re", class.max_offdiag_re);
                row.integer("hist_count", class.history_count as i64);
                row.number("hist_outcome_probability", class.outcome_probability);
                row.text("hist_verdict", verdict_name(class.verdict));
                if let Some(path) = &class.crossing_history {
                    row.text("hist_crossing_history", path.clone());
                }
            }
            Analysis::Crossing => {
                let classical = classical_crossing(&protocol.circuit, &input)?;
                row.number("crossing_classical_peak", classical.peak);
                row.integer("crossing_classical_cut", classical.peak_cut as i64);
                let outcome = info_outcome(&protocol, raw.outcome_override())?;
                match weak_trace(&protocol.circuit, &input, &outcome, raw.epsilon()?) {
                    Ok(report) => {
                        let fock = fock_crossing(&report);
                        row.number("crossing_fock_peak", fock.peak);
                        row.integer("crossing_fock_cut", fock.peak_cut as i64);
                        row.flag("crossing_far_presence", fock.any_far_presence);
                    }
                    Err(AnalysisError::Optics(OpticsError::NullPostSelection { .. })) => {
                        row.text("crossing_note", "outcome unreachable");
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Analysis::Loss => {
                let blocked = raw.build_protocol(BobAction::Block)?;
                let open = raw.build_protocol(BobAction::Open)?;
                let loss = loss_statistics(
                    &run_distribution(&blocked, light)?,
                    &run_distribution(&open, light)?,
                    &blocked.mapping,
                );
                row.number("loss_p_success_block", loss.p_success_block);
                row.number("loss_p_success_open", loss.p_success_open);
                row.number("loss_p_wrong_block", loss.p_wrong_block);
                row.number("loss_p_wrong_open", loss.p_wrong_open);
                row.number("loss_p_abort_block", loss.p_abort_block);
                row.number("loss_p_abort_open", loss.p_abort_open);
                row.number("loss_equal_residual", loss.equal_loss_residual);
                row.number("loss_leakage_bits", loss.leakage_bits);
            }
        }
    }
    Ok(row)
}

fn rows_for_config(raw: &RawConfig, analyses: &[Analysis]) -> Result<Vec<ReportRow>, HarnessError> {
    let light = raw.light()?;
    let mut rows = Vec::new();
    for action in raw.actions()? {
        rows.push(analyze_one(raw, action, analyses, light)?);
    }
    Ok(rows)
}

/// Rows for every sweep point, evaluated concurrently, merged in sweep
/// order. Without a sweep request this is a single-point run.
fn sweep_rows(raw: &RawConfig, analyses: &[Analysis]) -> Result<Vec<ReportRow>, HarnessError> {
    let Some((param, values)) = raw.sweep()? else {
        return rows_for_config(raw, analyses);
    };
    let points: Vec<RawConfig> = values
        .iter()
        .map(|value| raw.with_value(&param, value))
        .collect::<Result<_, _>>()?;

    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(points.len().max(1));
    let chunk_size = points.len().div_ceil(workers);
    let mut results: Vec<Result<Vec<ReportRow>, HarnessError>> = Vec::with_capacity(points.len());
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in points.chunks(chunk_size) {
            handles.push(scope.spawn(move || {
                chunk
                    .iter()
                    .map(|point| rows_for_config(point, analyses))
                    .collect::<Vec<_>>()
            }));
        }
        for handle in handles {
            results.extend(handle.join().expect("sweep worker never panics"));
        }
    });

    let mut rows = Vec::new();
    for (value, result) in values.iter().zip(results) {
        for mut row in result? {
            let mut tagged = ReportRow::new();
            tagged.text("sweep_param", param.clone());
            tagged.text("sweep_value", value.clone());
            for name in row.columns().map(String::from).collect::<Vec<_>>() {
                if let Some(cell) = row.get(&name) {
                    tagged.set(name, cell.clone());
                }
            }
            row = tagged;
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Trend lines for every numeric column, per action, in sweep order.
fn summarize(rows: &[ReportRow]) -> Vec<SummaryLine> {
    let mut actions = Vec::new();
    for row in rows {
        if let Some(ReportValue::Text(action)) = row.get("bob_action") {
            if !actions.iter().any(|a| a == action) {
                actions.push(action.clone());
            }
        }
    }
    let mut columns = Vec::new();
    for row in rows {
        for name in row.columns() {
            if matches!(row.get(name), Some(ReportValue::Number(_)))
                && !columns.iter().any(|c| c == name)
            {
                columns.push(name.to_string());
            }
        }
    }

    let mut summary = Vec::new();
    for column in &columns {
        for action in &actions {
            let series: Vec<f64> = rows
                .iter()
                .filter(|row| {
                    matches!(row.get("bob_action"),
                             Some(ReportValue::Text(a)) if a == action)
                })
                .filter_map(|row| match row.get(column) {
                    Some(ReportValue::Number(x)) => Some(*x),
                    _ => None,
                })
                .collect();
            if series.len() < 2 {
                continue;
            }
            let increasing = series.windows(2).all(|w| w[1] > w[0]);
            let decreasing = series.windows(2).all(|w| w[1] < w[0]);
            let constant = series.windows(2).all(|w| w[1] == w[0]);
            let trend = if constant {
                "constant"
            } else if increasing {
                "strictly_increasing"
            } else if decreasing {
                "strictly_decreasing"
            } else {
                "mixed"
            };
            summary.push(SummaryLine {
                column: column.clone(),
                bob_action: action.clone(),
                trend: trend.to_string(),
                first: series[0],
                last: *series.last().expect("series has at least two points"),
            });
        }
    }
    summary
}

/// Outcome rows, one per (sweep point ×) action.
pub fn cmd_simulate(raw: &RawConfig) -> Result<ReportTable, HarnessError> {
    let rows = sweep_rows(raw, &[Analysis::Outcomes])?;
    Ok(ReportTable::from_rows(rows))
}

/// Rows with the requested analysis columns (all five by default).
pub fn cmd_analyze(raw: &RawConfig) -> Result<ReportTable, HarnessError> {
    let analyses = raw.analyses(&Analysis::ALL)?;
    let rows = sweep_rows(raw, &analyses)?;
    Ok(ReportTable::from_rows(rows))
}

/// Sweep table plus per-column trend summaries.
pub fn cmd_sweep(raw: &RawConfig) -> Result<ReportTable, HarnessError> {
    if raw.sweep()?.is_none() {
        return Err(HarnessError::Usage(
            "sweep_param: required for the sweep command".into(),
        ));
    }
    let analyses = raw.analyses(&[Analysis::Outcomes])?;
    let rows = sweep_rows(raw, &analyses)?;
    let summary = summarize(&rows);
    Ok(ReportTable { rows, summary })
}

/// Run the equal-loss solver and report the best assignment found.
pub fn cmd_tune(raw: &RawConfig) -> Result<(ReportTable, TuneResult), HarnessError> {
    let problem = raw.tune_problem()?;
    let result = raw.solve(&problem)?;
    let mut row = ReportRow::new();
    row.text("protocol", "vaidman");
    row.integer("inner_count", problem.inner_count() as i64);
    row.text("objective", problem.objective.to_string());
    row.flag("converged", result.converged);
    row.number("residual", result.residual);
    row.number("crosstalk", result.crosstalk);
    row.number("objective_score", result.objective_score);
    row.integer("iterations", result.iterations as i64);
    row.integer("evaluations", result.evaluations as i64);
    row.integer("seed_count", result.seed_count as i64);
    for (slot, &value) in &result.params {
        row.number(format!("slot_{slot}"), value);
    }
    row.number("p_loss_block", result.metrics.p_loss_block);
    row.number("p_loss_open", result.metrics.p_loss_open);
    row.number("p_d0_block", result.metrics.p_d0_block);
    row.number("p_d1_block", result.metrics.p_d1_block);
    row.number("p_d0_open", result.metrics.p_d0_open);
    row.number("p_d1_open", result.metrics.p_d1_open);
    Ok((ReportTable::from_rows(vec![row]), result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::salih_outer_recurrence;

    const EPS: f64 = 1e-12;

    fn config(pairs: &[(&str, &str)]) -> RawConfig {
        let mut raw = RawConfig::new();
        for (k, v) in pairs {
            raw.set(k, v).unwrap();
        }
        raw
    }

    fn number(row: &ReportRow, name: &str) -> f64 {
        match row.get(name) {
            Some(ReportValue::Number(x)) => *x,
            other => panic!("column {name} missing or not numeric: {other:?}"),
        }
    }

    fn text<'a>(row: &'a ReportRow, name: &str) -> &'a str {
        match row.get(name) {
            Some(ReportValue::Text(s)) => s.as_str(),
            other => panic!("column {name} missing or not text: {other:?}"),
        }
    }

    #[test]
    fn simulate_reports_the_armed_interferometer_split() {
        let table = cmd_simulate(&config(&[("protocol", "ev"), ("bomb", "live")])).unwrap();
        assert_eq!(table.rows.len(), 1);
        let row = &table.rows[0];
        assert!((number(row, "p_bomb") - 0.5).abs() < EPS);
        assert!((number(row, "p_D1") - 0.25).abs() < EPS);
        assert!((number(row, "p_D2") - 0.25).abs() < EPS);
        assert!((number(row, "outcome_total") - 1.0).abs() < EPS);
    }

    #[test]
    fn simulate_matches_the_nested_chain_recurrence() {
        let table = cmd_simulate(&config(&[
            ("protocol", "salih"),
            ("outer", "2"),
            ("inner", "4"),
            ("bob", "block"),
            ("light", "fock"),
        ]))
        .unwrap();
        let (p_d0, p_d1) = salih_outer_recurrence(2, 4, BobAction::Block);
        let row = &table.rows[0];
        assert!((number(row, "p_D0") - p_d0).abs() < EPS);
        assert!((number(row, "p_D1") - p_d1).abs() < EPS);
    }

    #[test]
    fn simulate_without_an_action_reports_both() {
        let table = cmd_simulate(&config(&[("protocol", "zeno"), ("cycles", "5")])).unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(text(&table.rows[0], "bob_action"), "block");
        assert_eq!(text(&table.rows[1], "bob_action"), "open");
        assert!((number(&table.rows[1], "p_DB") - 1.0).abs() < EPS);
    }

    #[test]
    fn analyze_certifies_the_polarized_nested_chain() {
        let table = cmd_analyze(&config(&[
            ("protocol", "salih"),
            ("outer", "3"),
            ("inner", "3"),
            ("polarized", "true"),
            ("bob", "block"),
            ("analyses", "weaktrace,crossing"),
        ]))
        .unwrap();
        let row = &table.rows[0];
        assert_eq!(text(row, "weak_outcome"), "D1");
        assert_eq!(text(row, "weak_verdict"), "no Bob-region presence");
        assert!(number(row, "weak_far_peak") < 1e-10);
        assert!(number(row, "crossing_classical_peak") > 1e-12);
    }

    #[test]
    fn analyze_sees_the_discontinuous_inner_trace() {
        // With Bob open, every inner-arm excursion ends in an event-tagged
        // loss absorption, so the cycle-boundary history family is consistent
        // and calls D0 counterfactual, while the weak trace at mid-cycle cuts
        // still finds the photon in Bob's region. The two columns disagreeing
        // on the same row is the point.
        let table = cmd_analyze(&config(&[
            ("protocol", "salih"),
            ("outer", "2"),
            ("inner", "2"),
            ("bob", "open"),
            ("outcome", "D0"),
            ("analyses", "weaktrace,histories"),
        ]))
        .unwrap();
        let row = &table.rows[0];
        assert_eq!(text(row, "weak_verdict"), "Bob-region presence");
        assert!((number(row, "weak_far_peak") - 0.5).abs() < 1e-9);
        assert_eq!(text(row, "hist_verdict"), "counterfactual");
        assert!(matches!(
            row.get("hist_consistent"),
            Some(ReportValue::Flag(true))
        ));
    }

    #[test]
    fn analyze_flags_the_blocked_family_as_undecidable() {
        let table = cmd_analyze(&config(&[
            ("protocol", "salih"),
            ("outer", "2"),
            ("inner", "2"),
            ("bob", "block"),
            ("analyses", "histories"),
        ]))
        .unwrap();
        let row = &table.rows[0];
        assert_eq!(text(row, "hist_verdict"), "meaningless");
        assert!((number(row, "hist_max_offdiag_re") - 0.125).abs() < EPS);
    }

    #[test]
    fn analyze_loss_columns_carry_the_leakage() {
        let table = cmd_analyze(&config(&[
            ("protocol", "ev"),
            ("bob", "block"),
            ("analyses", "loss"),
        ]))
        .unwrap();
        let row = &table.rows[0];
        assert!((number(row, "loss_leakage_bits") - 0.311_278_124_459_132_8).abs() < EPS);
        assert!((number(row, "loss_equal_residual") - 0.5).abs() < EPS);
    }

    #[test]
    fn unreachable_outcomes_degrade_gracefully() {
        // An open run never fires the blocked-run detector.
        let table = cmd_analyze(&config(&[
            ("protocol", "vaidman"),
            ("bob", "open"),
            ("outcome", "D1"),
            ("analyses", "weaktrace"),
        ]))
        .unwrap();
        assert_eq!(text(&table.rows[0], "weak_verdict"), "outcome unreachable");
    }

    #[test]
    fn sweep_summarizes_the_survival_trend() {
        let table = cmd_sweep(&config(&[
            ("protocol", "zeno"),
            ("bob", "block"),
            ("sweep_param", "cycles"),
            ("sweep_values", "2,4,8,16"),
        ]))
        .unwrap();
        assert_eq!(table.rows.len(), 4);
        assert_eq!(text(&table.rows[0], "sweep_value"), "2");
        let survival = table
            .summary
            .iter()
            .find(|line| line.column == "p_DA" && line.bob_action == "block")
            .expect("summary line for the survival column");
        assert_eq!(survival.trend, "strictly_increasing");
        assert!(survival.last > survival.first);
    }

    #[test]
    fn sweep_without_a_request_is_a_usage_error() {
        let err = cmd_sweep(&config(&[("protocol", "ev")])).unwrap_err();
        assert!(matches!(err, HarnessError::Usage(_)));
    }

    #[test]
    fn oversized_history_requests_trip_the_resource_guard() {
        let err = cmd_analyze(&config(&[
            ("protocol", "zeno"),
            ("cycles", "25"),
            ("bob", "block"),
            ("analyses", "histories"),
        ]))
        .unwrap_err();
        assert!(matches!(err, HarnessError::Resource(_)));
    }

    #[test]
    fn tune_reports_the_solved_angles() {
        let (table, result) = cmd_tune(&config(&[("seeds", "1.3,0.6")])).unwrap();
        assert!(result.converged);
        let row = &table.rows[0];
        assert_eq!(text(row, "objective"), "equal_loss_and_zero_crosstalk");
        assert!(number(row, "residual") < 1e-9);
        assert!((number(row, "slot_theta_0") - (8.0 * 6f64.sqrt() / 3.0).atan()).abs() < 1e-3);
    }
}
