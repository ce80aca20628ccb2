//! `cfsim`: simulate, analyze, sweep, and tune counterfactual
//! communication protocols from the command line.
//!
//! Every option can also come from a flat `key = value` config file; flags
//! override the file. Reports go to stdout, or to `output = PATH` (resolved
//! under `$CFSIM_OUTPUT_DIR` when that is set and the path is relative).

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

use cfsim::harness::{
    cmd_analyze, cmd_simulate, cmd_sweep, cmd_tune, HarnessError, RawConfig, ReportTable,
};

#[derive(Parser)]
#[command(
    name = "cfsim",
    about = "Deterministic simulator for quantum counterfactual communication protocols",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a protocol and report per-terminal outcome probabilities.
    Simulate(RunArgs),
    /// Run a protocol and attach the requested analysis columns.
    Analyze(RunArgs),
    /// Repeat a run over a parameter list and summarize the trends.
    Sweep(RunArgs),
    /// Solve the chained-interferometer angles for equal loss.
    Tune(TuneArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Protocol family: ev, noh, zeno, salih, or vaidman.
    #[arg(long)]
    protocol: Option<String>,
    /// Bob's action: block or open (default: report both).
    #[arg(long)]
    bob: Option<String>,
    /// Alias for --bob in bomb-tester terms: live or dud.
    #[arg(long)]
    bomb: Option<String>,
    /// Light model: fock or classical.
    #[arg(long)]
    light: Option<String>,
    /// Comma-separated analyses: outcomes,weaktrace,histories,crossing,loss.
    #[arg(long)]
    analyses: Option<String>,
    /// Terminal the weak-trace and history analyses post-select on.
    #[arg(long)]
    outcome: Option<String>,
    /// Presence threshold for weak values.
    #[arg(long)]
    epsilon: Option<String>,
    /// Outer cycle count for the nested chain.
    #[arg(long)]
    outer: Option<String>,
    /// Inner cycle count for the nested chain.
    #[arg(long)]
    inner: Option<String>,
    /// Use the polarization-encoded nested chain.
    #[arg(long)]
    polarized: Option<String>,
    /// Cycle count for the interaction-free chain.
    #[arg(long)]
    cycles: Option<String>,
    /// Beam-splitter angle for the exchange interferometer, in radians.
    #[arg(long)]
    theta: Option<String>,
    /// Number of chained inner interferometers.
    #[arg(long)]
    inner_count: Option<String>,
    /// Parameter to sweep (any scalar config key).
    #[arg(long)]
    sweep_param: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long)]
    sweep_values: Option<String>,
    /// Report format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<String>,
    /// Extra KEY=VALUE override; repeatable, reaches every config key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct TuneArgs {
    /// Flat key = value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of chained inner interferometers.
    #[arg(long)]
    inner_count: Option<String>,
    /// Objective: equal_loss or equal_loss_and_zero_crosstalk.
    #[arg(long)]
    objective: Option<String>,
    /// Comma-separated free angle slots, e.g. theta_0,theta_f.
    #[arg(long)]
    free: Option<String>,
    /// Pin a slot to a value: SLOT=RADIANS; repeatable.
    #[arg(long = "fix", value_name = "SLOT=RADIANS")]
    fix: Vec<String>,
    /// Starting points, semicolon-separated: "a,b;c,d".
    #[arg(long)]
    seeds: Option<String>,
    /// Report format: json or csv.
    #[arg(long)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<String>,
    /// Extra KEY=VALUE override; repeatable, reaches every config key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn split_assignment(spec: &str) -> Result<(&str, &str), HarnessError> {
    spec.split_once('=')
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| HarnessError::Usage(format!("expected KEY=VALUE, got `{spec}`")))
}

fn load_config(path: Option<&Path>) -> Result<RawConfig, HarnessError> {
    match path {
        Some(path) => RawConfig::from_file(path),
        None => Ok(RawConfig::new()),
    }
}

impl RunArgs {
    fn into_config(self) -> Result<RawConfig, HarnessError> {
        let mut raw = load_config(self.config.as_deref())?;
        let flags = [
            ("protocol", &self.protocol),
            ("bob", &self.bob),
            ("bomb", &self.bomb),
            ("light", &self.light),
            ("analyses", &self.analyses),
            ("outcome", &self.outcome),
            ("epsilon", &self.epsilon),
            ("outer", &self.outer),
            ("inner", &self.inner),
            ("polarized", &self.polarized),
            ("cycles", &self.cycles),
            ("theta", &self.theta),
            ("inner_count", &self.inner_count),
            ("sweep_param", &self.sweep_param),
            ("sweep_values", &self.sweep_values),
            ("format", &self.format),
            ("output", &self.output),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                raw.set(key, value)?;
            }
        }
        for spec in &self.set {
            let (key, value) = split_assignment(spec)?;
            raw.set(key, value)?;
        }
        Ok(raw)
    }
}

impl TuneArgs {
    fn into_config(self) -> Result<RawConfig, HarnessError> {
        let mut raw = load_config(self.config.as_deref())?;
        let flags = [
            ("inner_count", &self.inner_count),
            ("objective", &self.objective),
            ("free", &self.free),
            ("seeds", &self.seeds),
            ("format", &self.format),
            ("output", &self.output),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                raw.set(key, value)?;
            }
        }
        for spec in &self.fix {
            let (slot, value) = split_assignment(spec)?;
            raw.set(&format!("fix_{slot}"), value)?;
        }
        for spec in &self.set {
            let (key, value) = split_assignment(spec)?;
            raw.set(key, value)?;
        }
        Ok(raw)
    }
}

/// Write the rendered report to stdout or the configured path. Relative
/// paths land under `$CFSIM_OUTPUT_DIR` when that variable is set.
fn emit(raw: &RawConfig, table: &ReportTable) -> Result<(), HarnessError> {
    let rendered = table.render(raw.format()?);
    match raw.output_path() {
        None => {
            print!("{rendered}");
            Ok(())
        }
        Some(path) => {
            let mut target = PathBuf::from(path);
            if target.is_relative() {
                if let Ok(dir) = std::env::var("CFSIM_OUTPUT_DIR") {
                    target = Path::new(&dir).join(target);
                }
            }
            if let Some(parent) = target.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(&target, rendered)?;
            eprintln!("wrote {}", target.display());
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    match cli.command {
        Command::Simulate(args) => {
            let raw = args.into_config()?;
            emit(&raw, &cmd_simulate(&raw)?)?;
            Ok(0)
        }
        Command::Analyze(args) => {
            let raw = args.into_config()?;
            emit(&raw, &cmd_analyze(&raw)?)?;
            Ok(0)
        }
        Command::Sweep(args) => {
            let raw = args.into_config()?;
            emit(&raw, &cmd_sweep(&raw)?)?;
            Ok(0)
        }
        Command::Tune(args) => {
            let raw = args.into_config()?;
            let (table, result) = cmd_tune(&raw)?;
            emit(&raw, &table)?;
            if result.converged {
                Ok(0)
            } else {
                eprintln!(
                    "tune: best residual {:.3e} after {} seeds; not converged",
                    result.residual, result.seed_count
                );
                Ok(4)
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("cfsim: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
