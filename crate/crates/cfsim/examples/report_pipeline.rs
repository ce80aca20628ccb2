//! Driving the reporting pipeline from code instead of the command line.
//!
//! Everything the `cfsim` binary does is one function call away: build a
//! flat config, run a command, render the table. This example sweeps the
//! inner cycle count of the nested protocol, prints the CSV, and then
//! reads one number back out of the typed table. Run with
//! `cargo run --example report_pipeline`.

use cfsim::harness::{cmd_sweep, OutputFormat, RawConfig, ReportValue};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut config = RawConfig::new();
    for (key, value) in [
        ("protocol", "salih"),
        ("outer", "2"),
        ("bob", "block"),
        ("sweep_param", "inner"),
        ("sweep_values", "1,2,4,8,16"),
    ] {
        config.set(key, value)?;
    }

    let table = cmd_sweep(&config)?;
    print!("{}", table.render(OutputFormat::Csv));

    // The table is plain data; pull the last sweep point's D1 weight.
    let last = table.rows.last().expect("sweep produced rows");
    if let Some(ReportValue::Number(p)) = last.get("p_D1") {
        println!();
        println!("P(D1 | block) at 16 inner cycles: {p:.6}");
    }
    let trend = table
        .summary
        .iter()
        .find(|line| line.column == "p_D1")
        .expect("summary covers p_D1");
    println!("trend across the sweep: {}", trend.trend);
    println!();
    println!("The same table renders as JSON with OutputFormat::Json, and");
    println!("the `cfsim` binary is nothing but this pipeline behind clap.");
    Ok(())
}
