//! A reduced Monte Carlo study: bias and MSE of OLS, CFG, Hall–Tajvidi and
//! Deheuvels along w1 = w2, written as CSV plus a gnuplot script.
//!
//! Usage: cargo run --release --example bench_study [-- OUT_DIR [REPS]]

use std::path::PathBuf;

use evcopula::bench::{emit_plot_script, run_experiment, summarize_to_csv, ExperimentConfig};
use evcopula::{EstimatorId, ModelSpec};

fn main() -> evcopula::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "bench-out".into()));
    let reps = args.next().and_then(|s| s.parse().ok()).unwrap_or(500);
    std::fs::create_dir_all(&out)?;

    let config = ExperimentConfig::standard_study(ModelSpec::symlog(3.0), reps, 1);
    let summary = run_experiment(&config)?;
    summarize_to_csv(&summary, &out.join("summary.csv"))?;
    emit_plot_script(&summary, &out.join("plot.gp"))?;

    // average MSE over the grid, per sample size
    for &n in &config.n_list {
        print!("n = {n:>4}:");
        for id in [
            EstimatorId::Ols,
            EstimatorId::Cfg,
            EstimatorId::HallTajvidi,
            EstimatorId::Deheuvels,
        ] {
            let rows = summary.curve(n, id);
            let mse = rows.iter().map(|r| r.mse).sum::<f64>() / rows.len() as f64;
            print!("  {} {:.2e}", id.name(), mse);
        }
        println!();
    }
    println!("wrote {}", out.join("summary.csv").display());
    Ok(())
}
