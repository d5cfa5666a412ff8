//! Command line front end: simulate, estimate, asymptotics, bench.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use evcopula::asymptotics::{lambda_opt_hat, lambda_opt_quadrature, sigma_hat, sigma_quadrature};
use evcopula::bench::{emit_plot_script, run_experiment, summarize_to_csv, ExperimentConfig};
use evcopula::estimators::{estimate_curve, shape_correct};
use evcopula::io::{
    read_sample_csv, write_estimate_csv, write_optimal_weights_csv, write_sample_csv,
    write_sigma_csv,
};
use evcopula::{draw_sample_stream, EstimatorId, ModelSpec, SimplexGrid};

#[derive(Parser)]
#[command(name = "evcopula", version, about = "Pickands dependence function estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample with unit exponential margins and write it as CSV.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate A on a grid from a sample CSV.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',', default_value = "cfg,ols")]
        estimators: Vec<EstimatorId>,
        #[arg(long)]
        shape_correct: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimal CFG weights and variances, from a sample or by quadrature.
    Asymptotics {
        #[command(flatten)]
        model: ModelArgs,
        /// Estimate from this sample instead of integrating under the model.
        #[arg(long)]
        sample: Option<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write Σ; stderr when absent.
        #[arg(long)]
        sigma_out: Option<PathBuf>,
    },
    /// Monte Carlo study of bias, variance and MSE along w1 = w2.
    Bench {
        /// JSON configuration; flags below override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        n: Vec<usize>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        estimators: Vec<EstimatorId>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        shape_correct: bool,
        #[arg(long, env = "EVCOPULA_THREADS")]
        threads: Option<usize>,
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ModelArgs {
    /// symlog, asymlog or independence.
    #[arg(long, default_value = "symlog")]
    model: String,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = 0.0)]
    psi: f64,
    #[arg(long)]
    p: Option<usize>,
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        ModelSpec {
            family: self.model.clone(),
            r: self.r,
            theta: self.theta,
            phi: self.phi,
            psi: self.psi,
            p: self.p,
        }
    }
}

#[derive(Args)]
struct GridArgs {
    /// Spacing of the w1 = w2 line (trivariate only).
    #[arg(long, conflicts_with = "resolution")]
    step: Option<f64>,
    /// Full simplex grid with spacing 1/resolution.
    #[arg(long)]
    resolution: Option<usize>,
}

impl GridArgs {
    fn build(&self, p: usize) -> Result<SimplexGrid> {
        Ok(match (self.step, self.resolution) {
            (_, Some(m)) => SimplexGrid::full(p, m)?,
            (step, None) => {
                if p != 3 {
                    bail!("the w1 = w2 line needs p = 3; use --resolution for p = {p}");
                }
                SimplexGrid::line_w1_eq_w2(step.unwrap_or(evcopula::bench::DEFAULT_STEP))?
            }
        })
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Simulate {
            model,
            n,
            seed,
            stream,
            out,
        } => {
            let model = model.spec().build()?;
            let sample = draw_sample_stream(&model, n, seed, stream)?;
            let mut w = output(&out)?;
            write_sample_csv(&sample, &mut w)?;
            w.flush()?;
        }
        Command::Estimate {
            input,
            grid,
            estimators,
            shape_correct: correct,
            out,
        } => {
            let file = File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let sample = read_sample_csv(BufReader::new(file), &input.display().to_string())?;
            let grid = grid.build(sample.p())?;
            let mut curve = estimate_curve(&sample, &grid, &estimators, None)?;
            if correct {
                curve = shape_correct(&curve, sample.p());
            }
            let mut w = output(&out)?;
            write_estimate_csv(&curve, &mut w)?;
            w.flush()?;
        }
        Command::Asymptotics {
            model,
            sample,
            grid,
            nodes,
            out,
            sigma_out,
        } => {
            let model = model.spec().build()?;
            let (sigma, rows) = match sample {
                Some(path) => {
                    let file = File::open(&path)
                        .with_context(|| format!("opening {}", path.display()))?;
                    let sample = read_sample_csv(BufReader::new(file), "input")?;
                    let grid = grid.build(sample.p())?;
                    let rows = grid
                        .iter()
                        .map(|w| lambda_opt_hat(&sample, w))
                        .collect::<evcopula::Result<Vec<_>>>()?;
                    (sigma_hat(&sample)?, rows)
                }
                None => {
                    let grid = grid.build(model.dim())?;
                    let sigma = sigma_quadrature(&model, nodes)?;
                    let rows = grid
                        .iter()
                        .map(|w| lambda_opt_quadrature(&model, &sigma, w, nodes))
                        .collect::<evcopula::Result<Vec<_>>>()?;
                    (sigma, rows)
                }
            };
            let mut w = output(&out)?;
            write_optimal_weights_csv(&rows, &mut w)?;
            w.flush()?;
            match sigma_out {
                Some(_) => {
                    let mut s = output(&sigma_out)?;
                    write_sigma_csv(&sigma, &mut s)?;
                    s.flush()?;
                }
                None => write_sigma_csv(&sigma, io::stderr().lock())?,
            }
        }
        Command::Bench {
            config,
            model,
            r,
            n,
            reps,
            seed,
            estimators,
            step,
            shape_correct: correct,
            threads,
            out,
        } => {
            let mut cfg = match &config {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    ExperimentConfig::from_json(&text)?
                }
                None => ExperimentConfig::standard_study(ModelSpec::symlog(3.0), 1000, seed),
            };
            if let Some(family) = model {
                cfg.model.family = family;
            }
            if let Some(r) = r {
                cfg.model.r = r;
            }
            if !n.is_empty() {
                cfg.n_list = n;
            }
            if let Some(reps) = reps {
                cfg.replications = reps;
            }
            if !estimators.is_empty() {
                cfg.estimators = estimators;
            }
            if let Some(step) = step {
                cfg.step = step;
            }
            cfg.seed = seed;
            cfg.shape_correct |= correct;
            if threads.is_some() {
                cfg.threads = threads;
            }
            let dir = cfg.output_dir.clone().unwrap_or(out);
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

            let summary = run_experiment(&cfg)?;
            summarize_to_csv(&summary, &dir.join("summary.csv"))?;
            emit_plot_script(&summary, &dir.join("plot.gp"))?;
            eprintln!(
                "wrote {} rows to {}",
                summary.rows.len(),
                dir.join("summary.csv").display()
            );
        }
    }
    Ok(())
}
