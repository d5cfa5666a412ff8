//! Monte Carlo harness: bias, variance and MSE of the estimators along the
//! line w1 = w2 of Δ_3.
//!
//! Replication `r` always draws from stream `r` of the configured seed, and
//! per-replication estimates are stored and then reduced serially in
//! replication order, so results do not depend on the number of worker
//! threads.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::EstimatorId;
use crate::io::fmt17;
use crate::models::ModelSpec;
use crate::sampler::draw_sample_stream;
use crate::simplex::SimplexGrid;

pub const DEFAULT_STEP: f64 = 0.025;
pub const DEFAULT_REPLICATIONS: usize = 1000;
/// Replication count of the full-scale study.
pub const FULL_REPLICATIONS: usize = 10_000;

pub const SUMMARY_HEADER: &str = "model,n,w1,w2,w3,estimator,bias,variance,mse,reps,failures";

impl Serialize for EstimatorId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for EstimatorId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A benchmark run, as read from a JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub n_list: Vec<usize>,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_estimators")]
    pub estimators: Vec<EstimatorId>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Clamp each estimate into [max_j w_j, 1] before aggregation.
    #[serde(default)]
    pub shape_correct: bool,
    /// Worker threads; the global rayon pool when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

fn default_reps() -> usize {
    DEFAULT_REPLICATIONS
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

fn default_estimators() -> Vec<EstimatorId> {
    vec![
        EstimatorId::Ols,
        EstimatorId::Cfg,
        EstimatorId::HallTajvidi,
        EstimatorId::Deheuvels,
    ]
}

impl ExperimentConfig {
    /// The four-estimator comparison at sample sizes 50, 100 and 200.
    pub fn standard_study(model: ModelSpec, replications: usize, seed: u64) -> Self {
        Self {
            model,
            n_list: vec![50, 100, 200],
            replications,
            step: DEFAULT_STEP,
            estimators: default_estimators(),
            seed,
            output_dir: None,
            shape_correct: false,
            threads: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.n_list.is_empty() {
            return Err(Error::Config("n_list is empty".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected".into()));
        }
        let p = self.model.build()?.dim();
        if p != 3 {
            return Err(Error::Config(format!(
                "the w1 = w2 line needs a trivariate model, got p = {p}"
            )));
        }
        let min_n = if self.estimators.contains(&EstimatorId::Ols) {
            p + 2
        } else {
            1
        };
        if let Some(n) = self.n_list.iter().find(|&&n| n < min_n) {
            return Err(Error::Config(format!("sample size {n} below {min_n}")));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        SimplexGrid::line_w1_eq_w2(self.step)?;
        Ok(())
    }
}

/// Aggregates of one (model, n, grid point, estimator) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub model: String,
    pub n: usize,
    pub w: Vec<f64>,
    pub estimator: EstimatorId,
    /// mean(Â) − A(w).
    pub bias: f64,
    /// Sample variance of Â (divisor reps − 1; zero for a single value).
    pub variance: f64,
    /// mean((Â − A(w))²).
    pub mse: f64,
    /// Replications that produced an estimate.
    pub reps: usize,
    /// Replications where the estimator was undefined.
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentSummary {
    pub rows: Vec<SummaryRow>,
}

impl ExperimentSummary {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows of one estimator at one sample size, in grid order.
    pub fn curve(&self, n: usize, estimator: EstimatorId) -> Vec<&SummaryRow> {
        self.rows
            .iter()
            .filter(|r| r.n == n && r.estimator == estimator)
            .collect()
    }
}

/// Bias, variance and MSE of the successful replications of one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellStats {
    pub bias: f64,
    pub variance: f64,
    pub mse: f64,
    pub reps: usize,
    pub failures: usize,
}

/// Reduces per-replication estimates (`None` for failures) in order.
/// With no successful replication the statistics are NaN.
pub fn aggregate_cell(values: &[Option<f64>], truth: f64) -> CellStats {
    let ok: Vec<f64> = values.iter().flatten().copied().collect();
    let failures = values.len() - ok.len();
    let m = ok.len();
    if m == 0 {
        return CellStats {
            bias: f64::NAN,
            variance: f64::NAN,
            mse: f64::NAN,
            reps: 0,
            failures,
        };
    }
    // shifted by the first value so a constant cell reduces exactly
    let shift = ok[0];
    let mean = shift + ok.iter().map(|x| x - shift).sum::<f64>() / m as f64;
    let variance = if m > 1 {
        ok.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (m - 1) as f64
    } else {
        0.0
    };
    let mse = ok.iter().map(|x| (x - truth) * (x - truth)).sum::<f64>() / m as f64;
    CellStats {
        bias: mean - truth,
        variance,
        mse,
        reps: m,
        failures,
    }
}

/// Runs the study described by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    config.validate()?;
    match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| run_inner(config)),
        None => run_inner(config),
    }
}

fn run_inner(config: &ExperimentConfig) -> Result<ExperimentSummary> {
    let model = config.model.build()?;
    let grid = SimplexGrid::line_w1_eq_w2(config.step)?;
    let report = model.check_pointwise_validity(&grid);
    if !report.is_valid() {
        return Err(Error::Config(format!(
            "model {} fails the validity check: {:?}",
            model.tag(),
            report.violations
        )));
    }
    let truth: Vec<f64> = grid
        .iter()
        .map(|w| model.eval_a(w))
        .collect::<Result<_>>()?;

    let mut estimators = config.estimators.clone();
    estimators.sort();
    estimators.dedup();
    let cells = grid.len() * estimators.len();
    let tag = model.tag();

    let mut rows = Vec::with_capacity(config.n_list.len() * cells);
    for &n in &config.n_list {
        let per_rep: Vec<Vec<Option<f64>>> = (0..config.replications)
            .into_par_iter()
            .map(|r| {
                let Ok(sample) = draw_sample_stream(&model, n, config.seed, r as u64) else {
                    return vec![None; cells];
                };
                let mut out = Vec::with_capacity(cells);
                for w in &grid {
                    for &id in &estimators {
                        let v = id.evaluate(&sample, w, Some(&model)).ok().map(|(a, _)| {
                            if config.shape_correct {
                                a.max(w.max_weight()).min(1.0)
                            } else {
                                a
                            }
                        });
                        out.push(v.filter(|a| a.is_finite()));
                    }
                }
                out
            })
            .collect();

        for (g, w) in grid.iter().enumerate() {
            for (e, &id) in estimators.iter().enumerate() {
                let cell = g * estimators.len() + e;
                let values: Vec<Option<f64>> = per_rep.iter().map(|rep| rep[cell]).collect();
                let stats = aggregate_cell(&values, truth[g]);
                rows.push(SummaryRow {
                    model: tag.clone(),
                    n,
                    w: w.weights().to_vec(),
                    estimator: id,
                    bias: stats.bias,
                    variance: stats.variance,
                    mse: stats.mse,
                    reps: stats.reps,
                    failures: stats.failures,
                });
            }
        }
    }
    Ok(ExperimentSummary { rows })
}

/// Writes the summary as CSV in its stored (deterministic) row order.
pub fn write_summary_csv(summary: &ExperimentSummary, mut out: impl Write) -> Result<()> {
    writeln!(out, "{SUMMARY_HEADER}")?;
    for r in &summary.rows {
        let w: Vec<String> = r.w.iter().map(|&x| fmt17(x)).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.model,
            r.n,
            w.join(","),
            r.estimator,
            fmt17(r.bias),
            fmt17(r.variance),
            fmt17(r.mse),
            r.reps,
            r.failures
        )?;
    }
    Ok(())
}

pub fn summarize_to_csv(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_summary_csv(summary, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

fn dash_type(id: EstimatorId) -> u8 {
    match id {
        EstimatorId::Ols => 1,
        EstimatorId::Cfg => 2,
        EstimatorId::Deheuvels => 3,
        EstimatorId::HallTajvidi => 4,
        EstimatorId::Naive => 5,
        EstimatorId::Zwp => 6,
        EstimatorId::Pickands => 7,
        EstimatorId::Oracle => 8,
    }
}

/// A self-contained gnuplot script: one row of panels per (model, n), bias
/// on the left and MSE on the right, one curve per estimator against w1.
pub fn plot_script(summary: &ExperimentSummary, image: &str) -> Result<String> {
    if summary.is_empty() {
        return Err(Error::EmptySummary);
    }
    // (model, n) -> estimator -> rows, in first-seen order
    let mut groups: Vec<(String, usize)> = Vec::new();
    let mut curves: BTreeMap<(usize, EstimatorId), Vec<&SummaryRow>> = BTreeMap::new();
    for r in &summary.rows {
        let key = (r.model.clone(), r.n);
        let g = match groups.iter().position(|k| *k == key) {
            Some(g) => g,
            None => {
                groups.push(key);
                groups.len() - 1
            }
        };
        curves.entry((g, r.estimator)).or_default().push(r);
    }

    let mut s = String::new();
    let _ = writeln!(s, "# bias and MSE along w1 = w2");
    let _ = writeln!(s, "set terminal pngcairo size 1000,{}", 360 * groups.len());
    let _ = writeln!(s, "set output '{image}'");
    for ((g, id), rows) in &curves {
        let _ = writeln!(s, "$g{g}_{} << EOD", id.name().replace('-', "_"));
        for r in rows {
            let _ = writeln!(s, "{} {} {}", fmt17(r.w[0]), fmt17(r.bias), fmt17(r.mse));
        }
        let _ = writeln!(s, "EOD");
    }
    let _ = writeln!(s, "set multiplot layout {},2", groups.len());
    let _ = writeln!(s, "set xlabel 'w1 (= w2)'");
    let _ = writeln!(s, "set key top right");
    for (g, (model, n)) in groups.iter().enumerate() {
        for (col, label) in [(2, "bias"), (3, "MSE")] {
            let _ = writeln!(s, "set title '{label}, {model}, n = {n}' noenhanced");
            let parts: Vec<String> = curves
                .keys()
                .filter(|(gg, _)| *gg == g)
                .map(|(_, id)| {
                    format!(
                        "$g{g}_{} using 1:{col} with lines lw 2 dt {} title '{}'",
                        id.name().replace('-', "_"),
                        dash_type(*id),
                        id.name()
                    )
                })
                .collect();
            let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
        }
    }
    let _ = writeln!(s, "unset multiplot");
    Ok(s)
}

/// Writes [`plot_script`] to `path`; the image is named after the script.
pub fn emit_plot_script(summary: &ExperimentSummary, path: &Path) -> Result<()> {
    let image = path.with_extension("png");
    let image = image
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bench.png".into());
    let script = plot_script(summary, &image)?;
    fs::write(path, script)?;
    Ok(())
}
