//! CSV formats used by the command line tool.
//!
//! Reals are written with 17 significant digits so that every value
//! round-trips exactly.

use std::io::{Read, Write};

use crate::asymptotics::{OptimalWeights, SigmaMatrix};
use crate::error::{Error, Result};
use crate::estimators::EstimateCurve;
use crate::sampler::SampleY;

/// 17 significant digits in scientific notation; `NaN` for undefined values.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn coord_header(prefix: &str, p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("{prefix}{j}")).collect()
}

/// Header `y1,...,yp`, then one row per observation.
pub fn write_sample_csv(sample: &SampleY, mut out: impl Write) -> Result<()> {
    writeln!(out, "{}", coord_header("y", sample.p()).join(","))?;
    for row in sample.rows() {
        let line: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads a sample written by [`write_sample_csv`] (any header is accepted;
/// only the column count matters).
pub fn read_sample_csv(input: impl Read, tag: &str) -> Result<SampleY> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number {f:?}", i + 2)))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    SampleY::from_rows(&rows, tag)
}

/// Columns `w1,...,wp,estimator,value,variance`; variance is empty for
/// estimators that do not report one.
pub fn write_estimate_csv(curve: &EstimateCurve, mut out: impl Write) -> Result<()> {
    let p = curve.grid.dim();
    let mut header = coord_header("w", p);
    header.extend(["estimator", "value", "variance"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for rec in &curve.records {
        let mut fields: Vec<String> = curve.grid.points()[rec.point]
            .weights()
            .iter()
            .map(|&w| fmt17(w))
            .collect();
        fields.push(rec.estimator.name().to_string());
        fields.push(fmt17(rec.value));
        fields.push(rec.variance.map(fmt17).unwrap_or_default());
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Columns `j,k,sigma` for the upper triangle and diagonal of Σ.
pub fn write_sigma_csv(sigma: &SigmaMatrix, mut out: impl Write) -> Result<()> {
    writeln!(out, "j,k,sigma")?;
    for j in 0..sigma.dim() {
        for k in 0..sigma.dim() {
            writeln!(out, "{},{},{}", j + 1, k + 1, fmt17(sigma.get(j, k)))?;
        }
    }
    Ok(())
}

/// Columns `w1,...,wp,lambda1,...,lambdap,var_zeta,var_eta_opt`.
pub fn write_optimal_weights_csv(rows: &[OptimalWeights], mut out: impl Write) -> Result<()> {
    let Some(first) = rows.first() else {
        return Ok(());
    };
    let p = first.at_point.dim();
    let mut header = coord_header("w", p);
    header.extend(coord_header("lambda", p));
    header.extend(["var_zeta", "var_eta_opt"].map(String::from));
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let fields: Vec<String> = row
            .at_point
            .weights()
            .iter()
            .chain(&row.lambda)
            .chain([&row.var_zeta, &row.var_eta_opt])
            .map(|&v| fmt17(v))
            .collect();
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}
