//! Estimators of the Pickands dependence function from a sample with unit
//! exponential margins.
//!
//! Every estimator is built on the variables ξ_i(w) = min_j Y_ij / w_j,
//! which are exponential with rate A(w). The naive estimator averages
//! −log ξ_i(w); the CFG family corrects it at the vertices with weight
//! functions λ_j; the OLS estimator picks those weights by least squares,
//! which makes it the adaptive, variance-optimal member of the family.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::models::DependenceModel;
use crate::sampler::SampleY;
use crate::simplex::{SimplexGrid, SimplexPoint, EULER_GAMMA};

/// Largest condition number accepted for the regression design and for Σ̂.
pub const MAX_CONDITION: f64 = 1e12;

/// Tolerance on Σ_j λ_j(w) = 1 for the ZWP form.
pub const WEIGHT_SUM_TOL: f64 = 1e-10;

/// The values ξ_1(w), …, ξ_n(w).
#[derive(Debug, Clone, PartialEq)]
pub struct XiVector {
    values: Vec<f64>,
    at: SimplexPoint,
}

impl XiVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_point(&self) -> &SimplexPoint {
        &self.at
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// −log ξ_i(w), the Gumbel-distributed variables the log-scale
    /// estimators average.
    pub fn neg_log(&self) -> Vec<f64> {
        self.values.iter().map(|x| -x.ln()).collect()
    }
}

fn check_sample_dim(sample: &SampleY, w: &SimplexPoint) -> Result<()> {
    if sample.p() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: sample.p(),
            got: w.dim(),
        });
    }
    Ok(())
}

/// ξ_i(w) = min over {j : w_j > 0} of Y_ij / w_j.
pub fn xi(sample: &SampleY, w: &SimplexPoint) -> Result<XiVector> {
    check_sample_dim(sample, w)?;
    let weights = w.weights();
    let values = sample
        .rows()
        .map(|row| {
            row.iter()
                .zip(weights)
                .filter(|(_, &wj)| wj > 0.0)
                .map(|(&y, &wj)| y / wj)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    Ok(XiVector {
        values,
        at: w.clone(),
    })
}

/// log Â_n(w) = −(1/n) Σ log ξ_i(w) − γ.
pub fn naive_log_a(xi: &XiVector) -> f64 {
    -mean(xi.values.iter().map(|x| x.ln())) - EULER_GAMMA
}

/// The naive estimator Â_n(w); it does not satisfy the vertex constraints.
pub fn naive(sample: &SampleY, w: &SimplexPoint) -> Result<f64> {
    Ok(naive_log_a(&xi(sample, w)?).exp())
}

/// log Â_n(e_j) for every j, i.e. −mean(log Y_j) − γ.
pub fn vertex_log_naive(sample: &SampleY) -> Vec<f64> {
    (0..sample.p())
        .map(|j| -mean(sample.column(j).map(f64::ln)) - EULER_GAMMA)
        .collect()
}

fn mean(it: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = it.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    sum / count as f64
}

/// User-supplied weight functions w ↦ (λ_1(w), …, λ_p(w)).
pub type WeightFn = Arc<dyn Fn(&SimplexPoint) -> Vec<f64> + Send + Sync>;

/// Choice of weight functions λ_j for the CFG estimator.
#[derive(Clone)]
pub enum WeightScheme {
    /// λ_j(w) = w_j.
    Pragmatic,
    /// Fixed continuous functions with λ_j(e_k) = δ_jk.
    Fixed(WeightFn),
    /// Slopes of the least-squares fit at w (the adaptive choice).
    Estimated,
}

impl fmt::Debug for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Pragmatic => f.write_str("Pragmatic"),
            WeightScheme::Fixed(_) => f.write_str("Fixed(..)"),
            WeightScheme::Estimated => f.write_str("Estimated"),
        }
    }
}

impl WeightScheme {
    pub fn fixed(f: impl Fn(&SimplexPoint) -> Vec<f64> + Send + Sync + 'static) -> Self {
        WeightScheme::Fixed(Arc::new(f))
    }

    /// λ(w) for this scheme; `Estimated` needs the sample.
    pub fn weights(&self, sample: &SampleY, w: &SimplexPoint) -> Result<Vec<f64>> {
        let lambda = match self {
            WeightScheme::Pragmatic => w.weights().to_vec(),
            WeightScheme::Fixed(f) => f(w),
            WeightScheme::Estimated => ols_fit(sample, w)?.slopes().to_vec(),
        };
        if lambda.len() != w.dim() {
            return Err(Error::DimensionMismatch {
                expected: w.dim(),
                got: lambda.len(),
            });
        }
        Ok(lambda)
    }

    /// Checks λ_j(e_k) = δ_jk for deterministic schemes. The estimated
    /// scheme satisfies it by the perfect fit at vertices.
    pub fn check_vertices(&self, p: usize) -> Result<()> {
        let WeightScheme::Fixed(f) = self else {
            return Ok(());
        };
        for k in 0..p {
            let lambda = f(&SimplexPoint::vertex(p, k));
            let ok = lambda.len() == p
                && lambda
                    .iter()
                    .enumerate()
                    .all(|(j, &l)| l == if j == k { 1.0 } else { 0.0 });
            if !ok {
                return Err(Error::WeightConstraintViolated(format!(
                    "lambda(e_{k}) = {lambda:?} is not the unit vector"
                )));
            }
        }
        Ok(())
    }
}

/// The CFG estimator,
/// log Â^CFG(w) = log Â_n(w) − Σ_j λ_j(w) log Â_n(e_j).
pub fn cfg(sample: &SampleY, w: &SimplexPoint, scheme: &WeightScheme) -> Result<f64> {
    check_sample_dim(sample, w)?;
    scheme.check_vertices(sample.p())?;
    let lambda = scheme.weights(sample, w)?;
    let log_naive = naive_log_a(&xi(sample, w)?);
    let vertex = vertex_log_naive(sample);
    let correction: f64 = lambda.iter().zip(&vertex).map(|(l, v)| l * v).sum();
    Ok((log_naive - correction).exp())
}

/// The original ZWP form, evaluated through the closed form of its integrals
/// in terms of Z_ij(w). Requires λ_j(w) ≥ 0 and Σ_j λ_j(w) = 1; under those
/// constraints it coincides with [`cfg`].
pub fn zwp(sample: &SampleY, w: &SimplexPoint, scheme: &WeightScheme) -> Result<f64> {
    check_sample_dim(sample, w)?;
    let lambda = scheme.weights(sample, w)?;
    let total: f64 = lambda.iter().sum();
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightConstraintViolated(format!(
            "weights sum to {total}"
        )));
    }
    if let Some(neg) = lambda.iter().find(|l| **l < 0.0) {
        return Err(Error::WeightConstraintViolated(format!(
            "negative weight {neg}"
        )));
    }
    let weights = w.weights();
    let mut log_a = 0.0;
    for (j, &lj) in lambda.iter().enumerate() {
        if lj == 0.0 {
            continue;
        }
        let integral = mean(sample.rows().map(|row| zwp_integral(row, weights, j)));
        log_a += lj * integral;
    }
    Ok(log_a.exp())
}

/// ∫_0^{1−w_j} (1{Z_ij ≤ z} − z) / (z(1 − z)) dz for one observation, solved
/// in closed form:
/// log[1 − (1−w_j) ∧ Z] + log(1 − w_j) − log[(1−w_j) ∧ Z].
fn zwp_integral(row: &[f64], w: &[f64], j: usize) -> f64 {
    let wj = w[j];
    if wj >= 1.0 {
        // empty integration range
        return 0.0;
    }
    let others = row
        .iter()
        .zip(w)
        .enumerate()
        .filter(|&(k, (_, &wk))| k != j && wk > 0.0)
        .map(|(_, (&y, &wk))| y / wk)
        .fold(f64::INFINITY, f64::min);
    let scaled = row[j] / (1.0 - wj);
    // Z = others / (scaled + others), 1 − Z = scaled / (scaled + others)
    let denom = scaled + others;
    let z = others / denom;
    let one_minus_z = scaled / denom;
    if z <= 1.0 - wj {
        one_minus_z.ln() + (1.0 - wj).ln() - z.ln()
    } else {
        wj.ln() + (1.0 - wj).ln() - (1.0 - wj).ln()
    }
}

/// Result of the least-squares regression of −log ξ_i(w) − γ on an
/// intercept and the vertex variables −log Y_ij − γ.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// (β̂_0, β̂_1, …, β̂_p).
    pub beta: Vec<f64>,
    /// Residual variance with divisor n − p − 1.
    pub sigma2: f64,
    pub residuals: Vec<f64>,
    pub at_point: SimplexPoint,
}

impl OlsFit {
    pub fn intercept(&self) -> f64 {
        self.beta[0]
    }

    /// β̂_1, …, β̂_p: the estimated optimal CFG weights.
    pub fn slopes(&self) -> &[f64] {
        &self.beta[1..]
    }
}

/// Design matrix rows (1, −log Y_i1 − γ, …, −log Y_ip − γ).
pub(crate) fn design_matrix(sample: &SampleY) -> DMatrix<f64> {
    let (n, p) = (sample.n(), sample.p());
    DMatrix::from_fn(n, p + 1, |i, k| {
        if k == 0 {
            1.0
        } else {
            -sample.get(i, k - 1).ln() - EULER_GAMMA
        }
    })
}

/// Condition number of a symmetric matrix (∞ if not positive definite).
pub(crate) fn spd_condition(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min > 0.0) {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Least-squares fit at w via the normal equations and a Cholesky
/// factorization of XᵀX.
pub fn ols_fit(sample: &SampleY, w: &SimplexPoint) -> Result<OlsFit> {
    check_sample_dim(sample, w)?;
    let (n, p) = (sample.n(), sample.p());
    if n < p + 2 {
        return Err(Error::TooFewObservations {
            needed: p + 2,
            got: n,
        });
    }
    let x = design_matrix(sample);
    let xtx = x.transpose() * &x;
    let cond = spd_condition(&xtx);
    if !(cond <= MAX_CONDITION) {
        return Err(Error::SingularDesign(cond));
    }

    if let Some(k) = w.vertex_index() {
        // The response is regressor k itself: the fit is exact.
        let mut beta = vec![0.0; p + 1];
        beta[k + 1] = 1.0;
        return Ok(OlsFit {
            beta,
            sigma2: 0.0,
            residuals: vec![0.0; n],
            at_point: w.clone(),
        });
    }

    let response = DVector::from_iterator(
        n,
        xi(sample, w)?.values.iter().map(|v| -v.ln() - EULER_GAMMA),
    );
    let xty = x.transpose() * &response;
    let chol = xtx
        .cholesky()
        .ok_or(Error::SingularDesign(f64::INFINITY))?;
    let beta = chol.solve(&xty);
    let residuals = &response - &x * &beta;
    let sigma2 = residuals.norm_squared() / (n - p - 1) as f64;
    Ok(OlsFit {
        beta: beta.iter().copied().collect(),
        sigma2,
        residuals: residuals.iter().copied().collect(),
        at_point: w.clone(),
    })
}

/// Â^OLS(w) = exp(β̂_0) together with σ̂²_OLS(w), the estimated asymptotic
/// variance of √n·log Â^OLS(w).
pub fn ols_estimate(sample: &SampleY, w: &SimplexPoint) -> Result<(f64, f64)> {
    let fit = ols_fit(sample, w)?;
    Ok((fit.intercept().exp(), fit.sigma2))
}

/// Pickands estimator, 1/Â^P(w) = mean of ξ_i(w).
pub fn pickands(sample: &SampleY, w: &SimplexPoint) -> Result<f64> {
    let xi = xi(sample, w)?;
    Ok(1.0 / mean(xi.values.iter().copied()))
}

/// Deheuvels-type estimator with a linear endpoint correction:
/// 1/Â^D(w) = mean ξ_i(w) − Σ_j w_j (mean Y_j − 1).
pub fn deheuvels(sample: &SampleY, w: &SimplexPoint) -> Result<f64> {
    let xi = xi(sample, w)?;
    let correction: f64 = w
        .weights()
        .iter()
        .enumerate()
        .map(|(j, &wj)| wj * (mean(sample.column(j)) - 1.0))
        .sum();
    let recip = mean(xi.values.iter().copied()) - correction;
    if !(recip > 0.0) {
        return Err(Error::NonPositiveEstimate(recip));
    }
    Ok(1.0 / recip)
}

/// Hall–Tajvidi-type estimator: the Pickands estimator applied after
/// rescaling every margin to sample mean one.
pub fn hall_tajvidi(sample: &SampleY, w: &SimplexPoint) -> Result<f64> {
    check_sample_dim(sample, w)?;
    let means: Vec<f64> = (0..sample.p()).map(|j| mean(sample.column(j))).collect();
    let weights = w.weights();
    let total: f64 = sample
        .rows()
        .map(|row| {
            row.iter()
                .zip(weights)
                .zip(&means)
                .filter(|((_, &wj), _)| wj > 0.0)
                .map(|((&y, &wj), &m)| y / (wj * m))
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(sample.n() as f64 / total)
}

/// Identifiers of the estimators available to curves and benchmarks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorId {
    Naive,
    /// CFG with λ_j(w) = w_j.
    Cfg,
    /// ZWP form with λ_j(w) = w_j.
    Zwp,
    Ols,
    Pickands,
    Deheuvels,
    HallTajvidi,
    /// Returns the true A(w); for checking the harness.
    Oracle,
}

impl EstimatorId {
    pub const ALL: [EstimatorId; 8] = [
        EstimatorId::Naive,
        EstimatorId::Cfg,
        EstimatorId::Zwp,
        EstimatorId::Ols,
        EstimatorId::Pickands,
        EstimatorId::Deheuvels,
        EstimatorId::HallTajvidi,
        EstimatorId::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorId::Naive => "naive",
            EstimatorId::Cfg => "cfg",
            EstimatorId::Zwp => "zwp",
            EstimatorId::Ols => "ols",
            EstimatorId::Pickands => "pickands",
            EstimatorId::Deheuvels => "deheuvels",
            EstimatorId::HallTajvidi => "hall-tajvidi",
            EstimatorId::Oracle => "oracle",
        }
    }

    /// Evaluates the estimator at w. OLS also returns its variance estimate.
    /// `Oracle` needs the true model.
    pub fn evaluate(
        self,
        sample: &SampleY,
        w: &SimplexPoint,
        model: Option<&DependenceModel>,
    ) -> Result<(f64, Option<f64>)> {
        let plain = |v: Result<f64>| v.map(|x| (x, None));
        match self {
            EstimatorId::Naive => plain(naive(sample, w)),
            EstimatorId::Cfg => plain(cfg(sample, w, &WeightScheme::Pragmatic)),
            EstimatorId::Zwp => plain(zwp(sample, w, &WeightScheme::Pragmatic)),
            EstimatorId::Ols => ols_estimate(sample, w).map(|(a, v)| (a, Some(v))),
            EstimatorId::Pickands => plain(pickands(sample, w)),
            EstimatorId::Deheuvels => plain(deheuvels(sample, w)),
            EstimatorId::HallTajvidi => plain(hall_tajvidi(sample, w)),
            EstimatorId::Oracle => {
                let model = model.ok_or_else(|| {
                    Error::Config("the oracle estimator needs the true model".into())
                })?;
                plain(model.eval_a(w))
            }
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let id = match key.as_str() {
            "naive" => EstimatorId::Naive,
            "cfg" | "cfg-pragmatic" => EstimatorId::Cfg,
            "zwp" => EstimatorId::Zwp,
            "ols" => EstimatorId::Ols,
            "pickands" | "p" => EstimatorId::Pickands,
            "deheuvels" | "d" => EstimatorId::Deheuvels,
            "hall-tajvidi" | "ht" => EstimatorId::HallTajvidi,
            "oracle" => EstimatorId::Oracle,
            _ => return Err(Error::Config(format!("unknown estimator {s:?}"))),
        };
        Ok(id)
    }
}

/// One estimate at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRecord {
    /// Index into the curve's grid.
    pub point: usize,
    pub estimator: EstimatorId,
    /// Â(w), or NaN when the estimator is undefined for this sample.
    pub value: f64,
    pub variance: Option<f64>,
}

/// Estimates over a grid, ordered by grid point then by estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateCurve {
    pub grid: SimplexGrid,
    pub records: Vec<EstimateRecord>,
    pub shape_corrected: bool,
}

impl EstimateCurve {
    /// Values of one estimator in grid order.
    pub fn values(&self, estimator: EstimatorId) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.estimator == estimator)
            .map(|r| r.value)
            .collect()
    }
}

/// Evaluates each estimator at each grid point. Estimators that are
/// undefined for this sample (non-positive Deheuvels reciprocal, singular
/// design) produce NaN records; other errors abort.
pub fn estimate_curve(
    sample: &SampleY,
    grid: &SimplexGrid,
    estimators: &[EstimatorId],
    model: Option<&DependenceModel>,
) -> Result<EstimateCurve> {
    let mut records = Vec::with_capacity(grid.len() * estimators.len());
    for (point, w) in grid.iter().enumerate() {
        for &estimator in estimators {
            let (value, variance) = match estimator.evaluate(sample, w, model) {
                Ok(v) => v,
                Err(Error::NonPositiveEstimate(_) | Error::SingularDesign(_)) => (f64::NAN, None),
                Err(e) => return Err(e),
            };
            records.push(EstimateRecord {
                point,
                estimator,
                value,
                variance,
            });
        }
    }
    Ok(EstimateCurve {
        grid: grid.clone(),
        records,
        shape_corrected: false,
    })
}

/// Imposes the bounds max_j w_j ≤ Â(w) ≤ 1 on every value. For p = 2 the
/// clamped values of each estimator are further replaced by their greatest
/// convex minorant over the grid. NaN values pass through.
pub fn shape_correct(curve: &EstimateCurve, p: usize) -> EstimateCurve {
    let points = curve.grid.points();
    let mut records: Vec<EstimateRecord> = curve
        .records
        .iter()
        .map(|r| {
            let lower = points[r.point].max_weight();
            let value = if r.value.is_nan() {
                r.value
            } else {
                r.value.max(lower).min(1.0)
            };
            EstimateRecord { value, ..*r }
        })
        .collect();

    if p == 2 {
        let mut ids: Vec<EstimatorId> = records.iter().map(|r| r.estimator).collect();
        ids.sort();
        ids.dedup();
        for id in ids {
            let idx: Vec<usize> = (0..records.len())
                .filter(|&i| records[i].estimator == id && !records[i].value.is_nan())
                .collect();
            let xy: Vec<(f64, f64)> = idx
                .iter()
                .map(|&i| (points[records[i].point].weights()[0], records[i].value))
                .collect();
            let minorant = convex_minorant(&xy);
            for (&i, v) in idx.iter().zip(minorant) {
                records[i].value = v;
            }
        }
    }
    EstimateCurve {
        grid: curve.grid.clone(),
        records,
        shape_corrected: true,
    }
}

/// Greatest convex minorant of the points `(x_i, y_i)`, evaluated at each
/// x_i (input order preserved).
pub fn convex_minorant(points: &[(f64, f64)]) -> Vec<f64> {
    let mut sorted: Vec<(f64, f64)> = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    sorted.dedup_by(|b, a| a.0 == b.0);

    // lower hull, monotone chain
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
    for &pt in &sorted {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (pt.1 - o.1) - (a.1 - o.1) * (pt.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    points
        .iter()
        .map(|&(x, _)| {
            let k = hull.partition_point(|h| h.0 < x);
            if k < hull.len() && hull[k].0 == x {
                return hull[k].1;
            }
            let (a, b) = (hull[k - 1], hull[k]);
            a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
        })
        .collect()
}
