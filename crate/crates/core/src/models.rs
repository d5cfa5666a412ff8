//! Parametric Pickands dependence functions of logistic type, and tabulated
//! functions built from estimator output.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{GridDescriptor, SimplexGrid, SimplexPoint, SIMPLEX_TOL};

/// Tolerance used by the midpoint convexity check.
pub const CONVEXITY_TOL: f64 = 1e-10;

/// The family a [`DependenceModel`] belongs to.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Independence,
    /// A(w) = (Σ w_j^r)^{1/r}.
    SymmetricLogistic { r: f64 },
    /// Trivariate asymmetric logistic model: three pairwise terms with
    /// weights (θ, φ) on the cyclic pairs {1,2}, {2,3}, {3,1}, a joint term
    /// with weight ψ, and the remaining mass on the independent part.
    AsymmetricLogistic { r: f64, theta: f64, phi: f64, psi: f64 },
    /// Values on a grid, interpolated linearly in barycentric coordinates.
    Tabulated(Tabulation),
}

/// A Pickands dependence function on Δ_p.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceModel {
    family: Family,
    p: usize,
}

impl DependenceModel {
    pub fn independence(p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::ParameterError(format!("dimension {p} < 2")));
        }
        Ok(Self {
            family: Family::Independence,
            p,
        })
    }

    pub fn symmetric_logistic(r: f64, p: usize) -> Result<Self> {
        if p < 2 {
            return Err(Error::ParameterError(format!("dimension {p} < 2")));
        }
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::ParameterError(format!(
                "logistic parameter r = {r} must be finite and >= 1"
            )));
        }
        Ok(Self {
            family: Family::SymmetricLogistic { r },
            p,
        })
    }

    pub fn asymmetric_logistic(r: f64, theta: f64, phi: f64, psi: f64) -> Result<Self> {
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::ParameterError(format!(
                "logistic parameter r = {r} must be finite and >= 1"
            )));
        }
        for (name, v) in [("theta", theta), ("phi", phi), ("psi", psi)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ParameterError(format!("{name} = {v} not in [0, 1]")));
            }
        }
        if theta + phi + psi > 1.0 + 1e-12 {
            return Err(Error::ParameterError(format!(
                "theta + phi + psi = {} exceeds 1",
                theta + phi + psi
            )));
        }
        Ok(Self {
            family: Family::AsymmetricLogistic {
                r,
                theta,
                phi,
                psi,
            },
            p: 3,
        })
    }

    /// A model whose A values are given on `grid`.
    pub fn tabulated(grid: SimplexGrid, values: Vec<f64>) -> Result<Self> {
        let p = grid.dim();
        Ok(Self {
            family: Family::Tabulated(Tabulation::new(grid, values)?),
            p,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// Short identifier without commas, used as the `model` CSV column.
    pub fn tag(&self) -> String {
        match &self.family {
            Family::Independence => format!("indep:p={}", self.p),
            Family::SymmetricLogistic { r } => format!("symlog:r={r};p={}", self.p),
            Family::AsymmetricLogistic {
                r,
                theta,
                phi,
                psi,
            } => format!("asymlog:r={r};theta={theta};phi={phi};psi={psi}"),
            Family::Tabulated(t) => format!("tabulated:points={}", t.grid.len()),
        }
    }

    /// The Pickands dependence function A(w).
    pub fn eval_a(&self, w: &SimplexPoint) -> Result<f64> {
        w.check_dim(self.p)?;
        let w = w.weights();
        Ok(match &self.family {
            Family::Independence => 1.0,
            Family::SymmetricLogistic { r } => lp_norm(w, *r),
            Family::AsymmetricLogistic {
                r,
                theta,
                phi,
                psi,
            } => asymlog_ell(w, *r, *theta, *phi, *psi),
            Family::Tabulated(t) => t.eval(w)?,
        })
    }

    /// Stable tail dependence function ℓ(y) = |y|·A(y/|y|).
    pub fn eval_ell(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: y.len(),
            });
        }
        if let Some(&bad) = y.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::DomainError(format!("negative argument {bad} to ell")));
        }
        let norm: f64 = y.iter().sum();
        if norm <= 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(match &self.family {
            Family::Independence => norm,
            Family::SymmetricLogistic { r } => lp_norm(y, *r),
            Family::AsymmetricLogistic {
                r,
                theta,
                phi,
                psi,
            } => asymlog_ell(y, *r, *theta, *phi, *psi),
            Family::Tabulated(t) => {
                let w: Vec<f64> = y.iter().map(|v| v / norm).collect();
                norm * t.eval(&w)?
            }
        })
    }

    /// Checks the bounds max(w) ≤ A(w) ≤ 1 at every grid point and midpoint
    /// convexity over all grid pairs. A diagnostic, not a certificate.
    pub fn check_pointwise_validity(&self, grid: &SimplexGrid) -> ValidityReport {
        let mut violations = Vec::new();
        let mut values = Vec::with_capacity(grid.len());
        for (i, w) in grid.iter().enumerate() {
            let a = match self.eval_a(w) {
                Ok(a) => a,
                Err(e) => {
                    violations.push(Violation::Unevaluable {
                        point: i,
                        reason: e.to_string(),
                    });
                    values.push(None);
                    continue;
                }
            };
            let lower = w.max_weight();
            if a < lower - SIMPLEX_TOL {
                violations.push(Violation::LowerBound {
                    point: i,
                    value: a,
                    bound: lower,
                });
            }
            if a > 1.0 + SIMPLEX_TOL {
                violations.push(Violation::UpperBound { point: i, value: a });
            }
            values.push(Some(a));
        }
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                let (Some(ai), Some(aj)) = (values[i], values[j]) else {
                    continue;
                };
                let mid: Vec<f64> = grid.points()[i]
                    .weights()
                    .iter()
                    .zip(grid.points()[j].weights())
                    .map(|(a, b)| 0.5 * (a + b))
                    .collect();
                let Ok(mid) = SimplexPoint::new(&mid) else {
                    continue;
                };
                // Tabulations may not cover the midpoint.
                let Ok(am) = self.eval_a(&mid) else {
                    continue;
                };
                let chord = 0.5 * (ai + aj);
                if am > chord + CONVEXITY_TOL {
                    violations.push(Violation::Convexity {
                        points: (i, j),
                        midpoint_value: am,
                        chord_value: chord,
                    });
                }
            }
        }
        ValidityReport { violations }
    }
}

impl fmt::Display for DependenceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

/// ‖y‖_r computed with max-scaling so that large r does not overflow.
fn lp_norm(y: &[f64], r: f64) -> f64 {
    let m = y.iter().copied().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    if r == 1.0 {
        return y.iter().sum();
    }
    m * y.iter().map(|v| (v / m).powf(r)).sum::<f64>().powf(1.0 / r)
}

/// ℓ of the trivariate asymmetric logistic model; on the simplex this is A.
fn asymlog_ell(y: &[f64], r: f64, theta: f64, phi: f64, psi: f64) -> f64 {
    let pair = |a: f64, b: f64| lp_norm(&[theta * a, phi * b], r);
    pair(y[0], y[1])
        + pair(y[1], y[2])
        + pair(y[2], y[0])
        + psi * lp_norm(y, r)
        + (1.0 - theta - phi - psi) * (y[0] + y[1] + y[2])
}

/// One finding of [`DependenceModel::check_pointwise_validity`]. Indices refer
/// to grid positions.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LowerBound { point: usize, value: f64, bound: f64 },
    UpperBound { point: usize, value: f64 },
    Convexity {
        points: (usize, usize),
        midpoint_value: f64,
        chord_value: f64,
    },
    Unevaluable { point: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tabulated values of A on a grid.
///
/// Off-grid evaluation is supported for line grids (piecewise linear in t
/// between the first and last point) and full grids (Kuhn triangulation of
/// the cumulative coordinates, exact on every simplex of the grid). Custom
/// grids answer only at their own points.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulation {
    grid: SimplexGrid,
    values: Vec<f64>,
}

impl Tabulation {
    pub fn new(grid: SimplexGrid, values: Vec<f64>) -> Result<Self> {
        if grid.is_empty() || grid.len() != values.len() {
            return Err(Error::ParameterError(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SimplexGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval(&self, w: &[f64]) -> Result<f64> {
        if let Some(i) = self
            .grid
            .iter()
            .position(|p| p.weights().iter().zip(w).all(|(a, b)| (a - b).abs() <= SIMPLEX_TOL))
        {
            return Ok(self.values[i]);
        }
        let outside = || Error::OutsideTabulation(w.to_vec());
        match self.grid.descriptor() {
            GridDescriptor::Line { .. } => {
                if (w[0] - w[1]).abs() > SIMPLEX_TOL {
                    return Err(outside());
                }
                let t = w[0];
                let ts: Vec<f64> = self.grid.iter().map(|p| p.weights()[0]).collect();
                let k = ts.partition_point(|&s| s <= t);
                if k == 0 || k == ts.len() {
                    return Err(outside());
                }
                let (t0, t1) = (ts[k - 1], ts[k]);
                let f = (t - t0) / (t1 - t0);
                Ok((1.0 - f) * self.values[k - 1] + f * self.values[k])
            }
            GridDescriptor::Full { p, resolution } => {
                Ok(self.kuhn_interpolate(w, p, resolution))
            }
            GridDescriptor::Custom => Err(outside()),
        }
    }

    fn kuhn_interpolate(&self, w: &[f64], p: usize, m: usize) -> f64 {
        let index: HashMap<Vec<usize>, usize> = self
            .grid
            .iter()
            .enumerate()
            .map(|(i, pt)| {
                let counts = pt
                    .weights()
                    .iter()
                    .map(|x| (x * m as f64).round() as usize)
                    .collect();
                (counts, i)
            })
            .collect();
        // cumulative coordinates c_k = m·(w_1 + … + w_{k+1}), k < p − 1
        let mut cum = Vec::with_capacity(p - 1);
        let mut acc = 0.0;
        for x in &w[..p - 1] {
            acc += x * m as f64;
            cum.push(acc.clamp(0.0, m as f64));
        }
        let base: Vec<usize> = cum
            .iter()
            .map(|c| (c.floor() as usize).min(m))
            .collect();
        let frac: Vec<f64> = cum.iter().zip(&base).map(|(c, b)| c - *b as f64).collect();
        let mut order: Vec<usize> = (0..p - 1).collect();
        // descending fraction; ties broken toward later coordinates so that
        // cumulative order is preserved
        order.sort_by(|&a, &b| frac[b].total_cmp(&frac[a]).then(b.cmp(&a)));

        let counts_of = |c: &[usize]| -> Vec<usize> {
            let mut out = Vec::with_capacity(p);
            let mut prev = 0usize;
            for &ck in c {
                out.push(ck.saturating_sub(prev));
                prev = ck;
            }
            out.push(m.saturating_sub(prev));
            out
        };

        let mut vertex = base.clone();
        let mut total = 0.0;
        let mut prev_frac = 1.0;
        for step in 0..=order.len() {
            let next_frac = if step < order.len() { frac[order[step]] } else { 0.0 };
            let weight = prev_frac - next_frac;
            if weight > 0.0 {
                let key = counts_of(&vertex);
                let v = index.get(&key).map_or(f64::NAN, |&i| self.values[i]);
                total += weight * v;
            }
            if step < order.len() {
                vertex[order[step]] += 1;
                prev_frac = next_frac;
            }
        }
        total
    }
}

/// Model description as it appears in benchmark configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: String,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub psi: f64,
    /// Dimension for the symmetric families; the asymmetric model is always
    /// trivariate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
}

fn default_r() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn symlog(r: f64) -> Self {
        Self {
            family: "symlog".into(),
            r,
            theta: 0.0,
            phi: 0.0,
            psi: 0.0,
            p: None,
        }
    }

    pub fn asymlog(r: f64, theta: f64, phi: f64, psi: f64) -> Self {
        Self {
            family: "asymlog".into(),
            r,
            theta,
            phi,
            psi,
            p: None,
        }
    }

    pub fn build(&self) -> Result<DependenceModel> {
        let p = self.p.unwrap_or(3);
        match self.family.as_str() {
            "symlog" => DependenceModel::symmetric_logistic(self.r, p),
            "asymlog" => {
                if p != 3 {
                    return Err(Error::ParameterError(
                        "the asymmetric logistic model is trivariate".into(),
                    ));
                }
                DependenceModel::asymmetric_logistic(self.r, self.theta, self.phi, self.psi)
            }
            "independence" | "indep" => DependenceModel::independence(p),
            other => Err(Error::Config(format!("unknown model family {other:?}"))),
        }
    }
}
