//! Estimable quantities behind the asymptotic variance of the CFG family:
//! the covariance function of ζ, the matrix Σ, the variance-optimal weights
//! λ^opt(w) = Σ^{-1} E[ζ(e) ζ(w)] and the minimal variance var η_opt(w).
//!
//! Two independent routes are provided: sample covariances of the pairs
//! (−log ξ_i(v), −log ξ_i(w)), and a quadrature of the double-integral
//! representation of the same covariance in terms of the model's ℓ.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{spd_condition, xi, MAX_CONDITION};
use crate::models::DependenceModel;
use crate::sampler::SampleY;
use crate::simplex::SimplexPoint;

/// Truncation of the quadrature domain in each of s and t.
pub const QUADRATURE_LOWER: f64 = 1e-6;
pub const QUADRATURE_UPPER: f64 = 40.0;
/// Largest change tolerated when the node count is doubled.
pub const QUADRATURE_TOL: f64 = 1e-4;
pub const MIN_QUADRATURE_NODES: usize = 64;

/// The p×p covariance matrix of (−log ξ(e_1), …, −log ξ(e_p)).
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaMatrix {
    matrix: DMatrix<f64>,
}

impl SigmaMatrix {
    fn from_fn(p: usize, mut f: impl FnMut(usize, usize) -> Result<f64>) -> Result<Self> {
        let mut matrix = DMatrix::zeros(p, p);
        for j in 0..p {
            for k in j..p {
                let v = f(j, k)?;
                matrix[(j, k)] = v;
                matrix[(k, j)] = v;
            }
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.matrix[(j, k)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    }

    /// λ_max / λ_min, infinite when not positive definite.
    pub fn condition_number(&self) -> f64 {
        spd_condition(&self.matrix)
    }

    /// Solves Σ x = rhs, refusing near-singular matrices.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let cond = self.condition_number();
        if !(cond <= MAX_CONDITION) {
            return Err(Error::SingularSigma(cond));
        }
        let chol = self
            .matrix
            .clone()
            .cholesky()
            .ok_or(Error::SingularSigma(f64::INFINITY))?;
        Ok(chol
            .solve(&DVector::from_column_slice(rhs))
            .iter()
            .copied()
            .collect())
    }
}

/// Where a set of optimal weights came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    SampleEstimated,
    Quadrature,
}

/// λ^opt(w) together with the corresponding minimal variance.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalWeights {
    pub lambda: Vec<f64>,
    /// var η_opt(w), floored at zero.
    pub var_eta_opt: f64,
    /// var ζ(w).
    pub var_zeta: f64,
    pub at_point: SimplexPoint,
    pub provenance: Provenance,
}

fn neg_log_xi(sample: &SampleY, w: &SimplexPoint) -> Result<Vec<f64>> {
    Ok(xi(sample, w)?.neg_log())
}

fn neg_log_column(sample: &SampleY, j: usize) -> Vec<f64> {
    sample.column(j).map(|y| -y.ln()).collect()
}

/// Unbiased sample covariance (divisor n − 1).
fn covariance(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (n - 1.0)
}

fn require_n(sample: &SampleY, needed: usize) -> Result<()> {
    if sample.n() < needed {
        return Err(Error::TooFewObservations {
            needed,
            got: sample.n(),
        });
    }
    Ok(())
}

/// Sample covariance of −log ξ_i(v) and −log ξ_i(w), an estimate of
/// cov(ζ(v), ζ(w)).
pub fn sample_cov_zeta(sample: &SampleY, v: &SimplexPoint, w: &SimplexPoint) -> Result<f64> {
    require_n(sample, 2)?;
    let a = neg_log_xi(sample, v)?;
    let b = neg_log_xi(sample, w)?;
    Ok(covariance(&a, &b))
}

/// Σ̂ with entries sample_cov_zeta(e_j, e_k).
pub fn sigma_hat(sample: &SampleY) -> Result<SigmaMatrix> {
    let p = sample.p();
    // rank deficiency for n <= p is caught by the condition check downstream
    require_n(sample, 2)?;
    let cols: Vec<Vec<f64>> = (0..p).map(|j| neg_log_column(sample, j)).collect();
    SigmaMatrix::from_fn(p, |j, k| Ok(covariance(&cols[j], &cols[k])))
}

/// Solves Σ̂ λ = ĉ(w), with ĉ_j(w) = sample_cov_zeta(e_j, w).
pub fn lambda_opt_hat(sample: &SampleY, w: &SimplexPoint) -> Result<OptimalWeights> {
    let p = sample.p();
    let sigma = sigma_hat(sample)?;
    let target = neg_log_xi(sample, w)?;
    let c: Vec<f64> = (0..p)
        .map(|j| covariance(&neg_log_column(sample, j), &target))
        .collect();
    let lambda = sigma.solve(&c)?;
    let var_zeta = covariance(&target, &target);
    let explained: f64 = c.iter().zip(&lambda).map(|(a, b)| a * b).sum();
    Ok(OptimalWeights {
        lambda,
        var_eta_opt: (var_zeta - explained).max(0.0),
        var_zeta,
        at_point: w.clone(),
        provenance: Provenance::SampleEstimated,
    })
}

/// var̂ ζ(w) − ĉ(w)ᵀ Σ̂^{-1} ĉ(w), floored at zero.
pub fn var_eta_opt_hat(sample: &SampleY, w: &SimplexPoint) -> Result<f64> {
    Ok(lambda_opt_hat(sample, w)?.var_eta_opt)
}

/// Sample variance of −log ξ_i(w) − Σ_j λ_j (−log Y_ij), i.e. the estimated
/// var η(w) for fixed weights λ.
pub fn sample_var_eta(sample: &SampleY, w: &SimplexPoint, lambda: &[f64]) -> Result<f64> {
    require_n(sample, 2)?;
    if lambda.len() != sample.p() {
        return Err(Error::DimensionMismatch {
            expected: sample.p(),
            got: lambda.len(),
        });
    }
    let target = neg_log_xi(sample, w)?;
    let combo: Vec<f64> = sample
        .rows()
        .zip(&target)
        .map(|(row, t)| t + row.iter().zip(lambda).map(|(y, l)| l * y.ln()).sum::<f64>())
        .collect();
    Ok(covariance(&combo, &combo))
}

/// Trapezoid rule in log coordinates for
///
/// ```text
/// ∫∫ [exp{-ℓ((v s) ∨ (w t))} − exp{-s A(v)} exp{-t A(w)}] ds/s dt/t
/// ```
///
/// over [1e-6, 40]², which equals cov(−log ξ(v), −log ξ(w)).
fn trapezoid_cov(model: &DependenceModel, v: &SimplexPoint, w: &SimplexPoint, nodes: usize) -> Result<f64> {
    let av = model.eval_a(v)?;
    let aw = model.eval_a(w)?;
    let (lo, hi) = (QUADRATURE_LOWER.ln(), QUADRATURE_UPPER.ln());
    let h = (hi - lo) / (nodes - 1) as f64;
    let grid: Vec<f64> = (0..nodes).map(|k| (lo + k as f64 * h).exp()).collect();
    let weight = |k: usize| if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 };
    let (vw, ww) = (v.weights(), w.weights());

    let rows: Vec<f64> = (0..nodes)
        .into_par_iter()
        .map(|a| -> Result<f64> {
            let s = grid[a];
            let mut y = vec![0.0; vw.len()];
            let mut acc = 0.0;
            for (b, &t) in grid.iter().enumerate() {
                for (yj, (vj, wj)) in y.iter_mut().zip(vw.iter().zip(ww)) {
                    *yj = (vj * s).max(wj * t);
                }
                let joint = model.eval_ell(&y)?;
                let indep = s * av + t * aw;
                // exp(-joint) − exp(-indep), without cancellation
                let g = (-indep).exp() * (indep - joint).exp_m1();
                acc += weight(b) * g;
            }
            Ok(weight(a) * acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.iter().sum::<f64>() * h * h)
}

/// Quadrature value of cov(ζ(v), ζ(w)) under `model`, computed with `nodes`
/// and `2·nodes` log-spaced nodes per axis; the finer value is returned if
/// the two agree to [`QUADRATURE_TOL`].
pub fn cov_zeta_quadrature(
    model: &DependenceModel,
    v: &SimplexPoint,
    w: &SimplexPoint,
    nodes: usize,
) -> Result<f64> {
    if nodes < MIN_QUADRATURE_NODES {
        return Err(Error::DomainError(format!(
            "quadrature needs at least {MIN_QUADRATURE_NODES} nodes, got {nodes}"
        )));
    }
    let coarse = trapezoid_cov(model, v, w, nodes)?;
    let fine = trapezoid_cov(model, v, w, 2 * nodes)?;
    let change = (fine - coarse).abs();
    if change > QUADRATURE_TOL {
        return Err(Error::QuadratureNotConverged(change));
    }
    Ok(fine)
}

/// Σ computed by quadrature from the model.
pub fn sigma_quadrature(model: &DependenceModel, nodes: usize) -> Result<SigmaMatrix> {
    let p = model.dim();
    SigmaMatrix::from_fn(p, |j, k| {
        cov_zeta_quadrature(
            model,
            &SimplexPoint::vertex(p, j),
            &SimplexPoint::vertex(p, k),
            nodes,
        )
    })
}

/// λ^opt(w) and var η_opt(w) from quadrature covariances, given Σ.
pub fn lambda_opt_quadrature(
    model: &DependenceModel,
    sigma: &SigmaMatrix,
    w: &SimplexPoint,
    nodes: usize,
) -> Result<OptimalWeights> {
    let p = model.dim();
    w.check_dim(p)?;
    let c = (0..p)
        .map(|j| cov_zeta_quadrature(model, &SimplexPoint::vertex(p, j), w, nodes))
        .collect::<Result<Vec<_>>>()?;
    let lambda = sigma.solve(&c)?;
    let var_zeta = cov_zeta_quadrature(model, w, w, nodes)?;
    let explained: f64 = c.iter().zip(&lambda).map(|(a, b)| a * b).sum();
    Ok(OptimalWeights {
        lambda,
        var_eta_opt: (var_zeta - explained).max(0.0),
        var_zeta,
        at_point: w.clone(),
        provenance: Provenance::Quadrature,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::ols_fit;
    use crate::sampler::draw_sample;
    use crate::simplex::GUMBEL_VARIANCE;

    fn sym3() -> DependenceModel {
        DependenceModel::symmetric_logistic(3.0, 3).unwrap()
    }

    #[test]
    fn too_few_observations() {
        let s = SampleY::from_rows(&[vec![1.0, 2.0, 3.0]], "x").unwrap();
        let c = SimplexPoint::centroid(3);
        assert!(matches!(
            sample_cov_zeta(&s, &c, &c),
            Err(Error::TooFewObservations { .. })
        ));
        assert!(sigma_hat(&s).is_err());
    }

    #[test]
    fn sigma_is_symmetric_psd() {
        let s = draw_sample(&sym3(), 2000, 5).unwrap();
        let sigma = sigma_hat(&s).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(sigma.get(j, k).to_bits(), sigma.get(k, j).to_bits());
            }
        }
        assert!(sigma.eigenvalues().iter().all(|&e| e >= -1e-8));
    }

    #[test]
    fn two_rows_give_rank_one_sigma() {
        let s = SampleY::from_rows(&[vec![1.0, 2.0], vec![0.5, 0.3]], "x").unwrap();
        let sigma = sigma_hat(&s).unwrap();
        assert!(sigma.condition_number() > MAX_CONDITION);
        assert!(matches!(sigma.solve(&[1.0, 0.0]), Err(Error::SingularSigma(_))));
    }

    #[test]
    fn duplicate_columns_are_perfectly_correlated() {
        let s0 = draw_sample(&sym3(), 500, 2).unwrap();
        let rows: Vec<Vec<f64>> = s0.rows().map(|r| vec![r[0], r[0], r[2]]).collect();
        let s = SampleY::from_rows(&rows, "dup").unwrap();
        let e1 = SimplexPoint::vertex(3, 0);
        let e2 = SimplexPoint::vertex(3, 1);
        let cov = sample_cov_zeta(&s, &e1, &e2).unwrap();
        let var = sample_cov_zeta(&s, &e1, &e1).unwrap();
        assert_eq!(cov, var);
        assert!(matches!(
            lambda_opt_hat(&s, &SimplexPoint::centroid(3)),
            Err(Error::SingularSigma(_))
        ));
    }

    #[test]
    fn vertex_weights_and_zero_variance() {
        let s = draw_sample(&sym3(), 3000, 9).unwrap();
        for j in 0..3 {
            let opt = lambda_opt_hat(&s, &SimplexPoint::vertex(3, j)).unwrap();
            for (k, l) in opt.lambda.iter().enumerate() {
                let want = if k == j { 1.0 } else { 0.0 };
                assert!((l - want).abs() < 1e-10, "{:?}", opt.lambda);
            }
            assert!(opt.var_eta_opt < 1e-10);
        }
    }

    #[test]
    fn lambda_opt_equals_ols_slopes() {
        // Same centring and divisor: the two routes solve the same system.
        let s = draw_sample(&sym3(), 1000, 13).unwrap();
        for w in [[0.2, 0.3, 0.5], [0.45, 0.45, 0.1], [0.6, 0.1, 0.3]] {
            let w = SimplexPoint::new(&w).unwrap();
            let opt = lambda_opt_hat(&s, &w).unwrap();
            let fit = ols_fit(&s, &w).unwrap();
            for (a, b) in opt.lambda.iter().zip(fit.slopes()) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
            // residual variance with divisor n − p − 1 vs n − 1
            let n = s.n() as f64;
            let scaled = opt.var_eta_opt * (n - 1.0) / (n - 4.0);
            assert!((scaled - fit.sigma2).abs() < 1e-9);
        }
    }

    #[test]
    fn var_eta_opt_below_var_zeta() {
        let s = draw_sample(&sym3(), 800, 1).unwrap();
        for w in crate::simplex::SimplexGrid::full(3, 5).unwrap().iter() {
            let opt = lambda_opt_hat(&s, w).unwrap();
            let v = sample_cov_zeta(&s, w, w).unwrap();
            assert!(opt.var_eta_opt <= v + 1e-10);
        }
    }

    #[test]
    fn sample_var_eta_at_optimum() {
        let s = draw_sample(&sym3(), 800, 3).unwrap();
        let w = SimplexPoint::new(&[0.3, 0.3, 0.4]).unwrap();
        let opt = lambda_opt_hat(&s, &w).unwrap();
        let direct = sample_var_eta(&s, &w, &opt.lambda).unwrap();
        assert!((direct - opt.var_eta_opt).abs() < 1e-10);
    }

    #[test]
    fn quadrature_vertex_diagonal_is_gumbel_variance() {
        let m = sym3();
        let e1 = SimplexPoint::vertex(3, 0);
        let v = cov_zeta_quadrature(&m, &e1, &e1, 512).unwrap();
        assert!((v - GUMBEL_VARIANCE).abs() < 1e-3, "{v}");
    }

    #[test]
    fn quadrature_independence_vanishes() {
        let m = DependenceModel::independence(3).unwrap();
        let v = cov_zeta_quadrature(
            &m,
            &SimplexPoint::vertex(3, 0),
            &SimplexPoint::vertex(3, 1),
            256,
        )
        .unwrap();
        assert!(v.abs() < 1e-3, "{v}");
    }

    #[test]
    fn quadrature_is_symmetric() {
        let m = DependenceModel::asymmetric_logistic(6.0, 0.6, 0.3, 0.0).unwrap();
        let v = SimplexPoint::new(&[0.2, 0.5, 0.3]).unwrap();
        let w = SimplexPoint::vertex(3, 2);
        let a = cov_zeta_quadrature(&m, &v, &w, 512).unwrap();
        let b = cov_zeta_quadrature(&m, &w, &v, 512).unwrap();
        assert!((a - b).abs() < QUADRATURE_TOL);
    }

    #[test]
    fn quadrature_rejects_few_nodes() {
        let c = SimplexPoint::centroid(3);
        assert!(cov_zeta_quadrature(&sym3(), &c, &c, 16).is_err());
    }

    #[test]
    fn quadrature_optimal_weights_at_vertex() {
        let m = sym3();
        let sigma = sigma_quadrature(&m, 512).unwrap();
        let opt = lambda_opt_quadrature(&m, &sigma, &SimplexPoint::vertex(3, 1), 512).unwrap();
        assert!((opt.lambda[1] - 1.0).abs() < 1e-8);
        assert!(opt.lambda[0].abs() < 1e-8 && opt.lambda[2].abs() < 1e-8);
        assert!(opt.var_eta_opt < 1e-8);
        assert_eq!(opt.provenance, Provenance::Quadrature);
    }
}
