//! Distributional checks of the samplers against closed forms. Seeds are
//! fixed; tolerances are 3 to 4 standard errors.

use evcopula::estimators::xi;
use evcopula::sampler::sample_positive_stable;
use evcopula::{draw_sample, DependenceModel, RngStream, SampleY, SimplexPoint};

fn survival(sample: &SampleY, y: &[f64]) -> f64 {
    let hits = sample
        .rows()
        .filter(|row| row.iter().zip(y).all(|(a, b)| a > b))
        .count();
    hits as f64 / sample.n() as f64
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn positive_stable_laplace_transform() {
    let n = 100_000;
    let mut rng = RngStream::new(101, 0);
    for alpha in [0.2, 0.5, 0.8] {
        let draws: Vec<f64> = (0..n)
            .map(|_| {
                let u = rng.open_uniform();
                let e = rng.exponential();
                sample_positive_stable(alpha, u, e).unwrap()
            })
            .collect();
        for t in [0.3, 1.0, 3.0] {
            let vals: Vec<f64> = draws.iter().map(|s| (-t * s).exp()).collect();
            let mean = vals.iter().sum::<f64>() / n as f64;
            let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
            let exact = (-f64::powf(t, alpha)).exp();
            assert!(
                (mean - exact).abs() < 4.0 * sd / (n as f64).sqrt(),
                "alpha {alpha} t {t}: {mean} vs {exact}"
            );
        }
    }
}

#[test]
fn joint_survival_matches_exponent_measure() {
    let n = 200_000;
    let models = [
        DependenceModel::symmetric_logistic(3.0, 3).unwrap(),
        DependenceModel::asymmetric_logistic(6.0, 0.6, 0.3, 0.0).unwrap(),
        DependenceModel::asymmetric_logistic(2.0, 0.2, 0.5, 0.3).unwrap(),
    ];
    for (k, model) in models.iter().enumerate() {
        let sample = draw_sample(model, n, 200 + k as u64).unwrap();
        for y in [[1.0, 1.0, 1.0], [0.3, 1.2, 0.7], [2.0, 0.1, 0.5]] {
            let exact = (-model.eval_ell(&y).unwrap()).exp();
            let emp = survival(&sample, &y);
            assert!(
                (emp - exact).abs() < 4.0 * binomial_se(exact, n),
                "{} at {y:?}: {emp} vs {exact}",
                model.tag()
            );
        }
    }
}

#[test]
fn bivariate_symlog_survival() {
    let n = 100_000;
    let model = DependenceModel::symmetric_logistic(2.0, 2).unwrap();
    let sample = draw_sample(&model, n, 303).unwrap();
    for y in [[0.5f64, 0.5], [1.0, 2.0], [0.2, 1.5]] {
        let exact = (-(y[0] * y[0] + y[1] * y[1]).sqrt()).exp();
        let emp = survival(&sample, &y);
        assert!((emp - exact).abs() < 4.0 * binomial_se(exact, n));
    }
}

#[test]
fn margins_are_unit_exponential() {
    let n = 100_000;
    let model = DependenceModel::asymmetric_logistic(6.0, 0.6, 0.3, 0.0).unwrap();
    let sample = draw_sample(&model, n, 404).unwrap();
    for j in 0..3 {
        let mut col: Vec<f64> = sample.column(j).collect();
        let mean = col.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
        col.sort_by(f64::total_cmp);
        let ks = col
            .iter()
            .enumerate()
            .map(|(i, &y)| {
                let f = 1.0 - (-y).exp();
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        // 1% critical value of the Kolmogorov distribution
        assert!(ks < 1.63 / (n as f64).sqrt(), "KS {ks}");
    }
}

#[test]
fn independence_model_is_uncorrelated() {
    let n = 100_000;
    let sample = draw_sample(&DependenceModel::independence(3).unwrap(), n, 505).unwrap();
    let cols: Vec<Vec<f64>> = (0..3).map(|j| sample.column(j).collect()).collect();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        // unit exponential margins: mean 1 and variance 1
        let cov = cols[a]
            .iter()
            .zip(&cols[b])
            .map(|(x, y)| (x - 1.0) * (y - 1.0))
            .sum::<f64>()
            / n as f64;
        assert!(cov.abs() < 4.0 / (n as f64).sqrt(), "cov {cov}");
    }
}

#[test]
fn xi_is_exponential_with_rate_a() {
    let n = 200_000;
    let model = DependenceModel::asymmetric_logistic(6.0, 0.6, 0.3, 0.0).unwrap();
    let sample = draw_sample(&model, n, 606).unwrap();
    for w in [[0.2, 0.3, 0.5], [0.6, 0.2, 0.2], [0.45, 0.45, 0.1]] {
        let w = SimplexPoint::new(&w).unwrap();
        let a = model.eval_a(&w).unwrap();
        let x = xi(&sample, &w).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let exact = (-t * a).exp();
            let emp = x.values().iter().filter(|&&v| v > t).count() as f64 / n as f64;
            assert!(
                (emp - exact).abs() < 3.0 * binomial_se(exact, n),
                "w {w} x {t}: {emp} vs {exact}"
            );
        }
    }
}
