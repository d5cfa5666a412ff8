//! Exact simulation from logistic-type extreme-value models.
//!
//! Samples are produced on the unit-Fréchet scale and mapped to unit
//! exponential margins through `Y = 1/Z`, so that
//! `P(Y_1 > y_1, …, Y_p > y_p) = exp{-ℓ(y)}`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::models::{DependenceModel, Family};

/// Fréchet draws are clamped into this range.
pub const FRECHET_MIN: f64 = 1e-300;
pub const FRECHET_MAX: f64 = 1e300;

/// A reproducible random stream identified by `(seed, stream_id)`.
///
/// Backed by ChaCha8, whose output is specified independently of platform
/// and word size. Each stream id selects an independent ChaCha stream under
/// the same key.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on the open interval (0, 1).
    pub fn open_uniform(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Standard exponential, strictly positive and finite.
    pub fn exponential(&mut self) -> f64 {
        loop {
            let e = -self.open_uniform().ln();
            if e > 0.0 {
                return e;
            }
        }
    }
}

fn check_stable_args(alpha: f64, u: f64, e: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::DomainError(format!("stable index {alpha} not in (0, 1]")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::DomainError(format!("uniform {u} not in (0, 1)")));
    }
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::DomainError(format!("exponential {e} not positive")));
    }
    Ok(())
}

/// log S for the positive stable variate built from `(u, e)`; see
/// [`sample_positive_stable`].
pub fn log_positive_stable(alpha: f64, u: f64, e: f64) -> Result<f64> {
    check_stable_args(alpha, u, e)?;
    if alpha == 1.0 {
        return Ok(0.0);
    }
    let one_m = 1.0 - alpha;
    let log_a = (one_m * PI * u).sin().ln() + (alpha / one_m) * (alpha * PI * u).sin().ln()
        - (PI * u).sin().ln() / one_m;
    Ok((one_m / alpha) * (log_a - e.ln()))
}

/// Positive stable variate with Laplace transform `exp(-t^alpha)`, obtained
/// from a uniform `u` and a unit exponential `e` by the Chambers–Mallows–Stuck
/// (Kanter) transform
///
/// ```text
/// a(u) = sin((1-α)πu) · sin(απu)^{α/(1-α)} / sin(πu)^{1/(1-α)}
/// S    = (a(u) / e)^{(1-α)/α}
/// ```
///
/// For `alpha == 1` the law is the point mass at one.
pub fn sample_positive_stable(alpha: f64, u: f64, e: f64) -> Result<f64> {
    log_positive_stable(alpha, u, e).map(f64::exp)
}

fn clamp_frechet(z: f64) -> f64 {
    if z.is_nan() {
        FRECHET_MAX
    } else {
        z.clamp(FRECHET_MIN, FRECHET_MAX)
    }
}

/// Z_j = (S / E_j)^{1/r}, evaluated on the log scale.
fn frechet_from_log_stable(log_s: f64, e: f64, r: f64) -> f64 {
    clamp_frechet(((log_s - e.ln()) / r).exp())
}

/// The symmetric logistic construction for given mixing variable `s` and
/// exponentials `e`: `Z_j = (s / e_j)^{1/r}`.
pub fn symlog_frechet_from(s: f64, e: &[f64], r: f64) -> Vec<f64> {
    let log_s = s.ln();
    e.iter().map(|&ej| frechet_from_log_stable(log_s, ej, r)).collect()
}

/// One draw from the p-variate symmetric logistic law
/// `G(z) = exp{-(Σ z_j^{-r})^{1/r}}` with unit Fréchet margins.
pub fn sample_symlog_frechet(r: f64, p: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
    if !(r.is_finite() && r >= 1.0) {
        return Err(Error::ParameterError(format!("r = {r} must be finite and >= 1")));
    }
    let log_s = if r == 1.0 {
        0.0
    } else {
        let u = rng.open_uniform();
        let e = rng.exponential();
        log_positive_stable(1.0 / r, u, e)?
    };
    Ok((0..p)
        .map(|_| frechet_from_log_stable(log_s, rng.exponential(), r))
        .collect())
}

/// One draw from the trivariate asymmetric logistic law, as the componentwise
/// maximum of independent symmetric logistic vectors on the subsets
/// {1,2}, {2,3}, {3,1} (weights θ, φ), {1,2,3} (weight ψ) and on the singletons
/// (weight 1 − θ − φ − ψ). Components with zero weight draw nothing.
pub fn sample_asymlog_frechet(
    r: f64,
    theta: f64,
    phi: f64,
    psi: f64,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    // validates the parameters
    DependenceModel::asymmetric_logistic(r, theta, phi, psi)?;
    let rest = (1.0 - theta - phi - psi).max(0.0);
    let mut z = [0.0f64; 3];
    let mut absorb = |j: usize, v: f64| z[j] = z[j].max(v);

    if theta > 0.0 || phi > 0.0 {
        for (a, b) in [(0usize, 1usize), (1, 2), (2, 0)] {
            let pair = sample_symlog_frechet(r, 2, rng)?;
            if theta > 0.0 {
                absorb(a, theta * pair[0]);
            }
            if phi > 0.0 {
                absorb(b, phi * pair[1]);
            }
        }
    }
    if psi > 0.0 {
        let joint = sample_symlog_frechet(r, 3, rng)?;
        for (j, v) in joint.into_iter().enumerate() {
            absorb(j, psi * v);
        }
    }
    if rest > 0.0 {
        for j in 0..3 {
            absorb(j, rest * frechet_from_log_stable(0.0, rng.exponential(), 1.0));
        }
    }
    Ok(z.iter().map(|&v| clamp_frechet(v)).collect())
}

/// Maps unit Fréchet values to unit exponential margins, `Y_j = 1/Z_j`,
/// clamped away from zero.
pub fn to_exponential_margins(z: &[f64]) -> Result<Vec<f64>> {
    z.iter()
        .map(|&v| {
            if !(v > 0.0) {
                Err(Error::NonPositiveInput(v))
            } else {
                Ok((1.0 / v).max(FRECHET_MIN))
            }
        })
        .collect()
}

/// One Fréchet-scale draw from `model`.
pub fn sample_frechet(model: &DependenceModel, rng: &mut RngStream) -> Result<Vec<f64>> {
    match model.family() {
        Family::Independence => sample_symlog_frechet(1.0, model.dim(), rng),
        Family::SymmetricLogistic { r } => sample_symlog_frechet(*r, model.dim(), rng),
        Family::AsymmetricLogistic {
            r,
            theta,
            phi,
            psi,
        } => sample_asymlog_frechet(*r, *theta, *phi, *psi, rng),
        Family::Tabulated(_) => Err(Error::UnsupportedModel(model.tag())),
    }
}

/// An n×p sample with unit exponential margins, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleY {
    data: Vec<f64>,
    n: usize,
    p: usize,
    model_tag: String,
    seed: u64,
    stream_id: u64,
}

impl SampleY {
    /// Wraps externally supplied observations. Every entry must be positive
    /// and finite.
    pub fn from_rows(rows: &[Vec<f64>], model_tag: impl Into<String>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::TooFewObservations { needed: 1, got: 0 });
        }
        let p = rows[0].len();
        if p < 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: p });
        }
        let mut data = Vec::with_capacity(n * p);
        for row in rows {
            if row.len() != p {
                return Err(Error::DimensionMismatch {
                    expected: p,
                    got: row.len(),
                });
            }
            for &v in row {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::NonPositiveInput(v));
                }
            }
            data.extend_from_slice(row);
        }
        Ok(Self {
            data,
            n,
            p,
            model_tag: model_tag.into(),
            seed: 0,
            stream_id: 0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.p)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.p + j]
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    pub fn model_tag(&self) -> &str {
        &self.model_tag
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// The same observations multiplied by `c`, for equivariance checks.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| v * c).collect(),
            ..self.clone()
        }
    }
}

/// `n` iid rows from `model` using stream 0 of `seed`.
pub fn draw_sample(model: &DependenceModel, n: usize, seed: u64) -> Result<SampleY> {
    draw_sample_stream(model, n, seed, 0)
}

/// `n` iid rows from `model` using stream `stream_id` of `seed`.
pub fn draw_sample_stream(
    model: &DependenceModel,
    n: usize,
    seed: u64,
    stream_id: u64,
) -> Result<SampleY> {
    if n == 0 {
        return Err(Error::TooFewObservations { needed: 1, got: 0 });
    }
    let mut rng = RngStream::new(seed, stream_id);
    let p = model.dim();
    let mut data = Vec::with_capacity(n * p);
    for _ in 0..n {
        let z = sample_frechet(model, &mut rng)?;
        data.extend(to_exponential_margins(&z)?);
    }
    Ok(SampleY {
        data,
        n,
        p,
        model_tag: model.tag(),
        seed,
        stream_id,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stable_alpha_one_is_one() {
        for (u, e) in [(0.1, 0.3), (0.5, 1.0), (0.99, 7.0)] {
            assert_eq!(sample_positive_stable(1.0, u, e).unwrap(), 1.0);
        }
    }

    #[test]
    fn stable_half_at_midpoint() {
        // a = sin(π/4)·sin(π/4) / sin(π/2)^2 = 1/2, S = (a/1)^1
        let s = sample_positive_stable(0.5, 0.5, 1.0).unwrap();
        assert!((s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn stable_domain_errors() {
        assert!(sample_positive_stable(0.0, 0.5, 1.0).is_err());
        assert!(sample_positive_stable(1.5, 0.5, 1.0).is_err());
        assert!(sample_positive_stable(0.5, 0.0, 1.0).is_err());
        assert!(sample_positive_stable(0.5, 1.0, 1.0).is_err());
        assert!(sample_positive_stable(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn symlog_construction_by_hand() {
        let z = symlog_frechet_from(0.5, &[0.5, 2.0], 2.0);
        assert!((z[0] - 1.0).abs() < 1e-15);
        assert!((z[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn symlog_r1_independent_frechet() {
        let mut a = RngStream::new(9, 3);
        let mut b = a.clone();
        let z = sample_symlog_frechet(1.0, 3, &mut a).unwrap();
        for zj in z {
            let e = b.exponential();
            assert!((zj - 1.0 / e).abs() <= 1e-15 * zj);
        }
    }

    #[test]
    fn asymlog_symmetric_subcase_matches_symlog() {
        let mut a = RngStream::new(5, 1);
        let mut b = a.clone();
        for _ in 0..100 {
            let x = sample_asymlog_frechet(3.0, 0.0, 0.0, 1.0, &mut a).unwrap();
            let y = sample_symlog_frechet(3.0, 3, &mut b).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn asymlog_independent_subcase() {
        let mut a = RngStream::new(5, 2);
        let mut b = a.clone();
        for _ in 0..100 {
            let x = sample_asymlog_frechet(4.0, 0.0, 0.0, 0.0, &mut a).unwrap();
            let y = sample_symlog_frechet(1.0, 3, &mut b).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn asymlog_rejects_bad_parameters() {
        let mut rng = RngStream::new(1, 0);
        assert!(sample_asymlog_frechet(2.0, 0.7, 0.3, 0.2, &mut rng).is_err());
    }

    #[test]
    fn exponential_margins() {
        assert_eq!(
            to_exponential_margins(&[1.0, 2.0, 4.0]).unwrap(),
            vec![1.0, 0.5, 0.25]
        );
        let y = to_exponential_margins(&[f64::INFINITY]).unwrap();
        assert_eq!(y, vec![FRECHET_MIN]);
        assert!(matches!(
            to_exponential_margins(&[1.0, 0.0]),
            Err(Error::NonPositiveInput(_))
        ));
        assert!(to_exponential_margins(&[-1.0]).is_err());
    }

    #[test]
    fn draw_is_deterministic() {
        let m = DependenceModel::symmetric_logistic(3.0, 3).unwrap();
        let a = draw_sample(&m, 50, 42).unwrap();
        let b = draw_sample(&m, 50, 42).unwrap();
        assert_eq!(a, b);
        let c = draw_sample_stream(&m, 50, 42, 1).unwrap();
        assert_ne!(a.row(0), c.row(0));
        assert!(a.rows().flatten().all(|v| *v > 0.0 && v.is_finite()));
    }

    #[test]
    fn tabulated_models_cannot_be_sampled() {
        let g = crate::simplex::SimplexGrid::full(2, 2).unwrap();
        let m = DependenceModel::tabulated(g, vec![1.0, 0.7, 1.0]).unwrap();
        assert!(matches!(
            draw_sample(&m, 5, 1),
            Err(Error::UnsupportedModel(_))
        ));
    }

    #[test]
    fn from_rows_validates() {
        assert!(SampleY::from_rows(&[vec![1.0, 2.0], vec![0.5]], "x").is_err());
        assert!(SampleY::from_rows(&[vec![1.0, -2.0]], "x").is_err());
        assert!(SampleY::from_rows(&[], "x").is_err());
        let s = SampleY::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]], "x").unwrap();
        assert_eq!(s.column(1).collect::<Vec<_>>(), vec![2.0, 4.0]);
    }
}
