//! Draws positive stable variables and compares the empirical Laplace
//! transform with exp(-t^alpha).

use evcopula::sampler::sample_positive_stable;
use evcopula::RngStream;

fn main() -> evcopula::Result<()> {
    let n = 200_000;
    let mut rng = RngStream::new(11, 0);
    for alpha in [0.25, 0.5, 0.9] {
        let draws: Vec<f64> = (0..n)
            .map(|_| {
                let u = rng.open_uniform();
                let e = rng.exponential();
                sample_positive_stable(alpha, u, e)
            })
            .collect::<Result<_, _>>()?;
        println!("alpha = {alpha}");
        for t in [0.5, 1.0, 2.0] {
            let emp = draws.iter().map(|s| (-t * s).exp()).sum::<f64>() / n as f64;
            let exact = (-f64::powf(t, alpha)).exp();
            println!("  t = {t:<4} empirical {emp:.5}  exact {exact:.5}");
        }
    }
    Ok(())
}
