//! Samples the symmetric and asymmetric logistic models and checks the
//! margins and the joint survival probability at (1, 1, 1).

use evcopula::{draw_sample, DependenceModel, SimplexPoint};

fn main() -> evcopula::Result<()> {
    let n = 100_000;
    let models = [
        DependenceModel::symmetric_logistic(3.0, 3)?,
        DependenceModel::asymmetric_logistic(6.0, 0.6, 0.3, 0.0)?,
        DependenceModel::independence(3)?,
    ];
    for model in &models {
        let sample = draw_sample(model, n, 2024)?;
        let means: Vec<String> = (0..3)
            .map(|j| format!("{:.4}", sample.column(j).sum::<f64>() / n as f64))
            .collect();
        // P(Y1 > 1, Y2 > 1, Y3 > 1) = exp(-l(1, 1, 1)) = exp(-3 A(1/3, 1/3, 1/3))
        let hits = sample.rows().filter(|r| r.iter().all(|&y| y > 1.0)).count();
        let a = model.eval_a(&SimplexPoint::centroid(3))?;
        println!("{}", model.tag());
        println!("  margin means {}", means.join(" "));
        println!(
            "  P(all > 1) empirical {:.4}  exact {:.4}",
            hits as f64 / n as f64,
            (-3.0 * a).exp()
        );
    }
    Ok(())
}
