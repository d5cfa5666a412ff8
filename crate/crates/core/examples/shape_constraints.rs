//! Bounds and convexity correction of a bivariate estimate.

use evcopula::estimators::{estimate_curve, shape_correct};
use evcopula::{draw_sample, DependenceModel, EstimatorId, SimplexGrid};

fn main() -> evcopula::Result<()> {
    let model = DependenceModel::symmetric_logistic(2.0, 2)?;
    let sample = draw_sample(&model, 40, 21)?;
    let grid = SimplexGrid::full(2, 20)?;
    let ids = [EstimatorId::Pickands];
    let raw = estimate_curve(&sample, &grid, &ids, None)?;
    let fixed = shape_correct(&raw, 2);

    println!("{:>6} {:>8} {:>10} {:>10}", "w1", "A", "raw", "corrected");
    let (r, c) = (raw.values(ids[0]), fixed.values(ids[0]));
    for (i, w) in grid.iter().enumerate() {
        println!(
            "{:>6.2} {:>8.5} {:>10.5} {:>10.5}",
            w.weights()[0],
            model.eval_a(w)?,
            r[i],
            c[i]
        );
    }
    Ok(())
}
