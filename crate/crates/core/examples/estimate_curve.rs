//! Estimates A along w1 = w2 with every estimator and prints the curves
//! next to the true values.

use evcopula::estimators::estimate_curve;
use evcopula::{draw_sample, DependenceModel, EstimatorId, SimplexGrid};

fn main() -> evcopula::Result<()> {
    let model = DependenceModel::symmetric_logistic(3.0, 3)?;
    let sample = draw_sample(&model, 200, 7)?;
    let grid = SimplexGrid::line_w1_eq_w2(0.05)?;
    let ids = [
        EstimatorId::Naive,
        EstimatorId::Cfg,
        EstimatorId::Ols,
        EstimatorId::Pickands,
        EstimatorId::Deheuvels,
        EstimatorId::HallTajvidi,
    ];
    let curve = estimate_curve(&sample, &grid, &ids, None)?;

    print!("{:>6} {:>8}", "w1", "A");
    for id in ids {
        print!(" {:>12}", id.name());
    }
    println!();
    let columns: Vec<Vec<f64>> = ids.iter().map(|&id| curve.values(id)).collect();
    for (i, w) in grid.iter().enumerate() {
        print!("{:>6.3} {:>8.5}", w.weights()[0], model.eval_a(w)?);
        for col in &columns {
            print!(" {:>12.5}", col[i]);
        }
        println!();
    }
    Ok(())
}
