//! The OLS estimator is CFG with data-driven weights: its slopes are the
//! estimated variance-optimal weights.

use evcopula::asymptotics::lambda_opt_hat;
use evcopula::estimators::{cfg, ols_fit, WeightScheme};
use evcopula::{draw_sample, DependenceModel, SimplexPoint};

fn main() -> evcopula::Result<()> {
    let model = DependenceModel::asymmetric_logistic(6.0, 0.6, 0.3, 0.0)?;
    let sample = draw_sample(&model, 500, 3)?;
    let w = SimplexPoint::new(&[0.2, 0.3, 0.5])?;

    let fit = ols_fit(&sample, &w)?;
    let opt = lambda_opt_hat(&sample, &w)?;
    println!("w = {w}");
    println!("OLS slopes      {:?}", fit.slopes());
    println!("estimated λopt  {:?}", opt.lambda);
    println!("residual var    {:.6}", fit.sigma2);

    let ols = fit.intercept().exp();
    let adaptive = cfg(&sample, &w, &WeightScheme::Estimated)?;
    let pragmatic = cfg(&sample, &w, &WeightScheme::Pragmatic)?;
    println!("A(w)            {:.6}", model.eval_a(&w)?);
    println!("OLS             {ols:.6}");
    println!("adaptive CFG    {adaptive:.6}");
    println!("pragmatic CFG   {pragmatic:.6}");
    Ok(())
}
