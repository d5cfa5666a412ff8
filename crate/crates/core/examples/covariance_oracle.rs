//! Σ and the optimal weights by quadrature under the model, compared with
//! their estimates from a large sample.

use evcopula::asymptotics::{lambda_opt_hat, lambda_opt_quadrature, sigma_hat, sigma_quadrature};
use evcopula::{draw_sample, DependenceModel, SimplexPoint};

fn main() -> evcopula::Result<()> {
    let model = DependenceModel::symmetric_logistic(3.0, 3)?;
    let nodes = 512;
    let sigma = sigma_quadrature(&model, nodes)?;
    let sample = draw_sample(&model, 100_000, 9)?;
    let sigma_s = sigma_hat(&sample)?;

    println!("Σ (quadrature | sample)");
    for j in 0..3 {
        let q: Vec<String> = (0..3).map(|k| format!("{:.4}", sigma.get(j, k))).collect();
        let s: Vec<String> = (0..3).map(|k| format!("{:.4}", sigma_s.get(j, k))).collect();
        println!("  {}   |   {}", q.join(" "), s.join(" "));
    }
    println!("condition number {:.3}", sigma.condition_number());

    let w = SimplexPoint::centroid(3);
    let q = lambda_opt_quadrature(&model, &sigma, &w, nodes)?;
    let s = lambda_opt_hat(&sample, &w)?;
    println!("at the centroid");
    println!("  λopt quadrature {:?}", q.lambda);
    println!("  λopt sample     {:?}", s.lambda);
    println!("  var η_opt {:.5} (quadrature) {:.5} (sample)", q.var_eta_opt, s.var_eta_opt);
    println!("  var ζ     {:.5} (quadrature) {:.5} (sample)", q.var_zeta, s.var_zeta);
    Ok(())
}
