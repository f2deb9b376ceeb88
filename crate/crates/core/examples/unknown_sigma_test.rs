//! Test of `H₀: aᵀβ = g₀` without the design covariance. Prints the
//! Dantzig-type nuisance fits alongside the decision.

use densetest::dantzig::default_tuning;
use densetest::inference::test_unknown_sigma;
use densetest::numerics::norm1;
use densetest::numerics::rng::stream;
use densetest::simulate::{Design, DesignSampler};
use densetest::synthesize::Hypothesis;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> densetest::Result<()> {
    let (n, p) = (120, 80);
    let mut rng = stream(11, 0);
    let x = DesignSampler::new(Design::EquiCorrelation, p)?.sample(n, &mut rng);
    let mut beta = vec![0.0; p];
    beta[0] = 1.0;
    beta[1] = -0.5;
    let y: Vec<f64> = x
        .matvec(&beta)?
        .into_iter()
        .map(|m| m + rng.sample::<f64, _>(StandardNormal))
        .collect();

    let a: Vec<f64> = (0..p).map(|j| if j < 2 { 1.0 } else { 0.0 }).collect();
    let tuning = default_tuning(n, p)?;
    println!(
        "tuning: eta = {:.4}, lambda = {:.4}, rho0 = {}",
        tuning.eta, tuning.lambda, tuning.rho0
    );
    for g0 in [0.5, 2.0] {
        let report = test_unknown_sigma(&x, &y, &Hypothesis::new(a.clone(), g0)?, 0.05, tuning)?;
        let fit = report.diagnostics.as_ref().expect("unknown-sigma reports carry diagnostics");
        println!(
            "g0 = {g0}: S_n = {:.3}, p-value = {:.4}, reject = {}",
            report.statistic, report.p_value, report.reject
        );
        println!(
            "  |pi|_1 = {:.3}, rho = {:.3}, |gamma|_1 = {:.3}, sigma_eps = {:.3}, sigma_u = {:.3}",
            norm1(&fit.pi_hat),
            fit.rho_hat,
            norm1(&fit.gamma_hat),
            fit.sigma_eps_hat,
            fit.sigma_u_hat
        );
    }
    Ok(())
}
