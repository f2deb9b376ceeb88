//! Studentized test of `H₀: aᵀβ = g₀` when the design covariance is known.
//!
//! The response depends on all 200 features (dense β), more than the 100
//! observations, yet the test needs neither β nor the noise level.

use densetest::inference::test_known_sigma;
use densetest::numerics::rng::stream;
use densetest::simulate::{Design, DesignSampler, population_covariance};
use densetest::synthesize::Hypothesis;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> densetest::Result<()> {
    let (n, p) = (100, 200);
    let mut rng = stream(9, 0);
    let x = DesignSampler::new(Design::Toeplitz, p)?.sample(n, &mut rng);
    let beta = vec![3.0 / (p as f64).sqrt(); p];
    let y: Vec<f64> = x
        .matvec(&beta)?
        .into_iter()
        .map(|m| m + rng.sample::<f64, _>(StandardNormal))
        .collect();
    let sigma = population_covariance(Design::Toeplitz, p)?;

    // β₂ equals 3/√200 ≈ 0.212.
    let mut a = vec![0.0; p];
    a[1] = 1.0;
    for g0 in [0.212, 0.0, 1.5] {
        let report = test_known_sigma(&x, &y, &sigma, &Hypothesis::new(a.clone(), g0)?, 0.05)?;
        println!(
            "g0 = {g0:>5}: T_n = {:>7.3}, p-value = {:.4}, {}",
            report.statistic,
            report.p_value,
            if report.reject { "reject" } else { "do not reject" }
        );
    }
    Ok(())
}
