//! Joint contribution of a feature group: `H₀: β₁ + β₂ + β₃ = g₀`.

use densetest::dantzig::default_tuning;
use densetest::inference::{group_loading, test_unknown_sigma};
use densetest::numerics::rng::stream;
use densetest::simulate::{Design, DesignSampler};
use densetest::synthesize::{Hypothesis, decompose_unknown};
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> densetest::Result<()> {
    let (n, p) = (150, 40);
    let mut rng = stream(5, 0);
    let x = DesignSampler::new(Design::Toeplitz, p)?.sample(n, &mut rng);
    let mut beta = vec![0.0; p];
    beta[..3].copy_from_slice(&[0.5, 0.3, 0.2]);
    let y: Vec<f64> = x
        .matvec(&beta)?
        .into_iter()
        .map(|m| m + rng.sample::<f64, _>(StandardNormal))
        .collect();

    let a = group_loading(&[1.0, 1.0, 1.0], &[1, 2, 3], p)?;
    let f = decompose_unknown(&x, &a)?;
    println!(
        "z_1 = {:.4} (group mean of row 1: {:.4})",
        f.z[0],
        (x[(0, 0)] + x[(0, 1)] + x[(0, 2)]) / 3.0
    );

    let tuning = default_tuning(n, p)?;
    for g0 in [1.0, 0.0] {
        let r = test_unknown_sigma(&x, &y, &Hypothesis::new(a.clone(), g0)?, 0.05, tuning)?;
        println!(
            "sum = {g0}: S_n = {:>6.3}, p-value = {:.4}, reject = {}",
            r.statistic, r.p_value, r.reject
        );
    }
    Ok(())
}
