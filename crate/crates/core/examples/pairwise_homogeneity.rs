//! Does feature 1 have the same effect as feature 2, or as feature 3?

use densetest::dantzig::default_tuning;
use densetest::inference::{pairwise_loading, test_unknown_sigma};
use densetest::numerics::rng::stream;
use densetest::simulate::{Design, DesignSampler};
use densetest::synthesize::Hypothesis;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> densetest::Result<()> {
    let (n, p) = (200, 50);
    let mut rng = stream(21, 0);
    let x = DesignSampler::new(Design::Toeplitz, p)?.sample(n, &mut rng);
    let mut beta = vec![0.05; p];
    beta[0] = 1.0;
    beta[1] = 1.0;
    beta[2] = 0.2;
    let y: Vec<f64> = x
        .matvec(&beta)?
        .into_iter()
        .map(|m| m + rng.sample::<f64, _>(StandardNormal))
        .collect();

    let tuning = default_tuning(n, p)?;
    for (k, j) in [(1, 2), (1, 3)] {
        let hyp = Hypothesis::new(pairwise_loading(k, j, p)?, 0.0)?;
        let r = test_unknown_sigma(&x, &y, &hyp, 0.05, tuning)?;
        println!(
            "beta_{k} = beta_{j}: S_n = {:>6.3}, p-value = {:.4}, reject = {}",
            r.statistic, r.p_value, r.reject
        );
    }
    Ok(())
}
