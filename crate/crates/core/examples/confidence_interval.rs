//! Confidence intervals for `aᵀβ` by inverting both tests over a grid.

use densetest::dantzig::default_tuning;
use densetest::inference::{CiMethod, Grid, confidence_interval};
use densetest::numerics::rng::stream;
use densetest::simulate::{Design, DesignSampler, Regime, gen_regime, population_covariance};
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> densetest::Result<()> {
    let (n, p) = (150, 60);
    let (beta, a) = gen_regime(Regime::ALL[0], p)?;
    let mut rng = stream(3, 0);
    let x = DesignSampler::new(Design::Toeplitz, p)?.sample(n, &mut rng);
    let y: Vec<f64> = x
        .matvec(&beta)?
        .into_iter()
        .map(|m| m + rng.sample::<f64, _>(StandardNormal))
        .collect();
    println!("true a'beta = 0.8");

    let sigma = population_covariance(Design::Toeplitz, p)?;
    let known = confidence_interval(&x, &y, &a, 0.05, CiMethod::KnownSigma(&sigma), None)?;
    println!(
        "known sigma:   [{:.3}, {:.3}] from {} grid points, step {:.4}",
        known.lower, known.upper, known.grid_points, known.grid_resolution
    );

    let grid = Grid {
        center: 0.8,
        half_width: 0.6,
        step: 0.01,
    };
    let unknown = confidence_interval(&x, &y, &a, 0.05, CiMethod::UnknownSigma(default_tuning(n, p)?), Some(grid))?;
    println!(
        "unknown sigma: [{:.3}, {:.3}], contiguous = {}, undetermined = {}",
        unknown.lower, unknown.upper, unknown.contiguous, unknown.undetermined
    );
    Ok(())
}
