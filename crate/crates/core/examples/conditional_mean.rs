//! Conditional mean of the response at a point, using a polynomial
//! dictionary of the raw covariates.

use densetest::dantzig::default_tuning;
use densetest::inference::{CiMethod, Grid, confidence_interval, power_dictionary, test_unknown_sigma};
use densetest::numerics::DenseMatrix;
use densetest::numerics::rng::stream;
use densetest::synthesize::Hypothesis;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> densetest::Result<()> {
    let (n, k) = (300, 6);
    let mut rng = stream(17, 0);
    let zeta = DenseMatrix::from_fn(n, k, |_, _| rng.random_range(-1.5..1.5));
    // m(ζ) = ζ₁ - 0.5 ζ₂² + 0.3 ζ₃.
    let mean = |z: &[f64]| z[0] - 0.5 * z[1] * z[1] + 0.3 * z[2];
    let y: Vec<f64> = (0..n)
        .map(|i| mean(zeta.row(i)) + 0.5 * rng.sample::<f64, _>(StandardNormal))
        .collect();

    // Degrees above 2 give nearly collinear columns on a bounded range, and
    // the default tuning then over-shrinks the nuisance fits.
    let (x, dict) = power_dictionary(&zeta, 2)?;
    println!("dictionary: {} raw covariates -> {} features", dict.raw_dim, dict.dim());

    let point = [0.5, 1.0, -1.0, 0.0, 0.0, 0.0];
    let a = dict.loading_at(&point)?;
    let truth = mean(&point);
    let tuning = default_tuning(n, dict.dim())?;
    let r = test_unknown_sigma(&x, &y, &Hypothesis::new(a.clone(), truth)?, 0.05, tuning)?;
    println!("m(d) = {truth:.3}: S_n = {:.3}, reject = {}", r.statistic, r.reject);

    let grid = Grid {
        center: truth,
        half_width: 1.0,
        step: 0.02,
    };
    let ci = confidence_interval(&x, &y, &a, 0.05, CiMethod::UnknownSigma(tuning), Some(grid))?;
    println!("95% interval for m(d): [{:.3}, {:.3}]", ci.lower, ci.upper);
    Ok(())
}
