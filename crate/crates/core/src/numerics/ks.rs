use super::normal::normal_cdf;
use crate::error::{Error, Result};

/// Result of a one-sample Kolmogorov-Smirnov test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Asymptotic Kolmogorov survival function `Σ 2(-1)^{k-1} exp(-2k²λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    // The alternating series is useless for small λ, where the answer is 1
    // to double precision anyway.
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * 2.0 * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

/// One-sample KS test of `sample` against N(0, 1).
pub fn ks_test_standard_normal(sample: &[f64]) -> Result<KsResult> {
    const MIN_SAMPLES: usize = 10;
    if sample.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: sample.len(),
        });
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("KS sample contains non-finite values".into()));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max);
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_sf(lambda),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal::normal_quantile;
    use crate::numerics::rng::stream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn midpoint_quantiles_have_half_step_gap() {
        let n = 100;
        let sample: Vec<f64> = (1..=n).map(|i| normal_quantile((i as f64 - 0.5) / n as f64).unwrap()).collect();
        let r = ks_test_standard_normal(&sample).unwrap();
        assert!((r.statistic - 0.005).abs() < 1e-9);
        assert!(r.p_value > 0.999);
    }

    #[test]
    fn constant_sample() {
        let r = ks_test_standard_normal(&[0.0; 100]).unwrap();
        assert_eq!(r.statistic, 0.5);
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            ks_test_standard_normal(&[0.0; 9]),
            Err(Error::TooFewSamples { needed: 10, got: 9 })
        ));
    }

    #[test]
    fn sf_reference_values() {
        // Q(1.3581) ≈ 0.05 and Q(1.6276) ≈ 0.01 are the classical critical points.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-3);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn calibration_under_the_null() {
        let seeds = 200;
        let passing = (0..seeds)
            .filter(|&s| {
                let mut rng = stream(1000, s);
                let x: Vec<f64> = (0..500).map(|_| rng.sample(StandardNormal)).collect();
                ks_test_standard_normal(&x).unwrap().p_value > 0.01
            })
            .count();
        assert!(passing as f64 >= 0.98 * seeds as f64, "{passing}/{seeds}");
    }
}
