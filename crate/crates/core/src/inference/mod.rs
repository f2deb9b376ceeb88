//! Test statistics, decisions, confidence intervals and loading helpers.

mod applications;
mod ci;

pub use applications::{PowerDictionary, group_loading, pairwise_loading, power_dictionary};
pub use ci::{CiMethod, ConfidenceInterval, Grid, confidence_interval, default_grid};

use serde::{Deserialize, Serialize};

use crate::dantzig::{DantzigFit, GammaFit, StabilizedDesign, Tuning};
use crate::error::{Error, Estimator, Result};
use crate::numerics::{DenseMatrix, dot, norm2, normal_cdf, normal_quantile, normal_sf};
use crate::synthesize::{Hypothesis, SynthFeaturesUnknown, decompose_known, decompose_unknown};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    KnownSigma,
    UnknownSigma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: Method,
    pub statistic: f64,
    /// Two-sided `2(1 - Φ(|statistic|))`.
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub diagnostics: Option<DantzigFit>,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange(alpha));
    }
    Ok(())
}

/// `Φ⁻¹(1 - α/2)`.
pub fn critical_value(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    normal_quantile(1.0 - alpha / 2.0)
}

impl TestReport {
    fn new(method: Method, statistic: f64, alpha: f64, diagnostics: Option<DantzigFit>) -> Result<Self> {
        let crit = critical_value(alpha)?;
        Ok(Self {
            method,
            statistic,
            p_value: (2.0 * normal_sf(statistic.abs())).min(1.0),
            reject: statistic.abs() > crit,
            alpha,
            diagnostics,
        })
    }
}

fn check_response(x: &DenseMatrix, y: &[f64]) -> Result<()> {
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            what: "response vs design rows",
            expected: x.rows(),
            found: y.len(),
        });
    }
    if x.rows() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: x.rows() });
    }
    Ok(())
}

/// Studentized moment statistic from `l_i = z_i (y_i - z_i g₀)`.
pub fn known_sigma_statistic(z: &[f64], y: &[f64], g0: f64) -> Result<f64> {
    let n = z.len() as f64;
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for (&zi, &yi) in z.iter().zip(y) {
        let l = zi * (yi - zi * g0);
        sum += l;
        sum_sq += l * l;
    }
    if !(sum_sq > 0.0) {
        return Err(Error::DegenerateStatistic);
    }
    Ok((sum / n.sqrt()) / (sum_sq / n).sqrt())
}

pub fn test_known_sigma(x: &DenseMatrix, y: &[f64], sigma: &DenseMatrix, hyp: &Hypothesis, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    check_response(x, y)?;
    let f = decompose_known(x, &hyp.a, sigma)?;
    let t = known_sigma_statistic(&f.z, y, hyp.g0)?;
    TestReport::new(Method::KnownSigma, t, alpha, None)
}

/// Unknown-Σ test prepared for one `(X, Y, a)`. The γ fit and `W̃ᵀW̃` do not
/// depend on g₀ and are computed once; each [`test`](Self::test) call fits
/// only the (π, ρ) program.
#[derive(Debug, Clone)]
pub struct UnknownSigmaTester {
    z: Vec<f64>,
    design: StabilizedDesign,
    y: Vec<f64>,
    tuning: Tuning,
    gamma: GammaFit,
    /// `Z - W̃γ̂`.
    z_resid: Vec<f64>,
}

impl UnknownSigmaTester {
    pub fn new(x: &DenseMatrix, y: &[f64], a: &[f64], tuning: Tuning) -> Result<Self> {
        check_response(x, y)?;
        let SynthFeaturesUnknown { z, w_tilde, .. } = decompose_unknown(x, a)?;
        let design = StabilizedDesign::new(w_tilde);
        let gamma = design.fit_gamma(&z, &tuning)?;
        if !gamma.feasible {
            return Err(Error::InfeasibleEstimator(Estimator::Gamma));
        }
        let z_resid = design.residual(&z, &gamma.gamma)?;
        Ok(Self {
            z,
            design,
            y: y.to_vec(),
            tuning,
            gamma,
            z_resid,
        })
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn design(&self) -> &StabilizedDesign {
        &self.design
    }

    pub fn gamma(&self) -> &GammaFit {
        &self.gamma
    }

    pub fn null_adjusted(&self, g0: f64) -> Vec<f64> {
        self.y.iter().zip(&self.z).map(|(y, z)| y - z * g0).collect()
    }

    /// `S_n` at `g0` together with the fit behind it.
    pub fn statistic(&self, g0: f64) -> Result<(f64, DantzigFit)> {
        let v = self.null_adjusted(g0);
        let design = &self.design;
        let fit = design.fit_with_gamma(&v, &self.z, &self.gamma, &self.tuning)?;
        if !fit.pi_feasible {
            return Err(Error::InfeasibleEstimator(Estimator::PiRho));
        }
        let v_resid = design.residual(&v, &fit.pi_hat)?;
        let (nz, nv) = (norm2(&self.z_resid), norm2(&v_resid));
        if nz < 1e-12 || nv < 1e-12 {
            return Err(Error::DegenerateResidual);
        }
        let n = self.y.len() as f64;
        Ok((n.sqrt() * dot(&self.z_resid, &v_resid) / (nz * nv), fit))
    }

    pub fn test(&self, g0: f64, alpha: f64) -> Result<TestReport> {
        check_alpha(alpha)?;
        let (s, fit) = self.statistic(g0)?;
        TestReport::new(Method::UnknownSigma, s, alpha, Some(fit))
    }

    /// Root of the residual-correlation numerator, iterated from the least
    /// squares slope of `Y` on `Z`. Used only to center grids.
    pub fn plug_in_estimate(&self) -> f64 {
        let z = &self.z;
        let design = &self.design;
        let mut g = dot(z, &self.y) / dot(z, z);
        let denom = dot(&self.z_resid, z);
        if denom.abs() < 1e-12 {
            return g;
        }
        for _ in 0..5 {
            let v = self.null_adjusted(g);
            let Ok(pi) = design.fit_pi_rho(&v, &self.tuning) else { break };
            if !pi.feasible {
                break;
            }
            let Ok(fitted) = design.w_tilde().matvec(&pi.pi) else { break };
            let target: Vec<f64> = self.y.iter().zip(&fitted).map(|(y, f)| y - f).collect();
            let next = dot(&self.z_resid, &target) / denom;
            let done = (next - g).abs() <= 1e-10 * g.abs().max(1.0);
            g = next;
            if done {
                break;
            }
        }
        g
    }
}

pub fn test_unknown_sigma(x: &DenseMatrix, y: &[f64], hyp: &Hypothesis, alpha: f64, tuning: Tuning) -> Result<TestReport> {
    check_alpha(alpha)?;
    UnknownSigmaTester::new(x, y, &hyp.a, tuning)?.test(hyp.g0, alpha)
}

/// `Ψ_α(d) = Φ(-z + d) + Φ(-z - d)` with `z = Φ⁻¹(1 - α/2)`.
pub fn power_envelope(alpha: f64, d: f64) -> Result<f64> {
    let z = critical_value(alpha)?;
    Ok(normal_cdf(-z + d) + normal_cdf(-z - d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dantzig::default_tuning;
    use crate::numerics::rng::stream;
    use crate::numerics::{cholesky, toeplitz};
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn constant_summands() {
        let t = known_sigma_statistic(&[1.0; 4], &[2.0; 4], 1.0).unwrap();
        assert!((t - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cancelling_summands() {
        let t = known_sigma_statistic(&[1.0; 4], &[2.0, 0.0, 2.0, 0.0], 1.0).unwrap();
        assert_eq!(t, 0.0);
        let r = TestReport::new(Method::KnownSigma, t, 0.05, None).unwrap();
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject);
    }

    #[test]
    fn zero_summands_are_degenerate() {
        assert!(matches!(
            known_sigma_statistic(&[1.0; 3], &[1.0; 3], 1.0),
            Err(Error::DegenerateStatistic)
        ));
    }

    #[test]
    fn report_decision_matches_p_value() {
        for s in [-4.0, -1.96, -1.0, 0.0, 0.5, 1.959, 1.96, 2.5, 8.0] {
            for alpha in [0.01, 0.05, 0.1, 0.5] {
                let r = TestReport::new(Method::KnownSigma, s, alpha, None).unwrap();
                assert!((0.0..=1.0).contains(&r.p_value));
                let crit = critical_value(alpha).unwrap();
                if (s.abs() - crit).abs() > 1e-9 {
                    assert_eq!(r.reject, r.p_value < alpha, "s = {s}, alpha = {alpha}");
                }
            }
        }
    }

    #[test]
    fn alpha_is_validated() {
        let x = DenseMatrix::identity(3);
        let h = Hypothesis::new(vec![1.0, 0.0, 0.0], 0.0).unwrap();
        for alpha in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(test_known_sigma(&x, &[1.0, 2.0, 3.0], &x, &h, alpha).is_err());
        }
    }

    #[test]
    fn envelope_values() {
        assert!((power_envelope(0.05, 0.0).unwrap() - 0.05).abs() < 1e-12);
        assert!((power_envelope(0.1, 0.0).unwrap() - 0.1).abs() < 1e-12);
        assert!((power_envelope(0.05, 2.0).unwrap() - 0.5160).abs() < 5e-4);
        for d in [0.3, 1.0, 2.5, 5.0] {
            assert_eq!(power_envelope(0.05, d).unwrap(), power_envelope(0.05, -d).unwrap());
        }
        assert!(power_envelope(1.0, 1.0).is_err());
    }

    fn toeplitz_data(n: usize, p: usize, seed: u64) -> (DenseMatrix, Vec<f64>) {
        let mut rng = stream(seed, 0);
        let x = cholesky(&toeplitz(p, 0.4)).unwrap().sample_rows(n, &mut rng);
        let y = (0..n)
            .map(|i| {
                let e: f64 = StandardNormal.sample(&mut rng);
                0.8 * (x[(i, 0)] + x[(i, 1)]) + e
            })
            .collect();
        (x, y)
    }

    #[test]
    fn known_sigma_is_invariant_to_loading_scale() {
        let (x, y) = toeplitz_data(60, 8, 3);
        let sigma = toeplitz(8, 0.4);
        let a = vec![0.0, 1.0, 0.5, 0.0, 0.0, -1.0, 0.0, 0.0];
        let base = test_known_sigma(&x, &y, &sigma, &Hypothesis::new(a.clone(), 0.3).unwrap(), 0.05).unwrap();
        for c in [0.25, 3.0, 40.0] {
            let ca = a.iter().map(|v| c * v).collect();
            let r = test_known_sigma(&x, &y, &sigma, &Hypothesis::new(ca, c * 0.3).unwrap(), 0.05).unwrap();
            assert!((r.statistic - base.statistic).abs() < 1e-10);
        }
    }

    #[test]
    fn unknown_sigma_report_carries_fit() {
        let (x, y) = toeplitz_data(80, 30, 4);
        let mut a = vec![0.0; 30];
        a[1] = 1.0;
        let hyp = Hypothesis::new(a, 0.8).unwrap();
        let r = test_unknown_sigma(&x, &y, &hyp, 0.05, default_tuning(80, 30).unwrap()).unwrap();
        let fit = r.diagnostics.unwrap();
        assert!(fit.pi_feasible && fit.gamma_feasible);
        assert_eq!(fit.pi_hat.len(), 29);
        assert!(fit.sigma_eps_hat > 0.0 && fit.sigma_u_hat > 0.0);
        assert!(r.statistic.is_finite());
    }

    #[test]
    fn unknown_sigma_statistic_moves_with_g0() {
        let (x, y) = toeplitz_data(80, 30, 5);
        let mut a = vec![0.0; 30];
        a[1] = 1.0;
        let t = UnknownSigmaTester::new(&x, &y, &a, default_tuning(80, 30).unwrap()).unwrap();
        let at = |g: f64| t.statistic(g).unwrap().0;
        let far = 10.0 / (80f64).sqrt();
        assert!(at(0.8 - far) > 3.0);
        assert!(at(0.8 + far) < -3.0);
        let est = t.plug_in_estimate();
        assert!(at(est).abs() < 0.5, "S_n at plug-in = {}", at(est));
    }
}
