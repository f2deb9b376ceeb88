//! Hypothesis-driven feature synthesis.
//!
//! For `H₀: aᵀβ = g₀` every design row is split as `x_i = a z_i + w_i`, where
//! the scalar `z_i` carries the information about `aᵀβ`. With a known
//! covariance `Σ` the split uses `Ω a / (aᵀ Ω a)` (`Ω = Σ⁻¹`), which makes `z`
//! and `w` uncorrelated. Without it the split uses `a / (aᵀa)` and the
//! orthogonal part is rotated onto a `(p-1)`-dimensional basis `U_a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, dot, householder_complement, solve_spd};

/// Loading vector and hypothesized value of `H₀: aᵀβ = g₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub a: Vec<f64>,
    pub g0: f64,
}

impl Hypothesis {
    pub fn new(a: Vec<f64>, g0: f64) -> Result<Self> {
        if a.iter().any(|v| !v.is_finite()) || !g0.is_finite() {
            return Err(Error::InvalidParameter("hypothesis has non-finite entries".into()));
        }
        if !(dot(&a, &a) > 0.0) {
            return Err(Error::ZeroLoading);
        }
        Ok(Self { a, g0 })
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Same loading, different hypothesized value.
    pub fn with_g0(&self, g0: f64) -> Self {
        Self { a: self.a.clone(), g0 }
    }
}

/// Synthesized features under a known design covariance.
#[derive(Debug, Clone)]
pub struct SynthFeaturesKnown {
    pub z: Vec<f64>,
    /// Projection direction `Ω a / (aᵀ Ω a)`; `z = X b`.
    pub b: Vec<f64>,
    a: Vec<f64>,
}

impl SynthFeaturesKnown {
    /// Materializes `W` with rows `w_i = x_i - a z_i` (n × p).
    pub fn w(&self, x: &DenseMatrix) -> DenseMatrix {
        DenseMatrix::from_fn(x.rows(), x.cols(), |i, j| x[(i, j)] - self.a[j] * self.z[i])
    }
}

/// Synthesized and stabilized features without knowledge of `Σ`.
#[derive(Debug, Clone)]
pub struct SynthFeaturesUnknown {
    pub z: Vec<f64>,
    /// `W̃ = X U_a`, n × (p-1).
    pub w_tilde: DenseMatrix,
    /// Orthonormal complement basis of `a`, p × (p-1).
    pub u_a: DenseMatrix,
}

fn check_dims(x: &DenseMatrix, a: &[f64]) -> Result<()> {
    if a.len() != x.cols() {
        return Err(Error::DimensionMismatch {
            what: "loading vector vs design columns",
            expected: x.cols(),
            found: a.len(),
        });
    }
    if !(dot(a, a) > 0.0) {
        return Err(Error::ZeroLoading);
    }
    Ok(())
}

/// `Ω a / (aᵀ Ω a)`; depends only on the population quantities, so callers
/// running many datasets can compute it once.
pub fn projection_direction(a: &[f64], sigma: &DenseMatrix) -> Result<Vec<f64>> {
    if sigma.rows() != a.len() || sigma.cols() != a.len() {
        return Err(Error::DimensionMismatch {
            what: "covariance vs loading length",
            expected: a.len(),
            found: sigma.rows(),
        });
    }
    if !(dot(a, a) > 0.0) {
        return Err(Error::ZeroLoading);
    }
    let omega_a = solve_spd(sigma, a)?;
    let quad = dot(a, &omega_a);
    if !(quad > 1e-12) {
        return Err(Error::DegenerateProjection(quad));
    }
    Ok(omega_a.iter().map(|v| v / quad).collect())
}

pub fn decompose_known(x: &DenseMatrix, a: &[f64], sigma: &DenseMatrix) -> Result<SynthFeaturesKnown> {
    check_dims(x, a)?;
    let b = projection_direction(a, sigma)?;
    let z = x.matvec(&b)?;
    Ok(SynthFeaturesKnown { z, b, a: a.to_vec() })
}

pub fn decompose_unknown(x: &DenseMatrix, a: &[f64]) -> Result<SynthFeaturesUnknown> {
    check_dims(x, a)?;
    if x.cols() < 2 || x.rows() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 and p >= 2, got n = {}, p = {}",
            x.rows(),
            x.cols()
        )));
    }
    let ata = dot(a, a);
    let scaled: Vec<f64> = a.iter().map(|v| v / ata).collect();
    let z = x.matvec(&scaled)?;
    let u_a = householder_complement(a)?;
    // U_aᵀ (I - a aᵀ / aᵀa) = U_aᵀ, so the projection can be skipped.
    let w_tilde = x.matmul(&u_a)?;
    Ok(SynthFeaturesUnknown { z, w_tilde, u_a })
}

/// `σ_z² = aᵀ Σ a / (aᵀa)²`, the population variance of the unknown-Σ
/// synthesized feature.
pub fn synthesized_variance(sigma: &DenseMatrix, a: &[f64]) -> Result<f64> {
    let sa = sigma.matvec(a)?;
    let ata = dot(a, a);
    Ok(dot(a, &sa) / (ata * ata))
}
