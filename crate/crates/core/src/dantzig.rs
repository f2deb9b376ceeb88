//! The two constrained l1 estimators behind the unknown-covariance test.
//!
//! Writing `V = Y - Z g₀`, the joint selector solves
//!
//! ```text
//! min ‖π‖₁  over (π, ρ)
//! s.t. ‖W̃ᵀ(V - W̃π)‖∞ ≤ η ρ √n ‖V‖₂
//!      Vᵀ(V - W̃π) ≥ ρ₀ ρ ‖V‖₂² / 2
//!      ρ₀ ≤ ρ ≤ 1
//! ```
//!
//! and the second selector solves `min ‖γ‖₁` subject to
//! `‖W̃ᵀ(Z - W̃γ)‖∞ ≤ λ √n ‖Z‖₂`. Both are assembled as linear programs over
//! `(c, π, ρ)` and `(c, γ)` with `-c ≤ π ≤ c`, and solved by [`solve_lp`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{LpProblem, LpStatus, Relation, solve_lp};
use crate::numerics::{DenseMatrix, dot, norm_inf, norm2};

/// Scale-free tuning constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tuning {
    pub eta: f64,
    pub lambda: f64,
    pub rho0: f64,
}

impl Tuning {
    pub fn new(eta: f64, lambda: f64, rho0: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) || !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "eta and lambda must be positive, got {eta} and {lambda}"
            )));
        }
        if !(rho0 > 0.0 && rho0 < 1.0) {
            return Err(Error::InvalidParameter(format!("rho0 must lie in (0, 1), got {rho0}")));
        }
        Ok(Self { eta, lambda, rho0 })
    }
}

/// `η = λ = √(2 log p / n)` and `ρ₀ = 0.01`.
pub fn default_tuning(n: usize, p: usize) -> Result<Tuning> {
    if n < 2 || p < 2 {
        return Err(Error::InvalidParameter(format!(
            "default tuning needs n >= 2 and p >= 2, got n = {n}, p = {p}"
        )));
    }
    let eta = (2.0 * (p as f64).ln() / n as f64).sqrt();
    Tuning::new(eta, eta, 0.01)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiRhoFit {
    pub pi: Vec<f64>,
    pub rho: f64,
    pub feasible: bool,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    pub gamma: Vec<f64>,
    pub feasible: bool,
    pub pivots: usize,
}

/// Estimates and residual scales from both selectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DantzigFit {
    pub pi_hat: Vec<f64>,
    pub rho_hat: f64,
    pub gamma_hat: Vec<f64>,
    /// `n^{-1/2} ‖V - W̃π̂‖₂`.
    pub sigma_eps_hat: f64,
    /// `n^{-1/2} ‖Z - W̃γ̂‖₂`.
    pub sigma_u_hat: f64,
    pub pi_feasible: bool,
    pub gamma_feasible: bool,
}

/// Stabilized design with its Gram matrix `W̃ᵀW̃`, computed once and shared
/// by both selectors.
#[derive(Debug, Clone)]
pub struct StabilizedDesign {
    w: DenseMatrix,
    gram: DenseMatrix,
}

impl StabilizedDesign {
    pub fn new(w_tilde: DenseMatrix) -> Self {
        let gram = w_tilde.gram();
        Self { w: w_tilde, gram }
    }

    pub fn w_tilde(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn gram(&self) -> &DenseMatrix {
        &self.gram
    }

    fn n(&self) -> usize {
        self.w.rows()
    }

    fn m(&self) -> usize {
        self.w.cols()
    }

    fn check_len(&self, v: &[f64], what: &'static str) -> Result<()> {
        if v.len() != self.n() {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.n(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Rows `±(D₁ - D₃x) ≤ bound` (plus `bound_coef · ρ` on the ρ column
    /// when present) and the absolute-value rows `±x - c ≤ 0`.
    fn push_common_rows(&self, lp: &mut LpProblem, d1: &[f64], rho_col: Option<(usize, f64)>, bound: f64) {
        let m = self.m();
        let nv = lp.num_vars();
        for j in 0..m {
            for s in [1.0, -1.0] {
                let mut row = vec![0.0; nv];
                row[m + j] = s;
                row[j] = -1.0;
                lp.add_constraint(row, Relation::Le, 0.0);
            }
        }
        for j in 0..m {
            let g = self.gram.row(j);
            // D₃x - D₂ρ ≤ D₁  and  -D₃x - D₂ρ ≤ -D₁.
            for s in [1.0, -1.0] {
                let mut row = vec![0.0; nv];
                for (r, &gv) in row[m..2 * m].iter_mut().zip(g) {
                    *r = s * gv;
                }
                let rhs = match rho_col {
                    Some((col, coef)) => {
                        row[col] = -coef;
                        s * d1[j]
                    }
                    None => s * d1[j] + bound,
                };
                lp.add_constraint(row, Relation::Le, rhs);
            }
        }
    }

    /// Assembles the joint (π, ρ) program. Variables are ordered
    /// `(c₁..c_m, π₁..π_m, ρ)`.
    pub fn pi_lp(&self, v: &[f64], tuning: &Tuning) -> Result<LpProblem> {
        self.check_len(v, "null-adjusted response")?;
        let m = self.m();
        let v_norm = norm2(v);
        if !(v_norm > 0.0) {
            return Err(Error::ZeroResidualVector);
        }
        let v_sq = v_norm * v_norm;
        let d1_scalar = tuning.rho0 * v_sq / 2.0;
        let d2_scalar = v_sq;
        let d1 = self.w.t_matvec(v)?;
        let d2 = (self.n() as f64).sqrt() * tuning.eta * v_norm;

        let mut objective = vec![0.0; 2 * m + 1];
        objective[..m].iter_mut().for_each(|c| *c = 1.0);
        let mut lp = LpProblem::new(objective);
        // c ≥ 0 is implied by -c ≤ π ≤ c; π is free; ρ ∈ [ρ₀, 1].
        for j in m..2 * m {
            lp.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
        }
        lp.set_bounds(2 * m, tuning.rho0, 1.0);

        self.push_common_rows(&mut lp, &d1, Some((2 * m, d2)), 0.0);
        let mut row = vec![0.0; 2 * m + 1];
        row[m..2 * m].copy_from_slice(&d1);
        row[2 * m] = d1_scalar;
        lp.add_constraint(row, Relation::Le, d2_scalar);
        Ok(lp)
    }

    /// Assembles the γ program. Variables are ordered `(c₁..c_m, γ₁..γ_m)`.
    pub fn gamma_lp(&self, z: &[f64], tuning: &Tuning) -> Result<LpProblem> {
        self.check_len(z, "synthesized feature")?;
        let m = self.m();
        let z_norm = norm2(z);
        if !(z_norm > 0.0) {
            return Err(Error::ZeroSynthesizedFeature);
        }
        let bound = (self.n() as f64).sqrt() * tuning.lambda * z_norm;
        let d1 = self.w.t_matvec(z)?;
        let mut objective = vec![0.0; 2 * m];
        objective[..m].iter_mut().for_each(|c| *c = 1.0);
        let mut lp = LpProblem::new(objective);
        for j in m..2 * m {
            lp.set_bounds(j, f64::NEG_INFINITY, f64::INFINITY);
        }
        self.push_common_rows(&mut lp, &d1, None, bound);
        Ok(lp)
    }

    pub fn fit_pi_rho(&self, v: &[f64], tuning: &Tuning) -> Result<PiRhoFit> {
        let m = self.m();
        let lp = self.pi_lp(v, tuning)?;
        let sol = solve_lp(&lp)?;
        Ok(match sol.status {
            LpStatus::Optimal => PiRhoFit {
                pi: sol.x[m..2 * m].to_vec(),
                rho: sol.x[2 * m],
                feasible: true,
                pivots: sol.pivots,
            },
            // The objective is bounded below by zero, so anything but
            // Optimal means the constraint set is empty.
            LpStatus::Infeasible | LpStatus::Unbounded => PiRhoFit {
                pi: Vec::new(),
                rho: f64::NAN,
                feasible: false,
                pivots: sol.pivots,
            },
        })
    }

    pub fn fit_gamma(&self, z: &[f64], tuning: &Tuning) -> Result<GammaFit> {
        let m = self.m();
        let lp = self.gamma_lp(z, tuning)?;
        let sol = solve_lp(&lp)?;
        Ok(match sol.status {
            LpStatus::Optimal => GammaFit {
                gamma: sol.x[m..].to_vec(),
                feasible: true,
                pivots: sol.pivots,
            },
            LpStatus::Infeasible | LpStatus::Unbounded => GammaFit {
                gamma: Vec::new(),
                feasible: false,
                pivots: sol.pivots,
            },
        })
    }

    /// `target - W̃ coef`.
    pub fn residual(&self, target: &[f64], coef: &[f64]) -> Result<Vec<f64>> {
        let fitted = self.w.matvec(coef)?;
        Ok(target.iter().zip(&fitted).map(|(t, f)| t - f).collect())
    }

    /// Largest violation of the joint selector's constraints at `(π, ρ)`,
    /// evaluated directly on the defining inequalities.
    pub fn pi_violation(&self, v: &[f64], pi: &[f64], rho: f64, tuning: &Tuning) -> Result<f64> {
        let v_norm = norm2(v);
        let resid = self.residual(v, pi)?;
        let corr = norm_inf(&self.w.t_matvec(&resid)?);
        let sqrt_n = (self.n() as f64).sqrt();
        let first = corr - tuning.eta * rho * sqrt_n * v_norm;
        let second = tuning.rho0 * rho * v_norm * v_norm / 2.0 - dot(v, &resid);
        let third = (tuning.rho0 - rho).max(rho - 1.0);
        Ok(first.max(second).max(third).max(0.0))
    }

    /// Largest violation of the γ selector's constraint.
    pub fn gamma_violation(&self, z: &[f64], gamma: &[f64], tuning: &Tuning) -> Result<f64> {
        let resid = self.residual(z, gamma)?;
        let corr = norm_inf(&self.w.t_matvec(&resid)?);
        let bound = (self.n() as f64).sqrt() * tuning.lambda * norm2(z);
        Ok((corr - bound).max(0.0))
    }

    /// Runs both selectors and computes the residual scales.
    pub fn fit(&self, v: &[f64], z: &[f64], tuning: &Tuning) -> Result<DantzigFit> {
        let gamma = self.fit_gamma(z, tuning)?;
        self.fit_with_gamma(v, z, &gamma, tuning)
    }

    /// Like [`fit`](Self::fit) but reuses a γ fit, which does not depend on g₀.
    pub fn fit_with_gamma(&self, v: &[f64], z: &[f64], gamma: &GammaFit, tuning: &Tuning) -> Result<DantzigFit> {
        let pi = self.fit_pi_rho(v, tuning)?;
        let sqrt_n = (self.n() as f64).sqrt();
        let sigma_eps_hat = if pi.feasible {
            norm2(&self.residual(v, &pi.pi)?) / sqrt_n
        } else {
            f64::NAN
        };
        let sigma_u_hat = if gamma.feasible {
            norm2(&self.residual(z, &gamma.gamma)?) / sqrt_n
        } else {
            f64::NAN
        };
        Ok(DantzigFit {
            pi_hat: pi.pi,
            rho_hat: pi.rho,
            gamma_hat: gamma.gamma.clone(),
            sigma_eps_hat,
            sigma_u_hat,
            pi_feasible: pi.feasible,
            gamma_feasible: gamma.feasible,
        })
    }
}

pub fn build_pi_lp(w_tilde: &DenseMatrix, v: &[f64], tuning: &Tuning) -> Result<LpProblem> {
    StabilizedDesign::new(w_tilde.clone()).pi_lp(v, tuning)
}

pub fn fit_pi_rho(w_tilde: &DenseMatrix, v: &[f64], tuning: &Tuning) -> Result<PiRhoFit> {
    StabilizedDesign::new(w_tilde.clone()).fit_pi_rho(v, tuning)
}

pub fn fit_gamma(w_tilde: &DenseMatrix, z: &[f64], tuning: &Tuning) -> Result<GammaFit> {
    StabilizedDesign::new(w_tilde.clone()).fit_gamma(z, tuning)
}
