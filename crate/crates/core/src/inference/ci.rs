use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{UnknownSigmaTester, check_alpha, check_response, critical_value, known_sigma_statistic};
use crate::dantzig::Tuning;
use crate::error::{Error, Result};
use crate::numerics::{DenseMatrix, dot, norm2};
use crate::synthesize::decompose_known;

/// Which test to invert.
#[derive(Debug, Clone, Copy)]
pub enum CiMethod<'a> {
    KnownSigma(&'a DenseMatrix),
    UnknownSigma(Tuning),
}

/// Evenly spaced g₀ values `center + k·step` covering
/// `[center - half_width, center + half_width]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub center: f64,
    pub half_width: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.step.is_finite()) || !(self.half_width >= 0.0) || !self.center.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid needs step > 0 and half_width >= 0, got step {} and half_width {}",
                self.step, self.half_width
            )));
        }
        let k = (self.half_width / self.step + 1e-9).floor() as i64;
        Ok((-k..=k).map(|i| self.center + i as f64 * self.step).collect())
    }
}

/// 401 points over `center ± 10‖a‖₂/√n`.
pub fn default_grid(center: f64, a: &[f64], n: usize) -> Grid {
    let half_width = 10.0 * norm2(a) / (n as f64).sqrt();
    Grid {
        center,
        half_width,
        step: half_width / 200.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub grid_resolution: f64,
    /// `false` when a rejected grid point lies between two accepted ones.
    pub contiguous: bool,
    pub accepted: usize,
    /// Grid points where an estimator was infeasible; excluded.
    pub undetermined: usize,
    pub grid_points: usize,
    /// Accepted points sit on the grid boundary, so the interval may be
    /// truncated.
    pub touches_boundary: bool,
}

/// Inverts the chosen test over a grid of g₀ values. Without a grid, the
/// default grid is centered on a plug-in estimate of `aᵀβ`.
pub fn confidence_interval(
    x: &DenseMatrix,
    y: &[f64],
    a: &[f64],
    alpha: f64,
    method: CiMethod<'_>,
    grid: Option<Grid>,
) -> Result<ConfidenceInterval> {
    check_alpha(alpha)?;
    check_response(x, y)?;
    let crit = critical_value(alpha)?;
    let n = x.rows();

    // None marks an undetermined grid point.
    let (grid, points, accept): (Grid, Vec<f64>, Vec<Option<bool>>) = match method {
        CiMethod::KnownSigma(sigma) => {
            let f = decompose_known(x, a, sigma)?;
            let center = dot(&f.z, y) / dot(&f.z, &f.z);
            let grid = grid.unwrap_or_else(|| default_grid(center, a, n));
            let points = grid.points()?;
            let accept = points
                .iter()
                .map(|&g| match known_sigma_statistic(&f.z, y, g) {
                    Ok(t) => Ok(Some(t.abs() <= crit)),
                    Err(Error::DegenerateStatistic) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<_>>()?;
            (grid, points, accept)
        }
        CiMethod::UnknownSigma(tuning) => {
            let tester = UnknownSigmaTester::new(x, y, a, tuning)?;
            let grid = grid.unwrap_or_else(|| default_grid(tester.plug_in_estimate(), a, n));
            let points = grid.points()?;
            let accept = points
                .par_iter()
                .map(|&g| match tester.statistic(g) {
                    Ok((s, _)) => Ok(Some(s.abs() <= crit)),
                    Err(Error::InfeasibleEstimator(_) | Error::DegenerateResidual | Error::ZeroResidualVector) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<_>>()?;
            (grid, points, accept)
        }
    };
    summarize(&points, &accept, 1.0 - alpha, grid.step)
}

fn summarize(points: &[f64], accept: &[Option<bool>], level: f64, step: f64) -> Result<ConfidenceInterval> {
    let accepted: Vec<usize> = (0..points.len()).filter(|&i| accept[i] == Some(true)).collect();
    let (Some(&first), Some(&last)) = (accepted.first(), accepted.last()) else {
        return Err(Error::EmptyAcceptanceRegion);
    };
    let contiguous = accept[first..=last].iter().all(|a| *a != Some(false));
    Ok(ConfidenceInterval {
        lower: points[first],
        upper: points[last],
        level,
        grid_resolution: step,
        contiguous,
        accepted: accepted.len(),
        undetermined: accept.iter().filter(|a| a.is_none()).count(),
        grid_points: points.len(),
        touches_boundary: points.len() > 1 && (first == 0 || last == points.len() - 1),
    })
}
