use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::{DenseMatrix, dot};
use crate::error::{Error, Result};

/// Relative pivot tolerance against the largest diagonal entry.
const PIVOT_TOL: f64 = 1e-12;

/// Lower-triangular Cholesky factor `L` with `L Lᵀ = Σ`.
///
/// Only the lower triangle is stored, packed row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular {
    dim: usize,
    packed: Vec<f64>,
}

impl LowerTriangular {
    #[inline]
    fn offset(i: usize) -> usize {
        i * (i + 1) / 2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row `i` of the factor, entries `0..=i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let o = Self::offset(i);
        &self.packed[o..o + i + 1]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i { 0.0 } else { self.row(i)[j] }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }

    /// `L v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim).map(|i| dot(self.row(i), &v[..=i])).collect()
    }

    /// Solves `L y = b` by forward substitution.
    pub fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        for i in 0..self.dim {
            let r = self.row(i);
            y[i] = (b[i] - dot(&r[..i], &y[..i])) / r[i];
        }
        y
    }

    /// Solves `Lᵀ x = y` by back substitution.
    pub fn backward(&self, y: &[f64]) -> Vec<f64> {
        let mut x = y.to_vec();
        for i in (0..self.dim).rev() {
            let r = self.row(i);
            x[i] /= r[i];
            let xi = x[i];
            for (xj, &lij) in x[..i].iter_mut().zip(&r[..i]) {
                *xj -= lij * xi;
            }
        }
        x
    }

    /// Solves `L Lᵀ x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.backward(&self.forward(b))
    }

    /// Draws `rows` iid vectors `L g` with `g` standard normal, one per row.
    pub fn sample_rows<R: Rng + ?Sized>(&self, rows: usize, rng: &mut R) -> DenseMatrix {
        let p = self.dim;
        let mut out = DenseMatrix::zeros(rows, p);
        let mut g = vec![0.0; p];
        for i in 0..rows {
            for gj in g.iter_mut() {
                *gj = rng.sample(StandardNormal);
            }
            let dst = out.row_mut(i);
            for (j, d) in dst.iter_mut().enumerate() {
                *d = dot(self.row(j), &g[..=j]);
            }
        }
        out
    }
}

/// Cholesky factorization of a symmetric positive-definite matrix.
pub fn cholesky(sigma: &DenseMatrix) -> Result<LowerTriangular> {
    let p = sigma.rows();
    if p == 0 || sigma.cols() != p {
        return Err(Error::DimensionMismatch {
            what: "cholesky input (square, non-empty)",
            expected: p.max(1),
            found: sigma.cols(),
        });
    }
    let max_diag = (0..p).map(|i| sigma[(i, i)]).fold(0.0, f64::max);
    let tol = PIVOT_TOL * max_diag;
    let mut packed = vec![0.0; p * (p + 1) / 2];
    for i in 0..p {
        let oi = LowerTriangular::offset(i);
        for j in 0..=i {
            let oj = LowerTriangular::offset(j);
            let s = dot(&packed[oi..oi + j], &packed[oj..oj + j]);
            if i == j {
                let pivot = sigma[(i, i)] - s;
                if !(pivot > tol) {
                    return Err(Error::NotPositiveDefinite { index: i, pivot });
                }
                packed[oi + i] = pivot.sqrt();
            } else {
                packed[oi + j] = (sigma[(i, j)] - s) / packed[oj + j];
            }
        }
    }
    Ok(LowerTriangular { dim: p, packed })
}

/// Solves `sigma x = b` for symmetric positive-definite `sigma`.
pub fn solve_spd(sigma: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != sigma.rows() {
        return Err(Error::DimensionMismatch {
            what: "right-hand side",
            expected: sigma.rows(),
            found: b.len(),
        });
    }
    Ok(cholesky(sigma)?.solve(b))
}

/// `Σ_{ij} = rho^{|i-j|}`.
pub fn toeplitz(p: usize, rho: f64) -> DenseMatrix {
    DenseMatrix::from_fn(p, p, |i, j| rho.powi(i.abs_diff(j) as i32))
}

/// Unit diagonal with constant off-diagonal `rho`.
pub fn equicorrelation(p: usize, rho: f64) -> DenseMatrix {
    DenseMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { rho })
}
