//! Dense linear algebra, normal distribution functions and the
//! Kolmogorov-Smirnov statistic used throughout the crate.

mod cholesky;
mod householder;
mod ks;
mod matrix;
mod normal;
pub mod rng;

pub use cholesky::{LowerTriangular, cholesky, equicorrelation, solve_spd, toeplitz};
pub use householder::householder_complement;
pub use ks::{KsResult, kolmogorov_sf, ks_test_standard_normal};
pub use matrix::{DenseMatrix, dot, norm_inf, norm1, norm2};
pub use normal::{normal_cdf, normal_pdf, normal_quantile, normal_sf};
