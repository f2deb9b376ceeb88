use super::matrix::{DenseMatrix, dot};
use crate::error::{Error, Result};

/// Orthonormal basis of the orthogonal complement of `a`.
///
/// Builds the Householder reflector `H = I - 2 v vᵀ / (vᵀ v)` with
/// `v = a + s ‖a‖ e₁`, `s = sign(a₁)` and `s = +1` when `a₁ = 0`. `H` maps
/// `a` to `-s ‖a‖ e₁`, so its first column is parallel to `a` and the
/// remaining `p - 1` columns span the complement. Those columns are returned
/// as a `p × (p-1)` matrix `U` with `UᵀU = I` and `U Uᵀ = I - a aᵀ / (aᵀa)`.
pub fn householder_complement(a: &[f64]) -> Result<DenseMatrix> {
    let p = a.len();
    let norm = dot(a, a).sqrt();
    if !(norm > 0.0) {
        return Err(Error::ZeroLoading);
    }
    let sign = if a[0] < 0.0 { -1.0 } else { 1.0 };
    let mut v = a.to_vec();
    v[0] += sign * norm;
    let vtv = dot(&v, &v);
    let scale = 2.0 / vtv;
    Ok(DenseMatrix::from_fn(p, p - 1, |i, j| {
        let col = j + 1;
        let delta = if i == col { 1.0 } else { 0.0 };
        delta - scale * v[i] * v[col]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_identities(a: &[f64], tol: f64) {
        let p = a.len();
        let u = householder_complement(a).unwrap();
        assert_eq!((u.rows(), u.cols()), (p, p - 1));
        let utu = u.gram();
        assert!(utu.max_abs_diff(&DenseMatrix::identity(p - 1)) < tol);
        let uut = u.matmul(&u.transpose()).unwrap();
        let ata = dot(a, a);
        let proj = DenseMatrix::from_fn(p, p, |i, j| (if i == j { 1.0 } else { 0.0 }) - a[i] * a[j] / ata);
        assert!(uut.max_abs_diff(&proj) < tol);
    }

    #[test]
    fn first_basis_vector_gives_shifted_identity() {
        let u = householder_complement(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let expected = DenseMatrix::from_fn(4, 3, |i, j| if i == j + 1 { 1.0 } else { 0.0 });
        assert_eq!(u, expected);
    }

    #[test]
    fn all_ones_projection() {
        check_identities(&[1.0, 1.0, 1.0], 1e-12);
    }

    #[test]
    fn negative_and_zero_leading_entry() {
        check_identities(&[-2.0, 1.0, 0.5, 3.0], 1e-12);
        check_identities(&[0.0, 1.0, -1.0], 1e-12);
        check_identities(&[0.0, 0.0, 0.0, 1e-3], 1e-12);
    }

    #[test]
    fn zero_vector_is_rejected() {
        assert!(matches!(householder_complement(&[0.0; 3]), Err(Error::ZeroLoading)));
    }

    #[test]
    fn pairwise_contrast_first_column() {
        // a = e1 - e2: the first complement direction is (e1 + e2)/√2.
        let u = householder_complement(&[1.0, -1.0, 0.0]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u[(0, 0)] - h).abs() < 1e-15);
        assert!((u[(1, 0)] - h).abs() < 1e-15);
        assert_eq!(u[(2, 0)], 0.0);
    }

    #[test]
    fn deterministic() {
        let a = [0.3, -1.7, 2.2, 0.0, 5.5];
        let u1 = householder_complement(&a).unwrap();
        let u2 = householder_complement(&a).unwrap();
        assert!(u1.as_slice().iter().zip(u2.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
}
