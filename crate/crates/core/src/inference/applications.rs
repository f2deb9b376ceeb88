//! Loading vectors for common hypotheses. Feature indices are 1-based.

use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

fn check_index(index: usize, p: usize) -> Result<()> {
    if index == 0 || index > p {
        return Err(Error::IndexOutOfRange { index, len: p });
    }
    Ok(())
}

/// `e_k - e_j`, for testing `β_k = β_j` with `g₀ = 0`.
pub fn pairwise_loading(k: usize, j: usize, p: usize) -> Result<Vec<f64>> {
    check_index(k, p)?;
    check_index(j, p)?;
    if k == j {
        return Err(Error::DuplicateIndex(k));
    }
    let mut a = vec![0.0; p];
    a[k - 1] = 1.0;
    a[j - 1] = -1.0;
    Ok(a)
}

/// Places weight `c[h]` on feature `group[h]`.
pub fn group_loading(c: &[f64], group: &[usize], p: usize) -> Result<Vec<f64>> {
    if c.is_empty() || c.len() != group.len() {
        return Err(Error::DimensionMismatch {
            what: "group weights vs group indices",
            expected: group.len(),
            found: c.len(),
        });
    }
    let mut a = vec![0.0; p];
    let mut seen = vec![false; p];
    for (&idx, &w) in group.iter().zip(c) {
        check_index(idx, p)?;
        if std::mem::replace(&mut seen[idx - 1], true) {
            return Err(Error::DuplicateIndex(idx));
        }
        a[idx - 1] = w;
    }
    Ok(a)
}

/// Polynomial dictionary: each raw coordinate contributes its powers
/// `1..=degree` as adjacent columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PowerDictionary {
    pub raw_dim: usize,
    pub degree: usize,
}

impl PowerDictionary {
    pub fn dim(&self) -> usize {
        self.raw_dim * self.degree
    }

    pub fn features(&self, point: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for &v in point {
            let mut pow = 1.0;
            for _ in 0..self.degree {
                pow *= v;
                out.push(pow);
            }
        }
        out
    }

    /// Loading for the conditional mean at `point`.
    pub fn loading_at(&self, point: &[f64]) -> Result<Vec<f64>> {
        if point.len() != self.raw_dim {
            return Err(Error::DimensionMismatch {
                what: "evaluation point",
                expected: self.raw_dim,
                found: point.len(),
            });
        }
        Ok(self.features(point))
    }
}

pub fn power_dictionary(zeta: &DenseMatrix, degree: usize) -> Result<(DenseMatrix, PowerDictionary)> {
    if degree == 0 {
        return Err(Error::InvalidParameter("dictionary degree must be at least 1".into()));
    }
    let dict = PowerDictionary {
        raw_dim: zeta.cols(),
        degree,
    };
    let mut data = Vec::with_capacity(zeta.rows() * dict.dim());
    for i in 0..zeta.rows() {
        data.extend(dict.features(zeta.row(i)));
    }
    Ok((DenseMatrix::from_row_major(zeta.rows(), dict.dim(), data)?, dict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dot, rng::stream};
    use crate::synthesize::decompose_unknown;
    use rand::Rng;

    #[test]
    fn pairwise() {
        assert_eq!(pairwise_loading(1, 2, 4).unwrap(), vec![1.0, -1.0, 0.0, 0.0]);
        assert_eq!(pairwise_loading(4, 2, 4).unwrap(), vec![0.0, -1.0, 0.0, 1.0]);
        assert!(matches!(pairwise_loading(3, 3, 5), Err(Error::DuplicateIndex(3))));
        assert!(matches!(pairwise_loading(0, 1, 5), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(pairwise_loading(1, 6, 5), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn pairwise_synthesized_feature() {
        let mut rng = stream(1, 0);
        let x = DenseMatrix::from_fn(7, 4, |_, _| rng.random_range(-3.0..3.0));
        let f = decompose_unknown(&x, &pairwise_loading(1, 2, 4).unwrap()).unwrap();
        for i in 0..7 {
            assert!((f.z[i] - (x[(i, 0)] - x[(i, 1)]) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn group() {
        let a = group_loading(&[1.0, 1.0, 1.0], &[1, 2, 3], 6).unwrap();
        assert_eq!(a, vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(group_loading(&[5.0], &[4], 6).unwrap(), vec![0.0, 0.0, 0.0, 5.0, 0.0, 0.0]);
        assert!(matches!(group_loading(&[1.0, 2.0], &[2, 2], 6), Err(Error::DuplicateIndex(2))));
        assert!(matches!(group_loading(&[1.0], &[7], 6), Err(Error::IndexOutOfRange { .. })));
        assert!(group_loading(&[1.0, 2.0], &[1], 6).is_err());
        assert!(group_loading(&[], &[], 6).is_err());
    }

    #[test]
    fn group_complement_identities() {
        let mut rng = stream(2, 0);
        let x = DenseMatrix::from_fn(9, 6, |_, _| rng.random_range(-3.0..3.0));
        let a = group_loading(&[1.0, 1.0, 1.0], &[1, 2, 3], 6).unwrap();
        let f = decompose_unknown(&x, &a).unwrap();
        for i in 0..9 {
            let mean = (x[(i, 0)] + x[(i, 1)] + x[(i, 2)]) / 3.0;
            assert!((f.z[i] - mean).abs() < 1e-14);
        }
        let u = &f.u_a;
        assert!(u.gram().max_abs_diff(&DenseMatrix::identity(5)) < 1e-12);
        let uut = u.matmul(&u.transpose()).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                let expected = match (r < 3, c < 3) {
                    (true, true) => (if r == c { 1.0 } else { 0.0 }) - 1.0 / 3.0,
                    _ if r == c => 1.0,
                    _ => 0.0,
                };
                assert!((uut[(r, c)] - expected).abs() < 1e-12);
            }
        }
        assert!(dot(&u.column(0), &a).abs() < 1e-12);
    }

    #[test]
    fn dictionary() {
        let zeta = DenseMatrix::from_rows(&[vec![2.0]]).unwrap();
        let (x, d) = power_dictionary(&zeta, 2).unwrap();
        assert_eq!(x.row(0), &[2.0, 4.0]);
        assert_eq!(d.loading_at(&[3.0]).unwrap(), vec![3.0, 9.0]);
        let zeta = DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0]]).unwrap();
        let (x, d) = power_dictionary(&zeta, 4).unwrap();
        assert_eq!(x.cols(), 8);
        assert_eq!(x.row(0), &[1.0, 1.0, 1.0, 1.0, -2.0, 4.0, -8.0, 16.0]);
        let zero = d.loading_at(&[0.0, 0.0]).unwrap();
        assert!(matches!(decompose_unknown(&x, &zero), Err(Error::ZeroLoading)));
        assert!(power_dictionary(&zeta, 0).is_err());
        assert!(d.loading_at(&[1.0]).is_err());
    }
}
