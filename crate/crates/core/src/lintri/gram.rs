use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, norm, scale, Scalar};

/// Relative residual below which a vector counts as dependent.
pub const DEPENDENCE_TOLERANCE: f64 = 1e-12;

/// Two-pass classical Gram-Schmidt.
///
/// Fails with [`Error::LinearDependence`] carrying the index of the first
/// vector whose residual after projection drops below
/// `DEPENDENCE_TOLERANCE` times its original norm.
pub fn orthonormalize<T: Scalar>(vectors: &[Vec<T>]) -> Result<Vec<Vec<T>>> {
    let Some(first) = vectors.first() else {
        return Ok(Vec::new());
    };
    let len = first.len();
    let tol = T::lit(DEPENDENCE_TOLERANCE).max(T::epsilon() * T::lit(16.0));
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        if v.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: v.len() });
        }
        let original = norm(v);
        let mut w = v.clone();
        for _ in 0..2 {
            let coeffs: Vec<T> = basis.iter().map(|q| dot(q, &w)).collect();
            for (q, c) in basis.iter().zip(coeffs) {
                axpy(-c, q, &mut w);
            }
        }
        let residual = norm(&w);
        if !(residual > tol * original) {
            return Err(Error::LinearDependence { index });
        }
        scale(T::one() / residual, &mut w);
        basis.push(w);
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-14)
    }

    #[test]
    fn already_orthogonal_pair_is_normalized() {
        let q = orthonormalize(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert!(close(&q[0], &[1.0, 0.0]));
        assert!(close(&q[1], &[0.0, 1.0]));
    }

    #[test]
    fn textbook_plane() {
        let q = orthonormalize(&[vec![1.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(&q[0], &[h, h]));
        assert!(close(&q[1], &[h, -h]));
    }

    #[test]
    fn near_parallel_vector_is_dependent() {
        let err = orthonormalize(&[vec![1.0, 0.0], vec![1.0, 1e-15]]).unwrap_err();
        assert_eq!(err, Error::LinearDependence { index: 1 });
    }

    #[test]
    fn zero_vector_is_dependent() {
        let err = orthonormalize(&[vec![0.0, 0.0]]).unwrap_err();
        assert_eq!(err, Error::LinearDependence { index: 0 });
    }

    #[test]
    fn ragged_input_rejected() {
        assert!(matches!(
            orthonormalize(&[vec![1.0, 0.0], vec![1.0]]),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
