//! Small dense helpers used by the oracles.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest matrix dimension accepted by [`expm`].
pub const MAX_EXPM_DIM: usize = 256;

/// `exp(A)` by scaling and squaring with a degree-18 Taylor core.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if n > MAX_EXPM_DIM {
        return Err(Error::SizeGuard { what: "dense expm dimension", limit: MAX_EXPM_DIM, got: n });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("matrix exponential of non-finite matrix".into()));
    }
    // infinity norm
    let norm = (0..n).map(|r| a.row(r).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as u32 } else { 0 };
    let scaled = a / 2f64.powi(squarings as i32);
    let mut result = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=18 {
        term = &term * &scaled / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_rotation() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.0]));
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)] - 1f64.exp()).abs() < 1e-14);
        assert!((e[(1, 1)] - (-2f64).exp()).abs() < 1e-15);

        let t = 3.0;
        let gen = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        let r = expm(&gen).unwrap();
        assert!((r[(0, 0)] - t.cos()).abs() < 1e-14);
        assert!((r[(1, 0)] - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn rejects_large() {
        assert!(expm(&DMatrix::zeros(257, 257)).is_err());
    }
}
