//! Real symmetric tridiagonal linear algebra: eigendecomposition,
//! imaginary-time propagation and Gram-Schmidt orthonormalization.

mod eig;
mod gram;
mod propagate;

pub use eig::{eig_tridiag, EigenDecomposition, MAX_SWEEPS_PER_EIGENVALUE};
pub use gram::{orthonormalize, DEPENDENCE_TOLERANCE};
pub use propagate::{expm_action, PositivePropagator, Propagator, SpectralPropagator};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real symmetric tridiagonal matrix with strictly positive off-diagonal.
///
/// `diag` holds `a_0..a_{dim-1}`, `offdiag` holds `b_1..b_{dim-1}`, so
/// `offdiag[n - 1]` couples sites `n - 1` and `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator<T> {
    diag: Vec<T>,
    offdiag: Vec<T>,
}

impl<T: Scalar> TridiagonalOperator<T> {
    pub fn new(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidTridiagonal("dimension must be at least 1".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidTridiagonal(format!(
                "{} off-diagonal entries for dimension {}",
                offdiag.len(),
                diag.len()
            )));
        }
        if let Some(i) = diag.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidTridiagonal(format!("diagonal entry {i} is not finite")));
        }
        if let Some(i) = offdiag.iter().position(|&x| !x.is_finite() || x <= T::zero()) {
            return Err(Error::InvalidTridiagonal(format!(
                "off-diagonal entry b_{} = {} is not strictly positive",
                i + 1,
                offdiag[i]
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[T] {
        &self.offdiag
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.diag
            .iter()
            .chain(&self.offdiag)
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Returns `T + c I`.
    pub fn shifted(&self, c: T) -> Self {
        Self {
            diag: self.diag.iter().map(|&a| a + c).collect(),
            offdiag: self.offdiag.clone(),
        }
    }

    /// `y = T x`
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(y.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc = acc + self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc = acc + self.offdiag[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    /// Dense row-major copy, for small-dimension checks.
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        let mut m = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.offdiag[i];
                m[i + 1][i] = self.offdiag[i];
            }
        }
        m
    }
}

/// Normalized amplitudes over the Krylov basis at imaginary time `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrylovState<T> {
    pub tau: T,
    pub psi: Vec<T>,
}

impl<T: Scalar> KrylovState<T> {
    /// The unevolved state `(1, 0, ..., 0)`.
    pub fn initial(dim: usize) -> Self {
        let mut psi = vec![T::zero(); dim];
        psi[0] = T::one();
        Self { tau: T::zero(), psi }
    }

    pub fn dim(&self) -> usize {
        self.psi.len()
    }

    pub fn norm_sqr(&self) -> T {
        self.psi.iter().map(|&p| p * p).sum()
    }

    /// Mean Krylov index `sum_n n psi_n^2`.
    pub fn complexity(&self) -> T {
        self.psi
            .iter()
            .enumerate()
            .map(|(n, &p)| T::from_usize_lossy(n) * p * p)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.psi.iter().map(|&p| p * p).collect()
    }
}

pub(crate) fn check_tau<T: Scalar>(tau: T) -> Result<()> {
    if tau >= T::zero() && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTau(tau.to_f64().unwrap_or(f64::NAN)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_offdiag() {
        assert!(TridiagonalOperator::new(vec![0.0, 0.0], vec![0.0]).is_err());
        assert!(TridiagonalOperator::new(vec![0.0, 0.0], vec![-1.0]).is_err());
        assert!(TridiagonalOperator::new(vec![0.0, f64::NAN], vec![1.0]).is_err());
        assert!(TridiagonalOperator::<f64>::new(vec![], vec![]).is_err());
        assert!(TridiagonalOperator::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let t = TridiagonalOperator::new(vec![1.0, 2.0, 3.0], vec![0.5, 0.25]).unwrap();
        let x = [1.0, -1.0, 2.0];
        let mut y = [0.0; 3];
        t.apply(&x, &mut y);
        let d = t.to_dense();
        for i in 0..3 {
            let e: f64 = (0..3).map(|j| d[i][j] * x[j]).sum();
            assert!((e - y[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn complexity_of_localized_states() {
        assert_eq!(KrylovState::<f64>::initial(5).complexity(), 0.0);
        let s = KrylovState { tau: 0.0, psi: vec![0.0, 0.0, 0.0, 1.0] };
        assert_eq!(s.complexity(), 3.0);
    }
}
