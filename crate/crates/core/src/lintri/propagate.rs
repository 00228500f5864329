use super::{check_tau, eig_tridiag, EigenDecomposition, KrylovState, TridiagonalOperator};
use crate::error::Result;
use crate::scalar::{norm, scale, Scalar};

/// Normalized `exp(-T tau) e_0`, see [`Propagator`].
pub fn expm_action<T: Scalar>(t: &TridiagonalOperator<T>, tau: T) -> Result<KrylovState<T>> {
    check_tau(tau)?;
    Propagator::new(t)?.propagate(tau)
}

/// Eigendecomposition route with a guard for lost spectral weight.
///
/// An absolute rounding error of order epsilon in any `Q_{0k}` moves the
/// shifted, unnormalized vector by at most about `sqrt(dim) * eps`. When
/// the vector itself is not much larger than that (localized low modes
/// with tiny overlap on `e_0`), the result comes from
/// [`PositivePropagator`] instead.
#[derive(Debug, Clone)]
pub struct Propagator<T> {
    spectral: SpectralPropagator<T>,
    positive: PositivePropagator<T>,
}

/// Largest tolerated `sqrt(dim) * eps / |v|` before falling back.
const SPECTRAL_LOSS_BOUND: f64 = 1e-14;

impl<T: Scalar> Propagator<T> {
    pub fn new(t: &TridiagonalOperator<T>) -> Result<Self> {
        Ok(Self { spectral: SpectralPropagator::new(t)?, positive: PositivePropagator::new(t) })
    }

    pub fn eigen(&self) -> &EigenDecomposition<T> {
        self.spectral.eigen()
    }

    pub fn propagate(&self, tau: T) -> Result<KrylovState<T>> {
        check_tau(tau)?;
        let (psi, nrm) = self.spectral.shifted(tau);
        let dim = T::from_usize_lossy(psi.len());
        if dim.sqrt() * T::epsilon() > T::lit(SPECTRAL_LOSS_BOUND) * nrm {
            return self.positive.propagate(tau);
        }
        let mut psi = psi;
        scale(T::one() / nrm, &mut psi);
        Ok(KrylovState { tau, psi })
    }
}

/// Imaginary-time propagator built on a cached eigendecomposition.
///
/// The spectrum is shifted by its minimum before exponentiation, so no
/// factor exceeds one. Accuracy is normwise: spectral weights `Q_{0k}^2`
/// below machine epsilon are not resolved, which matters once
/// `tau * spread` amplifies them (see [`PositivePropagator`]).
#[derive(Debug, Clone)]
pub struct SpectralPropagator<T> {
    eig: EigenDecomposition<T>,
}

impl<T: Scalar> SpectralPropagator<T> {
    pub fn new(t: &TridiagonalOperator<T>) -> Result<Self> {
        Ok(Self { eig: eig_tridiag(t)? })
    }

    pub fn eigen(&self) -> &EigenDecomposition<T> {
        &self.eig
    }

    pub fn propagate(&self, tau: T) -> Result<KrylovState<T>> {
        check_tau(tau)?;
        let (mut psi, nrm) = self.shifted(tau);
        scale(T::one() / nrm, &mut psi);
        Ok(KrylovState { tau, psi })
    }

    // exp(-(T - lambda_min) tau) e_0 and its norm
    fn shifted(&self, tau: T) -> (Vec<T>, T) {
        let lmin = self.eig.values()[0];
        let psi = self.combine(|lambda| (-(lambda - lmin) * tau).exp());
        let nrm = norm(&psi);
        (psi, nrm)
    }

    /// `exp(-T tau) e_0` without shift or normalization; overflows for
    /// large `tau |lambda_min|`.
    pub fn propagate_unnormalized(&self, tau: T) -> Result<Vec<T>> {
        check_tau(tau)?;
        Ok(self.combine(|lambda| (-lambda * tau).exp()))
    }

    fn combine(&self, weight: impl Fn(T) -> T) -> Vec<T> {
        let n = self.eig.dim();
        let mut out = vec![T::zero(); n];
        for (k, &lambda) in self.eig.values().iter().enumerate() {
            let w = weight(lambda) * self.eig.component(0, k);
            for (o, &q) in out.iter_mut().zip(self.eig.vector(k)) {
                *o = *o + w * q;
            }
        }
        out
    }
}

/// Imaginary-time propagator that keeps every intermediate quantity
/// nonnegative.
///
/// With `D = diag((-1)^n)` the gauge-transformed generator
/// `M = c I - D T D` (`c = max a_n`) is entrywise nonnegative because
/// `b_n > 0`. Then `exp(-T tau) e_0 ∝ D exp(tau M) e_0` is expanded as a
/// Poisson-weighted series in `P = M / Lambda` (uniformization). No sum
/// cancels, so each amplitude carries a componentwise relative error of
/// a few hundred ulps at most, including amplitudes fed by spectral
/// weights far below machine epsilon.
#[derive(Debug, Clone)]
pub struct PositivePropagator<T> {
    diag: Vec<T>,
    offdiag: Vec<T>,
    rate: T,
}

impl<T: Scalar> PositivePropagator<T> {
    pub fn new(t: &TridiagonalOperator<T>) -> Self {
        let c = t.diag().iter().fold(T::neg_infinity(), |m, &a| m.max(a));
        let diag: Vec<T> = t.diag().iter().map(|&a| c - a).collect();
        let offdiag = t.offdiag().to_vec();
        let n = diag.len();
        let mut rate = T::zero();
        for i in 0..n {
            let mut row = diag[i];
            if i > 0 {
                row = row + offdiag[i - 1];
            }
            if i + 1 < n {
                row = row + offdiag[i];
            }
            rate = rate.max(row);
        }
        Self { diag, offdiag, rate }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn propagate(&self, tau: T) -> Result<KrylovState<T>> {
        check_tau(tau)?;
        let n = self.dim();
        let mu = tau * self.rate;
        if mu == T::zero() {
            return Ok(KrylovState { tau, ..KrylovState::initial(n) });
        }

        // invariant: P^k e_0 = exp(cur_log) * cur, sum = exp(acc_log) * acc
        let mut cur = vec![T::zero(); n];
        cur[0] = T::one();
        let mut cur_log = T::zero();
        let mut next = vec![T::zero(); n];
        let mut acc = vec![T::zero(); n];
        let mut acc_log = T::neg_infinity();
        let mut log_pk = -mu;
        let ln_mu = mu.ln();
        let cutoff = T::lit(-40.0);
        let inv_rate = T::one() / self.rate;
        let max_terms = (mu + T::lit(60.0) * mu.sqrt() + T::lit(200.0))
            .to_usize()
            .unwrap_or(usize::MAX);

        let mut k = 0usize;
        loop {
            let lw = log_pk + cur_log;
            if lw > acc_log {
                let rescale = (acc_log - lw).exp();
                for a in acc.iter_mut() {
                    *a = *a * rescale;
                }
                acc_log = lw;
            }
            let w = (lw - acc_log).exp();
            for (a, &c) in acc.iter_mut().zip(&cur) {
                *a = *a + w * c;
            }

            let kf = T::from_usize_lossy(k + 1);
            // Poisson tail beyond k is below p_{k+1} / (1 - mu / (k + 2)).
            if kf > mu + T::one() {
                let tail = log_pk + ln_mu - kf.ln() + cur_log
                    - (T::one() - mu / (kf + T::one())).ln();
                let acc_max = acc.iter().fold(T::zero(), |m, &a| m.max(a));
                if tail - acc_log - acc_max.ln() < cutoff || k >= max_terms {
                    break;
                }
            }

            for i in 0..n {
                let mut v = self.diag[i] * cur[i];
                if i > 0 {
                    v = v + self.offdiag[i - 1] * cur[i - 1];
                }
                if i + 1 < n {
                    v = v + self.offdiag[i] * cur[i + 1];
                }
                next[i] = v * inv_rate;
            }
            std::mem::swap(&mut cur, &mut next);
            let m = cur.iter().fold(T::zero(), |m, &x| m.max(x));
            if m == T::zero() {
                break;
            }
            scale(T::one() / m, &mut cur);
            cur_log = cur_log + m.ln();
            k += 1;
            log_pk = log_pk + ln_mu - T::from_usize_lossy(k).ln();
        }

        let nrm = norm(&acc);
        let mut psi = acc;
        for (i, p) in psi.iter_mut().enumerate() {
            *p = *p / nrm;
            if i % 2 == 1 {
                *p = -*p;
            }
        }
        Ok(KrylovState { tau, psi })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> TridiagonalOperator<f64> {
        TridiagonalOperator::new(vec![0.0, 0.0], vec![1.0]).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let t = TridiagonalOperator::<f64>::new(vec![1.0, -2.0, 0.5], vec![0.3, 0.9]).unwrap();
        let s = expm_action(&t, 0.0).unwrap();
        assert!((s.psi[0] - 1.0).abs() < 1e-15);
        assert!(s.psi[1].abs() < 1e-15 && s.psi[2].abs() < 1e-15);
        let p = PositivePropagator::new(&t).propagate(0.0).unwrap();
        assert_eq!(p.psi, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn two_level_closed_form() {
        // exp(-X) e0 = (cosh 1, -sinh 1)
        let c = 1f64.cosh();
        let s = 1f64.sinh();
        let n = (2f64).cosh().sqrt();
        let want = [c / n, -s / n];
        let a = expm_action(&pauli_x(), 1.0).unwrap();
        let b = PositivePropagator::new(&pauli_x()).propagate(1.0).unwrap();
        for i in 0..2 {
            assert!((a.psi[i] - want[i]).abs() < 1e-14);
            assert!((b.psi[i] - want[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_tau_rejected() {
        assert!(expm_action(&pauli_x(), -0.1).is_err());
        assert!(PositivePropagator::new(&pauli_x()).propagate(-0.1).is_err());
        assert!(expm_action(&pauli_x(), f64::NAN).is_err());
    }

    #[test]
    fn single_site_operator() {
        let t = TridiagonalOperator::<f64>::new(vec![4.0], vec![]).unwrap();
        assert_eq!(expm_action(&t, 3.0).unwrap().psi, vec![1.0]);
        assert_eq!(PositivePropagator::new(&t).propagate(3.0).unwrap().psi, vec![1.0]);
    }

    #[test]
    fn large_spread_does_not_overflow() {
        let t = TridiagonalOperator::<f64>::new(vec![0.0, 500.0, 1000.0], vec![1.0, 1.0]).unwrap();
        for tau in [0.0, 1.0, 10.0] {
            let s = expm_action(&t, tau).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            let p = PositivePropagator::new(&t).propagate(tau).unwrap();
            assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
            for (x, y) in s.psi.iter().zip(&p.psi) {
                assert!((x - y).abs() < 1e-12, "tau={tau}: {x} vs {y}");
            }
        }
    }
}
