//! Imaginary-time observables in the Krylov basis.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lintri::{expm_action, KrylovState, Propagator, TridiagonalOperator};
use crate::models::{build_reduced_hamiltonian, KrylovSpec, ModelKind, ModelSpec, MAX_REDUCED_LENGTH};

/// Normalized `exp(-tau T) e_0` for the spec's tridiagonal.
pub fn propagate(spec: &KrylovSpec, tau: f64) -> Result<KrylovState<f64>> {
    expm_action(&spec.tridiag, tau)
}

/// `K = sum_n n psi_n^2`.
pub fn complexity(state: &KrylovState<f64>) -> f64 {
    state.complexity()
}

/// Rényi-2 correlator of the IR model from the Krylov wavepacket, i.e. the
/// expectation of `-(2 H - L) / L` in the tridiagonal representation.
pub fn renyi2_tridiag(spec: &KrylovSpec, state: &KrylovState<f64>) -> Result<f64> {
    if spec.model.kind() != ModelKind::IR {
        return Err(Error::ModelDomain("Krylov Rényi-2 formula is only valid for the IR model".into()));
    }
    let t = &spec.tridiag;
    if state.dim() != t.dim() {
        return Err(Error::DimensionMismatch { expected: t.dim(), got: state.dim() });
    }
    let l = spec.model.length() as f64;
    let psi = &state.psi;
    let diag: f64 = t.diag().iter().zip(psi).map(|(a, p)| (2.0 * a - l) * p * p).sum();
    let off: f64 = t.offdiag().iter().zip(psi.windows(2)).map(|(b, w)| b * w[0] * w[1]).sum();
    Ok(-(diag + 4.0 * off) / (l * state.norm_sqr()))
}

/// `χ = (1/L²) sum_ij ⟨ρ|τᶻ_i τᶻ_j|ρ⟩ / ⟨ρ|ρ⟩` with the reduced state
/// evolved exactly under the diagonal Hamiltonian.
pub fn renyi2_dense(model: &ModelSpec, tau: f64) -> Result<f64> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::NegativeTau(tau));
    }
    let h = build_reduced_hamiltonian(model)?;
    let l = model.length();
    let emin = h.diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut num = 0.0;
    let mut den = 0.0;
    for (k, &e) in h.diag.iter().enumerate() {
        // |ρ_k|² up to the common factor exp(2 tau emin) 2^-L
        let w = (-2.0 * tau * (e - emin)).exp();
        let m = l as f64 - 2.0 * k.count_ones() as f64;
        num += w * m * m;
        den += w;
    }
    Ok(num / (den * (l * l) as f64))
}

/// `μ_n = 2^{-(L-1)} sum_k C(L-1, k) (2k - L + 1)^n`, exact then rounded.
pub fn survival_moments_nn(length: usize, n_max: usize) -> Result<Vec<f64>> {
    Ok(survival_moments_nn_exact(length, n_max)?.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect())
}

pub fn survival_moments_nn_exact(length: usize, n_max: usize) -> Result<Vec<BigRational>> {
    if !(2..=64).contains(&length) {
        return Err(Error::Domain(format!("moment length must lie in 2..=64, got {length}")));
    }
    if n_max > 20 {
        return Err(Error::Domain(format!("moment order must be at most 20, got {n_max}")));
    }
    let m = length - 1;
    let mut binom = BigInt::one();
    let mut sums = vec![BigInt::zero(); n_max + 1];
    for k in 0..=m {
        let x = BigInt::from(2 * k as i64 - m as i64);
        let mut pow = BigInt::one();
        for s in sums.iter_mut() {
            *s += &binom * &pow;
            pow *= &x;
        }
        binom = binom * BigInt::from(m - k) / BigInt::from(k + 1);
    }
    let denom = BigInt::one() << m;
    Ok(sums.into_iter().map(|s| BigRational::new(s, denom.clone())).collect())
}

/// `⟨e_0|T^n|e_0⟩` for `n = 0..=n_max`.
pub fn moments_from_tridiag(t: &TridiagonalOperator<f64>, n_max: usize) -> Result<Vec<f64>> {
    if n_max > 2 * t.dim() {
        return Err(Error::Domain(format!("moment order {n_max} exceeds twice the dimension {}", t.dim())));
    }
    let mut v = vec![0.0; t.dim()];
    v[0] = 1.0;
    let mut w = vec![0.0; t.dim()];
    let mut out = Vec::with_capacity(n_max + 1);
    // μ_{2j} = |T^j e0|², μ_{2j+1} = ⟨T^j e0|T|T^j e0⟩
    for n in 0..=n_max {
        if n % 2 == 0 {
            out.push(v.iter().map(|x| x * x).sum());
        } else {
            t.apply(&v, &mut w);
            out.push(v.iter().zip(&w).map(|(a, b)| a * b).sum());
            std::mem::swap(&mut v, &mut w);
        }
    }
    Ok(out)
}

/// One `(L, τ)` point of a scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub kind: ModelKind,
    pub length: usize,
    pub tau: f64,
    pub k: f64,
    pub k_normalized: f64,
    /// `None` where no exact method is available (NN with `L > 14`).
    pub chi: Option<f64>,
    pub krylov_dim: usize,
}

/// Propagates one model over a τ grid; rows come back in grid order.
pub fn scan_model(spec: &KrylovSpec, taus: &[f64]) -> Result<Vec<ScanRow>> {
    let prop = Propagator::new(&spec.tridiag)?;
    let model = spec.model;
    let chi_dense = model.kind() == ModelKind::NN && model.length() <= MAX_REDUCED_LENGTH;
    taus.par_iter()
        .map(|&tau| {
            let state = prop.propagate(tau)?;
            let k = state.complexity();
            let chi = match model.kind() {
                ModelKind::IR => Some(renyi2_tridiag(spec, &state)?),
                ModelKind::NN if chi_dense => Some(renyi2_dense(&model, tau)?),
                ModelKind::NN => None,
            };
            Ok(ScanRow {
                kind: model.kind(),
                length: model.length(),
                tau,
                k,
                k_normalized: k / model.complexity_scale(),
                chi,
                krylov_dim: spec.krylov_dim(),
            })
        })
        .collect()
}

/// Scan over lengths and a shared τ grid, sorted by `(L, τ)` index.
pub fn scan(specs: &[KrylovSpec], taus: &[f64]) -> Result<Vec<ScanRow>> {
    let per_length: Vec<Vec<ScanRow>> =
        specs.par_iter().map(|spec| scan_model(spec, taus)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..specs.len()).collect();
    order.sort_by_key(|&i| specs[i].model.length());
    Ok(order.into_iter().flat_map(|i| per_length[i].clone()).collect())
}

/// Inclusive linear grid with `count` points.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Result<Vec<f64>> {
    if !(start >= 0.0 && stop >= start && start.is_finite() && stop.is_finite()) || count == 0 {
        return Err(Error::Domain(format!("invalid grid {start}:{stop}:{count}")));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { stop } else { start + step * i as f64 }).collect())
}
