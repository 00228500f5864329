//! Brute-force references at small `L`: explicit superoperators, Krylov
//! bases by Gram-Schmidt on `{H^n |ρ⟩}`, and full doubled-space evolution.

use std::collections::BTreeSet;

use nalgebra::{Complex, DMatrix};

use crate::dense::expm;
use crate::doubled::{self, apply_channel, full_initial_state, devectorize, DoubledOperator, DoubledState, KrausChannel};
use crate::error::{Error, Result};
use crate::lanczos::{LanczosResult, LinearOperator};
use crate::lintri::orthonormalize;
use crate::models::{build_reduced_hamiltonian, doubled_hamiltonian, reduced_initial_state, ModelKind, ModelSpec};

/// Largest `L` for a dense `4^L x 4^L` superoperator.
pub const MAX_DENSE_SUPEROPERATOR_LENGTH: usize = 4;

/// Largest `L` for full doubled-space checks.
pub const MAX_ORACLE_FULL_LENGTH: usize = 6;

/// Largest `L` for the reduced-sector Gram-Schmidt Krylov construction.
pub const MAX_DENSE_KRYLOV_LENGTH: usize = 12;

/// Largest `L` for the error-state span check.
pub const MAX_ERROR_STATE_LENGTH: usize = 8;

/// Explicit superoperator matrix in the column-stacking basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSuperoperator {
    pub length: usize,
    pub matrix: DMatrix<f64>,
}

impl DenseSuperoperator {
    /// `sum_m w_m conj(P_m) (x) P_m` in full complex arithmetic; fails if
    /// an imaginary part survives.
    pub fn from_channel(channel: &KrausChannel) -> Result<Self> {
        let l = channel.length();
        if l > MAX_DENSE_SUPEROPERATOR_LENGTH {
            return Err(Error::SizeGuard { what: "dense superoperator length", limit: MAX_DENSE_SUPEROPERATOR_LENGTH, got: l });
        }
        let n = 1usize << l;
        let mut acc = DMatrix::<Complex<f64>>::zeros(n * n, n * n);
        for (w, p) in channel.terms() {
            let k = p.to_matrix();
            // row index i + j n pairs ρ_ij; (K ρ K†)_ij = sum K_ia ρ_ab conj(K_jb)
            acc += k.map(|z| z.conj()).kronecker(&k) * Complex::new(*w, 0.0);
        }
        let imag = acc.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        if imag > 1e-14 {
            return Err(Error::ComplexEntries(imag));
        }
        Ok(Self { length: l, matrix: acc.map(|z| z.re) })
    }

    pub fn identity(length: usize) -> Self {
        let d = 1usize << (2 * length);
        Self { length, matrix: DMatrix::identity(d, d) }
    }

    /// `other` applied after `self`.
    pub fn then(&self, other: &Self) -> Self {
        Self { length: self.length, matrix: &other.matrix * &self.matrix }
    }

    pub fn apply(&self, state: &DoubledState) -> Result<Vec<f64>> {
        if state.amplitudes().len() != self.matrix.ncols() {
            return Err(Error::DimensionMismatch { expected: self.matrix.ncols(), got: state.amplitudes().len() });
        }
        Ok((&self.matrix * nalgebra::DVector::from_column_slice(state.amplitudes())).as_slice().to_vec())
    }
}

/// Diagonal of the superoperator of a channel whose Kraus operators are
/// diagonal matrices, from complex products of their entries. Errors if a
/// Kraus matrix has an off-diagonal entry.
pub fn superoperator_diagonal(channel: &KrausChannel) -> Result<Vec<f64>> {
    let l = channel.length();
    if l > MAX_ORACLE_FULL_LENGTH {
        return Err(Error::SizeGuard { what: "diagonal superoperator length", limit: MAX_ORACLE_FULL_LENGTH, got: l });
    }
    let n = 1usize << l;
    let mut diag = vec![Complex::new(0.0, 0.0); n * n];
    for (w, p) in channel.terms() {
        let k = p.to_matrix();
        for r in 0..n {
            for c in 0..n {
                if r != c && k[(r, c)].norm() != 0.0 {
                    return Err(Error::InvalidChannel(format!("Kraus operator {p} is not diagonal")));
                }
            }
        }
        for (idx, d) in diag.iter_mut().enumerate() {
            let (upper, lower) = (idx % n, idx / n);
            *d += k[(lower, lower)].conj() * k[(upper, upper)] * *w;
        }
    }
    let imag = diag.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    if imag > 1e-14 {
        return Err(Error::ComplexEntries(imag));
    }
    Ok(diag.into_iter().map(|z| z.re).collect())
}

/// Bond (NN) or pair (IR) factors whose product is the model channel.
fn factor_channels(model: &ModelSpec, tau: f64) -> Result<Vec<KrausChannel>> {
    let l = model.length();
    match model.kind() {
        ModelKind::NN => {
            let p = doubled::p_from_tau(tau)?;
            (0..l - 1).map(|i| KrausChannel::nn_bond(l, i, p)).collect()
        }
        ModelKind::IR => {
            let mut out = Vec::new();
            for i in 0..l {
                for j in i + 1..l {
                    out.push(KrausChannel::ir_pair(l, i, j, tau)?);
                }
            }
            Ok(out)
        }
    }
}

/// Max-abs difference between the channel superoperator, built as a
/// product over bonds or pairs, and `c exp(-tau H)` on the doubled space.
/// `p_or_tau` is the flip probability for NN and `tau` for IR.
pub fn channel_vs_exponential(model: &ModelSpec, p_or_tau: f64) -> Result<f64> {
    let l = model.length();
    if l > MAX_ORACLE_FULL_LENGTH {
        return Err(Error::SizeGuard { what: "channel oracle length", limit: MAX_ORACLE_FULL_LENGTH, got: l });
    }
    let tau = match model.kind() {
        ModelKind::NN => doubled::tau_from_p(p_or_tau)?,
        ModelKind::IR => p_or_tau,
    };
    let prefactor = model.channel(tau)?.1;
    let DoubledOperator::Diagonal(h) = doubled_hamiltonian(model)? else {
        unreachable!("both model Hamiltonians are diagonal");
    };
    let target: Vec<f64> = h.iter().map(|e| prefactor * (-tau * e).exp()).collect();
    let factors = factor_channels(model, tau)?;

    let mut diag = vec![1.0; target.len()];
    for f in &factors {
        for (d, x) in diag.iter_mut().zip(superoperator_diagonal(f)?) {
            *d *= x;
        }
    }
    let mut worst = diag.iter().zip(&target).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    if l <= MAX_DENSE_SUPEROPERATOR_LENGTH {
        let product = factors
            .iter()
            .try_fold(DenseSuperoperator::identity(l), |acc, f| Ok::<_, Error>(acc.then(&DenseSuperoperator::from_channel(f)?)))?;
        let hmat = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(h.clone()));
        let generic = expm(&(hmat * (-tau)))? * prefactor;
        let dim = target.len();
        for r in 0..dim {
            for c in 0..dim {
                let t = if r == c { target[r] } else { 0.0 };
                worst = worst.max((product.matrix[(r, c)] - t).abs());
                worst = worst.max((generic[(r, c)] - t).abs());
            }
        }
    }
    Ok(worst)
}

/// Krylov basis of the reduced model by explicit Gram-Schmidt: each step
/// appends `H K_n` to the basis and orthonormalizes the whole list with
/// [`orthonormalize`]; the first dependence ends the space. Coefficients
/// are inner products `a_n = ⟨K_n|H|K_n⟩`, `b_n = ⟨K_n|H|K_{n-1}⟩`.
pub fn dense_krylov(model: &ModelSpec) -> Result<LanczosResult<f64>> {
    if model.length() > MAX_DENSE_KRYLOV_LENGTH {
        return Err(Error::SizeGuard { what: "dense Krylov length", limit: MAX_DENSE_KRYLOV_LENGTH, got: model.length() });
    }
    let h = build_reduced_hamiltonian(model)?;
    let v0 = reduced_initial_state(model.length())?.into_amplitudes();
    let dim = v0.len();
    let mut basis = vec![v0];
    let mut hk = vec![0.0; dim];
    loop {
        h.apply(basis.last().unwrap(), &mut hk);
        let mut candidate = basis.clone();
        candidate.push(hk.clone());
        match orthonormalize(&candidate) {
            Ok(b) => basis = b,
            Err(Error::LinearDependence { index }) if index == basis.len() => break,
            Err(e) => return Err(e),
        }
        if basis.len() == dim {
            break;
        }
    }
    let apply = |v: &[f64]| {
        let mut out = vec![0.0; dim];
        h.apply(v, &mut out);
        out
    };
    let dot = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    let mut a = Vec::with_capacity(basis.len());
    let mut b = Vec::with_capacity(basis.len().saturating_sub(1));
    for (n, k) in basis.iter().enumerate() {
        let hk = apply(k);
        a.push(dot(k, &hk));
        if n > 0 {
            b.push(dot(&basis[n - 1], &hk));
        }
    }
    Ok(LanczosResult { a, b, basis: Some(basis), terminated: true })
}

/// Projection residuals of `|K_n⟩` against the error-state spans.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorStateResiduals {
    /// `|K_n - P_{≤n} K_n|`
    pub outside_n: f64,
    /// `|P_{≤n-1} K_n|`, zero for `n = 0`
    pub inside_lower: f64,
}

/// Sites flipped by each single error operator (`ZZ` bond or pair).
fn error_masks(model: &ModelSpec) -> Vec<usize> {
    let l = model.length();
    match model.kind() {
        ModelKind::NN => (0..l - 1).map(|i| 0b11 << i).collect(),
        ModelKind::IR => {
            let mut out = Vec::new();
            for i in 0..l {
                for j in i + 1..l {
                    out.push((1 << i) | (1 << j));
                }
            }
            out
        }
    }
}

/// Orthonormal basis spanning `vectors`, skipping dependent ones.
fn span_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let n0 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let r = project_out(&basis, v);
        let nr = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nr > 1e-10 * n0 {
            basis.push(r.iter().map(|x| x / nr).collect());
        }
    }
    basis
}

fn project_out(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    let mut w = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
    w
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn error_state_residuals(model: &ModelSpec, n: usize) -> Result<ErrorStateResiduals> {
    let l = model.length();
    if l > MAX_ERROR_STATE_LENGTH {
        return Err(Error::SizeGuard { what: "error-state check length", limit: MAX_ERROR_STATE_LENGTH, got: l });
    }
    let krylov = dense_krylov(model)?;
    let basis = krylov.basis.expect("dense Krylov keeps its basis");
    if n >= basis.len() {
        return Err(Error::IndexOutOfRange(format!("Krylov index {n} beyond dimension {}", basis.len())));
    }
    let init = reduced_initial_state(l)?.into_amplitudes();
    let errors = error_masks(model);
    // layers[e] = sign patterns reachable with at most e error operators
    let mut reached: BTreeSet<usize> = BTreeSet::from([0]);
    let mut frontier = vec![0usize];
    let mut spans: Vec<Vec<usize>> = vec![vec![0]];
    for _ in 0..n {
        let mut next = Vec::new();
        for &f in &frontier {
            for &e in &errors {
                if reached.insert(f ^ e) {
                    next.push(f ^ e);
                }
            }
        }
        let mut all = spans.last().unwrap().clone();
        all.extend(&next);
        spans.push(all);
        frontier = next;
    }
    let states = |masks: &[usize]| -> Vec<Vec<f64>> {
        masks
            .iter()
            .map(|&f| {
                init.iter()
                    .enumerate()
                    .map(|(k, &x)| if (k & f).count_ones() % 2 == 1 { -x } else { x })
                    .collect()
            })
            .collect()
    };
    let kn = &basis[n];
    let upper = span_basis(&states(&spans[n]));
    let outside_n = norm(&project_out(&upper, kn));
    let inside_lower = if n == 0 {
        0.0
    } else {
        let lower = span_basis(&states(&spans[n - 1]));
        let r = project_out(&lower, kn);
        norm(&kn.iter().zip(&r).map(|(a, b)| a - b).collect::<Vec<_>>())
    };
    Ok(ErrorStateResiduals { outside_n, inside_lower })
}

/// `|K_n⟩` lies in the span of `≤ n`-error states and is orthogonal to
/// all `≤ n-1`-error states, within `1e-8`.
pub fn error_state_interpretation_check(model: &ModelSpec, n: usize) -> Result<bool> {
    let r = error_state_residuals(model, n)?;
    Ok(r.outside_n <= 1e-8 && r.inside_lower <= 1e-8)
}

/// Channel output `ρ(τ)` on the full doubled space.
pub fn evolve_full(model: &ModelSpec, tau: f64) -> Result<DoubledState> {
    if model.length() > MAX_ORACLE_FULL_LENGTH {
        return Err(Error::SizeGuard { what: "full evolution length", limit: MAX_ORACLE_FULL_LENGTH, got: model.length() });
    }
    let (channel, _) = model.channel(tau)?;
    apply_channel(&channel, &full_initial_state(model.length())?)
}

/// `(1/L²) sum_ij Tr(Z_iZ_j ρ Z_iZ_j ρ) / Tr ρ²` from the full density matrix.
pub fn renyi2_full(model: &ModelSpec, tau: f64) -> Result<f64> {
    let rho = devectorize(&evolve_full(model, tau)?)?;
    let l = model.length();
    let n = rho.nrows();
    let mut num = 0.0;
    let mut den = 0.0;
    for a in 0..n {
        for b in 0..n {
            let r2 = rho[(a, b)] * rho[(b, a)];
            // sum_ij s_i(a)s_j(a)s_i(b)s_j(b) = (L - 2|a xor b|)²
            let m = l as f64 - 2.0 * (a ^ b).count_ones() as f64;
            num += r2 * m * m;
            den += r2;
        }
    }
    Ok(num / (den * (l * l) as f64))
}
