//! The nearest-neighbour (NN) and infinite-range (IR) decohered Ising models:
//! effective Hamiltonians, the positive-parity reduction, analytic Lanczos
//! coefficients and closed-form wavepackets.
//!
//! Reduced basis: bit `k` of an index set means site `k` is `⇓` (`τᶻ = -1`).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::doubled::{self, DoubledOperator, DoubledState, KrausChannel, Sector};
use crate::error::{Error, Result};
use crate::lanczos::{DiagonalOperator, LinearOperator};
use crate::lintri::{KrylovState, TridiagonalOperator};
use crate::logspace::{ln_binomial, ln_factorial};

/// Largest `L` for operators on the `2^L` reduced sector.
pub const MAX_REDUCED_LENGTH: usize = 14;

/// Largest link count for a dense Kramers-Wannier matrix.
pub const MAX_KW_DENSE_LINKS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    NN,
    IR,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::NN => "nn",
            ModelKind::IR => "ir",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "nn" => Ok(ModelKind::NN),
            "ir" => Ok(ModelKind::IR),
            _ => Err(Error::ModelDomain(format!("unknown model {s:?}, expected nn or ir"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    kind: ModelKind,
    length: usize,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, length: usize) -> Result<Self> {
        if length < 2 {
            return Err(Error::ModelDomain(format!("chain length must be at least 2, got {length}")));
        }
        if kind == ModelKind::IR && length % 2 == 1 {
            return Err(Error::ModelDomain("IR model requires even L".into()));
        }
        Ok(Self { kind, length })
    }

    pub fn nn(length: usize) -> Result<Self> {
        Self::new(ModelKind::NN, length)
    }

    pub fn ir(length: usize) -> Result<Self> {
        Self::new(ModelKind::IR, length)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// `L` for NN, `L/2 + 1` for IR.
    pub fn krylov_dim(&self) -> usize {
        match self.kind {
            ModelKind::NN => self.length,
            ModelKind::IR => self.length / 2 + 1,
        }
    }

    /// Normalization of `K` used for plots: `L - 1` for NN, `L` for IR.
    pub fn complexity_scale(&self) -> f64 {
        match self.kind {
            ModelKind::NN => (self.length - 1) as f64,
            ModelKind::IR => self.length as f64,
        }
    }

    /// Exact channel at imaginary time `tau` and the scalar prefactor `c`
    /// with `channel = c exp(-tau H)` on the doubled space.
    pub fn channel(&self, tau: f64) -> Result<(KrausChannel, f64)> {
        match self.kind {
            ModelKind::NN => {
                let p = doubled::p_from_tau(tau)?;
                let c = (-((self.length - 1) as f64) * tau).exp();
                Ok((KrausChannel::nn_chain(self.length, p)?, c))
            }
            ModelKind::IR => Ok((KrausChannel::ir_all_pairs(self.length, tau)?, 1.0)),
        }
    }

    /// Hamiltonian energy of a configuration of classical signs `s_i = ±1`,
    /// given as a bit set of the `-1` sites.
    fn classical_energy(&self, flips: usize) -> f64 {
        let l = self.length;
        let sign = |i: usize| if (flips >> i) & 1 == 1 { -1.0 } else { 1.0 };
        match self.kind {
            ModelKind::NN => -(0..l - 1).map(|i| sign(i) * sign(i + 1)).sum::<f64>(),
            ModelKind::IR => {
                let down = flips.count_ones() as f64;
                let sz = 0.5 * (l as f64 - 2.0 * down);
                -2.0 * sz * sz / l as f64 + l as f64 / 2.0
            }
        }
    }
}

/// Diagonal of the reduced Hamiltonian over the `2^L` `τᶻ` product basis.
pub fn build_reduced_hamiltonian(model: &ModelSpec) -> Result<DiagonalOperator<f64>> {
    guard_reduced(model.length)?;
    Ok(DiagonalOperator { diag: (0..1usize << model.length).map(|k| model.classical_energy(k)).collect() })
}

/// Diagonal of the effective Hamiltonian on the full `4^L` doubled space:
/// `τᶻ_i` becomes `Z_i^u Z_i^l`.
pub fn doubled_hamiltonian(model: &ModelSpec) -> Result<DoubledOperator> {
    doubled::guard_full(model.length)?;
    let l = model.length;
    let mask = (1usize << l) - 1;
    Ok(DoubledOperator::Diagonal(
        (0..1usize << (2 * l)).map(|idx| model.classical_energy((idx & mask) ^ (idx >> l))).collect(),
    ))
}

fn guard_reduced(length: usize) -> Result<()> {
    if length > MAX_REDUCED_LENGTH {
        return Err(Error::SizeGuard { what: "reduced-sector length", limit: MAX_REDUCED_LENGTH, got: length });
    }
    Ok(())
}

/// Uniform state `2^{-L/2}` over the reduced sector.
pub fn reduced_initial_state(length: usize) -> Result<DoubledState> {
    if length == 0 {
        return Err(Error::ModelDomain("chain length must be positive".into()));
    }
    if length > 2 * MAX_REDUCED_LENGTH {
        return Err(Error::SizeGuard { what: "reduced initial state length", limit: 2 * MAX_REDUCED_LENGTH, got: length });
    }
    let dim = 1usize << length;
    DoubledState::new(length, Sector::ParityReduced2L, vec![(dim as f64).sqrt().recip(); dim])
}

/// `H = -sum_links τˣ` on `L - 1` link spins.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkHamiltonian {
    links: usize,
}

impl LinkHamiltonian {
    pub fn links(&self) -> usize {
        self.links
    }

    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        if self.links > MAX_KW_DENSE_LINKS {
            return Err(Error::SizeGuard { what: "dense link Hamiltonian links", limit: MAX_KW_DENSE_LINKS, got: self.links });
        }
        let dim = 1usize << self.links;
        let mut m = DMatrix::zeros(dim, dim);
        for k in 0..dim {
            for link in 0..self.links {
                m[(k ^ (1 << link), k)] -= 1.0;
            }
        }
        Ok(m)
    }
}

impl LinearOperator<f64> for LinkHamiltonian {
    fn dim(&self) -> usize {
        1 << self.links
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (k, yk) in y.iter_mut().enumerate() {
            *yk = -(0..self.links).map(|link| x[k ^ (1 << link)]).sum::<f64>();
        }
    }
}

/// Kramers-Wannier dual of the reduced NN model: link Hamiltonian and the
/// all-up link state.
pub fn kw_transform_nn(length: usize) -> Result<(LinkHamiltonian, Vec<f64>)> {
    if length < 2 {
        return Err(Error::ModelDomain(format!("chain length must be at least 2, got {length}")));
    }
    guard_reduced(length)?;
    let links = length - 1;
    let mut v = vec![0.0; 1 << links];
    v[0] = 1.0;
    Ok((LinkHamiltonian { links }, v))
}

/// Model together with its Krylov-space tridiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct KrylovSpec {
    pub model: ModelSpec,
    pub tridiag: TridiagonalOperator<f64>,
}

impl KrylovSpec {
    pub fn krylov_dim(&self) -> usize {
        self.tridiag.dim()
    }
}

pub fn nn_lanczos_b(length: usize, n: usize) -> f64 {
    ((n * (length - n)) as f64).sqrt()
}

pub fn ir_lanczos_a(length: usize, n: usize) -> f64 {
    let (l, n) = (length as f64, n as f64);
    -2.0 * n + 4.0 * n * n / l - 0.5 + l / 2.0
}

pub fn ir_lanczos_b(length: usize, n: usize) -> f64 {
    let (l, n) = (length as f64, n as f64);
    (2.0 * n * (l - 2.0 * n + 1.0) * (2.0 * n - 1.0) * (l - 2.0 * n + 2.0)).sqrt() / (2.0 * l)
}

/// Closed-form Lanczos coefficients.
pub fn analytic_lanczos(model: &ModelSpec) -> Result<KrylovSpec> {
    let l = model.length;
    let dim = model.krylov_dim();
    let (a, b) = match model.kind {
        ModelKind::NN => (vec![0.0; dim], (1..dim).map(|n| nn_lanczos_b(l, n)).collect()),
        ModelKind::IR => (
            (0..dim).map(|n| ir_lanczos_a(l, n)).collect(),
            (1..dim).map(|n| ir_lanczos_b(l, n)).collect(),
        ),
    };
    Ok(KrylovSpec { model: *model, tridiag: TridiagonalOperator::new(a, b)? })
}

fn check_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTau(tau))
    }
}

/// `(λ, 1 - λ)` with `λ = sinh²τ / (1 + 2 sinh²τ) = (1 - sech 2τ) / 2`.
fn nn_lambda(tau: f64) -> (f64, f64) {
    let sech = (2.0 * tau).cosh().recip();
    // 1 - sech(2τ) = 2 sinh²τ / cosh 2τ keeps precision near τ = 0
    let lam = if tau < 1.0 { tau.sinh().powi(2) * sech } else { 0.5 * (1.0 - sech) };
    (lam, 0.5 * (1.0 + sech))
}

/// Binomial wavepacket of the NN model.
pub fn psi_nn_analytic(length: usize, tau: f64) -> Result<KrylovState<f64>> {
    if length < 2 {
        return Err(Error::ModelDomain(format!("chain length must be at least 2, got {length}")));
    }
    check_tau(tau)?;
    let (lam, one_minus) = nn_lambda(tau);
    if lam == 0.0 {
        return Ok(KrylovState { tau, ..KrylovState::initial(length) });
    }
    let m = length - 1;
    let (ln_l, ln_r) = (lam.ln(), one_minus.ln());
    let psi = (0..length)
        .map(|n| {
            let mag = (0.5 * (ln_binomial(m, n) + n as f64 * ln_l + (m - n) as f64 * ln_r)).exp();
            if n % 2 == 0 { mag } else { -mag }
        })
        .collect();
    Ok(KrylovState { tau, psi })
}

/// `K = (L - 1) λ`.
pub fn k_nn_analytic(length: usize, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok((length.saturating_sub(1)) as f64 * nn_lambda(tau).0)
}

fn check_area_tau(tau: f64) -> Result<()> {
    if (0.0..0.5).contains(&tau) {
        Ok(())
    } else {
        Err(Error::Domain(format!("area-law formula needs 0 <= tau < 1/2, got {tau}")))
    }
}

/// Large-`L` amplitude of the IR wavepacket below the transition.
pub fn area_law_psi(n: usize, tau: f64) -> Result<f64> {
    check_area_tau(tau)?;
    if n == 0 {
        return Ok(((1.0 - 2.0 * tau).ln() / 4.0 - (1.0 - tau).ln() / 2.0).exp());
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let ln_mag = 0.5 * ln_factorial(2 * n) - nf * std::f64::consts::LN_2 - ln_factorial(n)
        - 0.5 * (1.0 - tau).ln()
        + nf * (tau / (1.0 - tau)).ln()
        + 0.25 * (1.0 - 2.0 * tau).ln();
    let mag = ln_mag.exp();
    Ok(if n.is_multiple_of(2) { mag } else { -mag })
}

/// `K = τ² / (2 (1 - 2τ))`.
pub fn area_law_k(tau: f64) -> Result<f64> {
    check_area_tau(tau)?;
    Ok(tau * tau / (2.0 * (1.0 - 2.0 * tau)))
}

/// `K = L / 4`.
pub fn volume_law_k(length: usize) -> Result<f64> {
    if length % 2 == 1 {
        return Err(Error::ModelDomain("volume law requires even L".into()));
    }
    Ok(length as f64 / 4.0)
}
