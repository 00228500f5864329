//! Wigner small-d matrices `d^s_{m'm}(θ) = ⟨s,m'|exp(-iθS_y)|s,m⟩` and the
//! exact amplitudes of the IR wavepacket built from them.
//!
//! Half-integer quantum numbers are passed doubled: `two_s = 2s`,
//! `two_m = 2m`.

use crate::error::{Error, Result};
use crate::lintri::{eig_tridiag, EigenDecomposition, KrylovState, TridiagonalOperator};
use crate::logspace::{ln_binomial, ln_factorial, log_sum_exp, signed_log_sum, SignedLogValue};

/// Largest `2s` for the alternating-sum formula.
pub const MAX_TWO_S_DIRECT: u32 = 40;

/// Largest `2s` for the eigendecomposition route.
pub const MAX_TWO_S_STABLE: u32 = 600;

fn check_indices(two_s: u32, two_mp: i32, two_m: i32) -> Result<()> {
    let s = two_s as i32;
    for (name, v) in [("m'", two_mp), ("m", two_m)] {
        if v.abs() > s || (s - v) % 2 != 0 {
            return Err(Error::IndexOutOfRange(format!(
                "{name} = {}/2 is not a magnetic index of spin {two_s}/2",
                v
            )));
        }
    }
    Ok(())
}

/// `x^e` as a signed log value, with `0^0 = 1`.
fn signed_pow(x: f64, e: u32) -> SignedLogValue {
    if e == 0 {
        return SignedLogValue::new(1, 0.0);
    }
    if x == 0.0 {
        return SignedLogValue::ZERO;
    }
    let sign = if x < 0.0 && e % 2 == 1 { -1 } else { 1 };
    SignedLogValue::new(sign, e as f64 * x.abs().ln())
}

/// Closed-form alternating sum over `k`, evaluated in the log domain.
pub fn wigner_d(two_s: u32, two_mp: i32, two_m: i32, theta: f64) -> Result<f64> {
    check_indices(two_s, two_mp, two_m)?;
    if two_s > MAX_TWO_S_DIRECT {
        return Err(Error::SizeGuard { what: "direct Wigner sum 2s", limit: MAX_TWO_S_DIRECT as usize, got: two_s as usize });
    }
    let s = two_s as i32;
    let sp = ((s + two_mp) / 2) as u32; // s + m'
    let sm = ((s - two_mp) / 2) as u32; // s - m'
    let np = ((s + two_m) / 2) as u32; // s + m
    let nm = ((s - two_m) / 2) as u32; // s - m
    let prefactor = 0.5 * (ln_factorial(sp as usize) + ln_factorial(sm as usize) + ln_factorial(np as usize) + ln_factorial(nm as usize));
    let (c, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let k_min = np.saturating_sub(sp);
    let k_max = np.min(sm);
    let terms: Vec<SignedLogValue> = (k_min..=k_max)
        .map(|k| {
            let den = ln_factorial((np - k) as usize)
                + ln_factorial((sm - k) as usize)
                + ln_factorial((k + sp - np) as usize)
                + ln_factorial(k as usize);
            let sign = if (k + sp - np).is_multiple_of(2) { 1 } else { -1 };
            SignedLogValue::new(sign, prefactor - den)
                .mul(signed_pow(c, np + sm - 2 * k))
                .mul(signed_pow(sn, 2 * k + sp - np))
        })
        .collect();
    Ok(signed_log_sum(&terms).to_f64())
}

/// `d^s_{m's}(θ) = sqrt(C(2s, s+m')) cos^{s+m'}(θ/2) sin^{s-m'}(θ/2)`.
pub fn wigner_d_highest(two_s: u32, two_mp: i32, theta: f64) -> Result<f64> {
    check_indices(two_s, two_mp, two_s as i32)?;
    let sp = ((two_s as i32 + two_mp) / 2) as u32;
    let sm = two_s - sp;
    let v = SignedLogValue::new(1, 0.5 * ln_binomial(two_s as usize, sp as usize))
        .mul(signed_pow((theta / 2.0).cos(), sp))
        .mul(signed_pow((theta / 2.0).sin(), sm));
    Ok(v.to_f64())
}

/// One column `m` of `d^s(θ)`; `entries[i]` belongs to `m' = -s + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerColumn {
    pub two_s: u32,
    pub two_m: i32,
    pub theta: f64,
    pub entries: Vec<f64>,
}

impl WignerColumn {
    pub fn entry(&self, two_mp: i32) -> Result<f64> {
        check_indices(self.two_s, two_mp, self.two_m)?;
        Ok(self.entries[((two_mp + self.two_s as i32) / 2) as usize])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum()
    }
}

/// Eigendecomposition of `S_y` for one spin, reusable across columns and
/// angles.
///
/// In the basis `k = s - m`, `S_y = D A D^{-1}` with `D = diag(i^k)` and
/// `A` real symmetric tridiagonal, zero diagonal, off-diagonal
/// `sqrt(k (2s - k + 1)) / 2`. Then
/// `d_{k'k}(θ) = i^{k'-k} sum_j Q_{k'j} Q_{kj} exp(-iθλ_j)`, whose real
/// part survives for even `k' - k` and imaginary part for odd.
#[derive(Debug, Clone)]
pub struct WignerRotation {
    two_s: u32,
    eig: EigenDecomposition<f64>,
}

impl WignerRotation {
    pub fn new(two_s: u32) -> Result<Self> {
        if two_s > MAX_TWO_S_STABLE {
            return Err(Error::SizeGuard { what: "Wigner rotation 2s", limit: MAX_TWO_S_STABLE as usize, got: two_s as usize });
        }
        let dim = two_s as usize + 1;
        let offdiag = (1..dim).map(|k| ((k * (dim - k)) as f64).sqrt() / 2.0).collect();
        let a = TridiagonalOperator::new(vec![0.0; dim], offdiag)?;
        Ok(Self { two_s, eig: eig_tridiag(&a)? })
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn column(&self, two_m: i32, theta: f64) -> Result<WignerColumn> {
        check_indices(self.two_s, two_m, two_m)?;
        let dim = self.two_s as usize + 1;
        let k = ((self.two_s as i32 - two_m) / 2) as usize;
        let (cos, sin): (Vec<f64>, Vec<f64>) = self
            .eig
            .values()
            .iter()
            .map(|&lambda| ((theta * lambda).cos(), (theta * lambda).sin()))
            .unzip();
        let row_k = |j: usize| self.eig.component(k, j);
        let mut entries = vec![0.0; dim];
        for kp in 0..dim {
            // phase i^{k'-k} tracked as an exact residue mod 4
            let delta = kp as i64 - k as i64;
            let trig = if delta % 2 == 0 { &cos } else { &sin };
            let sum: f64 = (0..dim).map(|j| self.eig.component(kp, j) * row_k(j) * trig[j]).sum();
            let value = match delta.rem_euclid(4) {
                0 | 1 => sum,
                _ => -sum,
            };
            // m' = s - k' sits at index 2s - k'
            entries[dim - 1 - kp] = value;
        }
        Ok(WignerColumn { two_s: self.two_s, two_m, theta, entries })
    }
}

/// Column `m` of `d^s(θ)` via the `S_y` eigendecomposition.
pub fn wigner_column_stable(two_s: u32, two_m: i32, theta: f64) -> Result<WignerColumn> {
    WignerRotation::new(two_s)?.column(two_m, theta)
}

/// Largest even `L` for the exact IR amplitudes.
pub const MAX_IR_EXACT_LENGTH: usize = 600;

/// Exact IR wavepacket from the columns `m = L/2 - 2n` of `d^{L/2}(π/2)`.
#[derive(Debug, Clone)]
pub struct IrExactAmplitudes {
    length: usize,
    /// `columns[n][i]` is `d_{m', L/2 - 2n}(π/2)` at `m' = -L/2 + i`.
    columns: Vec<Vec<f64>>,
    ln_binom: Vec<f64>,
}

impl IrExactAmplitudes {
    pub fn new(length: usize) -> Result<Self> {
        if length % 2 == 1 || length == 0 {
            return Err(Error::ModelDomain("IR model requires even L".into()));
        }
        if length > MAX_IR_EXACT_LENGTH {
            return Err(Error::SizeGuard { what: "exact IR amplitude length", limit: MAX_IR_EXACT_LENGTH, got: length });
        }
        let rot = WignerRotation::new(length as u32)?;
        let columns = (0..=length / 2)
            .map(|n| Ok(rot.column(length as i32 - 4 * n as i32, std::f64::consts::FRAC_PI_2)?.entries))
            .collect::<Result<_>>()?;
        let ln_binom = (0..=length).map(|i| ln_binomial(length, i)).collect();
        Ok(Self { length, columns, ln_binom })
    }

    pub fn krylov_dim(&self) -> usize {
        self.columns.len()
    }

    fn m_prime_sq(&self, i: usize) -> f64 {
        let m = i as f64 - self.length as f64 / 2.0;
        m * m
    }

    fn ln_denominator(&self, tau: f64) -> f64 {
        let l = self.length as f64;
        let logs: Vec<f64> = (0..=self.length).map(|i| self.ln_binom[i] + 4.0 * self.m_prime_sq(i) * tau / l).collect();
        0.5 * log_sum_exp(&logs)
    }

    fn amplitude(&self, n: usize, tau: f64, ln_den: f64) -> f64 {
        let l = self.length as f64;
        let terms: Vec<SignedLogValue> = self.columns[n]
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                SignedLogValue::from_f64(d).mul(SignedLogValue::new(1, 0.5 * self.ln_binom[i] + 2.0 * self.m_prime_sq(i) * tau / l))
            })
            .collect();
        let v = signed_log_sum(&terms).div(SignedLogValue::new(1, ln_den)).to_f64();
        if n.is_multiple_of(2) { v } else { -v }
    }

    pub fn psi(&self, n: usize, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        if n >= self.krylov_dim() {
            return Err(Error::IndexOutOfRange(format!("Krylov index {n} beyond L/2 = {}", self.length / 2)));
        }
        Ok(self.amplitude(n, tau, self.ln_denominator(tau)))
    }

    pub fn state(&self, tau: f64) -> Result<KrylovState<f64>> {
        check_tau(tau)?;
        let ln_den = self.ln_denominator(tau);
        Ok(KrylovState { tau, psi: (0..self.krylov_dim()).map(|n| self.amplitude(n, tau, ln_den)).collect() })
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTau(tau))
    }
}

/// Single exact amplitude; builds the rotation each call, so prefer
/// [`IrExactAmplitudes`] for repeated use.
pub fn psi_ir_exact(length: usize, n: usize, tau: f64) -> Result<f64> {
    IrExactAmplitudes::new(length)?.psi(n, tau)
}

/// Large-`τ` limit `(-1)^n sqrt(C(L, 2n) 2^{1-L})`.
pub fn psi_ir_asymptotic(length: usize, n: usize) -> Result<f64> {
    if length % 2 == 1 || length == 0 {
        return Err(Error::ModelDomain("IR model requires even L".into()));
    }
    if n > length / 2 {
        return Err(Error::IndexOutOfRange(format!("Krylov index {n} beyond L/2 = {}", length / 2)));
    }
    let mag = (0.5 * (ln_binomial(length, 2 * n) + (1.0 - length as f64) * std::f64::consts::LN_2)).exp();
    Ok(if n.is_multiple_of(2) { mag } else { -mag })
}

pub fn ir_asymptotic_state(length: usize) -> Result<KrylovState<f64>> {
    let psi = (0..=length / 2).map(|n| psi_ir_asymptotic(length, n)).collect::<Result<_>>()?;
    Ok(KrylovState { tau: f64::INFINITY, psi })
}
