//! Log-domain combinatorics and signed log-sum-exp accumulation.

use std::cmp::Ordering;

/// `ln n!` via log-gamma.
pub fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln C(n, k)`, `-inf` when `k > n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Real number stored as sign and natural-log magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogValue {
    pub sign: i8,
    pub log_magnitude: f64,
}

impl SignedLogValue {
    pub const ZERO: Self = Self { sign: 0, log_magnitude: f64::NEG_INFINITY };

    pub fn new(sign: i8, log_magnitude: f64) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { sign: sign.signum(), log_magnitude }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => Self::new(1, x.ln()),
            Some(Ordering::Less) => Self::new(-1, (-x).ln()),
            _ => Self::ZERO,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_magnitude.exp()
        }
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            Self::ZERO
        } else {
            Self::new(self.sign * other.sign, self.log_magnitude + other.log_magnitude)
        }
    }

    /// `self / other`; `other` must be nonzero.
    pub fn div(self, other: Self) -> Self {
        assert!(!other.is_zero(), "division by a zero SignedLogValue");
        if self.is_zero() {
            Self::ZERO
        } else {
            Self::new(self.sign * other.sign, self.log_magnitude - other.log_magnitude)
        }
    }

    pub fn sqrt(self) -> Self {
        assert!(self.sign >= 0, "square root of a negative SignedLogValue");
        Self::new(self.sign, 0.5 * self.log_magnitude)
    }
}

/// Sums signed log-domain terms with a single shift by the largest
/// magnitude, in the given order.
pub fn signed_log_sum(terms: &[SignedLogValue]) -> SignedLogValue {
    let shift = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| t.log_magnitude)
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return SignedLogValue::ZERO;
    }
    let total: f64 = terms
        .iter()
        .filter(|t| !t.is_zero())
        .map(|t| f64::from(t.sign) * (t.log_magnitude - shift).exp())
        .sum();
    let mut out = SignedLogValue::from_f64(total);
    if !out.is_zero() {
        out.log_magnitude += shift;
    }
    out
}

/// `ln sum_i exp(x_i)` for nonnegative terms.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return shift;
    }
    shift + logs.iter().map(|&x| (x - shift).exp()).sum::<f64>().ln()
}
