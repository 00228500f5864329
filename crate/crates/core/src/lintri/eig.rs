use super::TridiagonalOperator;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_SWEEPS_PER_EIGENVALUE: usize = 50;

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T> {
    values: Vec<T>,
    // column-major: column k is the eigenvector of values[k]
    vectors: Vec<T>,
}

impl<T: Scalar> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Eigenvector `k` (unit norm).
    pub fn vector(&self, k: usize) -> &[T] {
        let n = self.dim();
        &self.vectors[k * n..(k + 1) * n]
    }

    /// Component `row` of eigenvector `col`.
    #[inline]
    pub fn component(&self, row: usize, col: usize) -> T {
        self.vectors[col * self.dim() + row]
    }

    /// Max-abs deviation of `Q Q^T` from the identity.
    pub fn orthogonality_error(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let s: T = (0..n).map(|k| self.component(i, k) * self.component(j, k)).sum();
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Max-abs deviation of `Q diag(values) Q^T` from `t`.
    pub fn reconstruction_error(&self, t: &TridiagonalOperator<T>) -> T {
        let dense = t.to_dense();
        let n = self.dim();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let s: T = (0..n)
                    .map(|k| self.component(i, k) * self.values[k] * self.component(j, k))
                    .sum();
                worst = worst.max((s - dense[i][j]).abs());
            }
        }
        worst
    }
}

/// Implicit-shift QL eigendecomposition of a symmetric tridiagonal matrix
/// (EISPACK `tql2` lineage), eigenvectors accumulated from the identity.
pub fn eig_tridiag<T: Scalar>(t: &TridiagonalOperator<T>) -> Result<EigenDecomposition<T>> {
    let n = t.dim();
    let mut d = t.diag().to_vec();
    let mut e = vec![T::zero(); n];
    e[..n - 1].copy_from_slice(t.offdiag());
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }

    let two = T::lit(2.0);
    let eps = T::epsilon();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS_PER_EIGENVALUE {
                    return Err(Error::NoConvergence { index: l, iterations: MAX_SWEEPS_PER_EIGENVALUE });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (left, right) = z.split_at_mut((i + 1) * n);
                    let col_i = &mut left[i * n..];
                    let col_next = &mut right[..n];
                    for (zi, zn) in col_i.iter_mut().zip(col_next.iter_mut()) {
                        let h = *zn;
                        *zn = s * *zi + c * h;
                        *zi = c * *zi - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| d[k]).collect();
    let mut vectors = Vec::with_capacity(n * n);
    for &k in &order {
        vectors.extend_from_slice(&z[k * n..(k + 1) * n]);
    }
    Ok(EigenDecomposition { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let t = TridiagonalOperator::<f64>::new(vec![3.0], vec![]).unwrap();
        let e = eig_tridiag(&t).unwrap();
        assert_eq!(e.values(), &[3.0]);
        assert_eq!(e.vector(0), &[1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let t = TridiagonalOperator::<f64>::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let e = eig_tridiag(&t).unwrap();
        assert!((e.values()[0] + 1.0).abs() < 1e-15);
        assert!((e.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spin_three_halves_sx() {
        let s3 = 3f64.sqrt();
        let t = TridiagonalOperator::new(vec![0.0; 4], vec![s3, 2.0, s3]).unwrap();
        let e = eig_tridiag(&t).unwrap();
        for (got, want) in e.values().iter().zip([-3.0, -1.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        assert!(e.orthogonality_error() < 1e-13);
        assert!(e.reconstruction_error(&t) < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let t = TridiagonalOperator::new(vec![0.0f32, 0.0], vec![1.0]).unwrap();
        let e = eig_tridiag(&t).unwrap();
        assert!((e.values()[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn deterministic() {
        let t = TridiagonalOperator::new(vec![0.3, -1.0, 2.0, 0.1], vec![0.7, 1.1, 0.2]).unwrap();
        assert_eq!(eig_tridiag(&t).unwrap(), eig_tridiag(&t).unwrap());
    }
}
