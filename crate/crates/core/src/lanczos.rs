//! Lanczos tridiagonalization of a symmetric operator from a start vector.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::lintri::TridiagonalOperator;
use crate::scalar::{axpy, dot, norm, scale, Scalar};

/// Residual norms below this fraction of the spectral scale end the recursion.
pub const TERMINATION_TOLERANCE: f64 = 1e-8;

/// Linear map on `R^dim` that is assumed symmetric.
pub trait LinearOperator<T: Scalar>: Sync {
    fn dim(&self) -> usize;

    /// `y = H x`; `y` is overwritten.
    fn apply(&self, x: &[T], y: &mut [T]);
}

impl<T: Scalar> LinearOperator<T> for TridiagonalOperator<T> {
    fn dim(&self) -> usize {
        TridiagonalOperator::dim(self)
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        TridiagonalOperator::apply(self, x, y)
    }
}

/// Operator diagonal in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalOperator<T> {
    pub diag: Vec<T>,
}

impl<T: Scalar> LinearOperator<T> for DiagonalOperator<T> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        for ((yi, &xi), &d) in y.iter_mut().zip(x).zip(&self.diag) {
            *yi = d * xi;
        }
    }
}

impl LinearOperator<f64> for nalgebra::DMatrix<f64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.nrows();
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = (0..n).map(|j| self[(i, j)] * x[j]).sum();
        }
    }
}

/// Adds `shift * I` to an operator.
pub struct Shifted<'a, T, O: ?Sized> {
    pub inner: &'a O,
    pub shift: T,
}

impl<T: Scalar, O: LinearOperator<T> + ?Sized> LinearOperator<T> for Shifted<'_, T, O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        self.inner.apply(x, y);
        axpy(self.shift, x, y);
    }
}

/// Largest `|<u, H v> - <H u, v>|` over `probes` seeded random pairs.
pub fn symmetry_defect<T: Scalar, O: LinearOperator<T> + ?Sized>(op: &O, probes: usize, seed: u64) -> T {
    let n = op.dim();
    let mut rng = StdRng::seed_from_u64(seed);
    let mut hu = vec![T::zero(); n];
    let mut hv = vec![T::zero(); n];
    let mut worst = T::zero();
    for _ in 0..probes {
        let u: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        let v: Vec<T> = (0..n).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        op.apply(&u, &mut hu);
        op.apply(&v, &mut hv);
        worst = worst.max((dot(&u, &hv) - dot(&hu, &v)).abs());
    }
    worst
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    /// Maximum number of Krylov vectors.
    pub max_steps: usize,
    /// Re-project every new vector against all stored ones, twice.
    pub reorthogonalize: bool,
    pub keep_basis: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosResult<T> {
    pub a: Vec<T>,
    /// `b_1, b_2, ...`; `b_0 = 0` is not stored.
    pub b: Vec<T>,
    pub basis: Option<Vec<Vec<T>>>,
    pub terminated: bool,
}

impl<T: Scalar> LanczosResult<T> {
    pub fn krylov_dim(&self) -> usize {
        self.a.len()
    }

    pub fn tridiagonal(&self) -> Result<TridiagonalOperator<T>> {
        TridiagonalOperator::new(self.a.clone(), self.b.clone())
    }
}

/// Runs the recursion with the basis kept iff `reorth` is set.
pub fn run_lanczos<T: Scalar, O: LinearOperator<T> + ?Sized>(
    op: &O,
    v0: &[T],
    max_steps: usize,
    reorth: bool,
) -> Result<LanczosResult<T>> {
    let opts = LanczosOptions { max_steps, reorthogonalize: reorth, keep_basis: reorth };
    run_lanczos_with(op, v0, &opts)
}

pub fn run_lanczos_with<T: Scalar, O: LinearOperator<T> + ?Sized>(
    op: &O,
    v0: &[T],
    opts: &LanczosOptions,
) -> Result<LanczosResult<T>> {
    let n = op.dim();
    if v0.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v0.len() });
    }
    if opts.max_steps == 0 || opts.max_steps > n {
        return Err(Error::Domain(format!("max_steps must lie in 1..={n}, got {}", opts.max_steps)));
    }
    let norm0 = norm(v0);
    if !((norm0 - T::one()).abs() <= T::lit(1e-12)) {
        return Err(Error::NonUnitStart(norm0.to_f64().unwrap_or(f64::NAN)));
    }

    let tol = T::lit(TERMINATION_TOLERANCE);
    let store = opts.reorthogonalize || opts.keep_basis;
    let mut basis: Vec<Vec<T>> = Vec::new();
    let mut a = Vec::new();
    let mut b: Vec<T> = Vec::new();
    let mut prev: Vec<T> = vec![T::zero(); n];
    let mut cur = v0.to_vec();
    let mut w = vec![T::zero(); n];
    let mut scale_est = T::zero();
    let mut terminated = false;

    loop {
        if store {
            basis.push(cur.clone());
        }
        op.apply(&cur, &mut w);
        let an = dot(&cur, &w);
        a.push(an);
        axpy(-an, &cur, &mut w);
        if let Some(&bn) = b.last() {
            axpy(-bn, &prev, &mut w);
        }
        if opts.reorthogonalize {
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(q, &w);
                    axpy(-c, q, &mut w);
                }
            }
        }
        let bn = norm(&w);
        scale_est = scale_est.max(an.abs()).max(bn);
        if bn < tol * scale_est.max(T::one()) {
            terminated = true;
            break;
        }
        if a.len() == opts.max_steps {
            break;
        }
        b.push(bn);
        scale(T::one() / bn, &mut w);
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut w);
    }

    Ok(LanczosResult {
        a,
        b,
        basis: if opts.keep_basis && store { Some(basis) } else { None },
        terminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest, ProptestConfig};

    #[test]
    fn one_dimensional() {
        let op = DiagonalOperator { diag: vec![1.0] };
        let r = run_lanczos(&op, &[1.0], 1, true).unwrap();
        assert_eq!(r.a, vec![1.0]);
        assert!(r.b.is_empty());
        assert!(r.terminated);
    }

    #[test]
    fn rejects_bad_start() {
        let op = DiagonalOperator { diag: vec![1.0, 2.0] };
        assert!(matches!(run_lanczos(&op, &[1.0, 1.0], 2, true), Err(Error::NonUnitStart(_))));
        assert!(matches!(run_lanczos(&op, &[1.0], 1, true), Err(Error::DimensionMismatch { .. })));
        assert!(run_lanczos(&op, &[1.0, 0.0], 3, true).is_err());
    }

    #[test]
    fn recovers_a_tridiagonal_from_its_first_basis_vector() {
        let t = TridiagonalOperator::<f64>::new(vec![0.5, -1.0, 2.0, 0.0], vec![1.0, 0.3, 2.0]).unwrap();
        let r = run_lanczos(&t, &[1.0, 0.0, 0.0, 0.0], 4, true).unwrap();
        for (x, y) in r.a.iter().zip(t.diag()) {
            assert!((x - y).abs() < 1e-14);
        }
        for (x, y) in r.b.iter().zip(t.offdiag()) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(r.terminated);
    }

    #[test]
    fn dense_matrix_operator_is_symmetric() {
        let m = nalgebra::DMatrix::from_fn(6, 6, |i, j| ((i + 1) * (j + 1)) as f64 / (i + j + 1) as f64);
        assert!(symmetry_defect(&m, 4, 1) < 1e-12);
        let skew = nalgebra::DMatrix::from_fn(3, 3, |i, j| i as f64 - j as f64);
        assert!(symmetry_defect(&skew, 4, 1) > 1e-3);
    }

    fn random_diag(dim: usize, seed: u64) -> (DiagonalOperator<f64>, Vec<f64>) {
        let mut rng = StdRng::seed_from_u64(seed);
        let diag = (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.1..1.0)).collect();
        let nv = norm(&v);
        (DiagonalOperator { diag }, v.iter().map(|x| x / nv).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn basis_is_orthonormal_and_faithful(dim in 2usize..60, seed in any::<u64>()) {
            let (op, v) = random_diag(dim, seed);
            let r = run_lanczos(&op, &v, dim, true).unwrap();
            let basis = r.basis.as_ref().unwrap();
            for (i, p) in basis.iter().enumerate() {
                for (j, q) in basis.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((dot(p, q) - target).abs() < 1e-10);
                }
            }
            // B^T H B reproduces the tridiagonal
            let mut hq = vec![0.0; dim];
            for (j, q) in basis.iter().enumerate() {
                op.apply(q, &mut hq);
                for (i, p) in basis.iter().enumerate() {
                    let t = if i == j {
                        r.a[i]
                    } else if i + 1 == j {
                        r.b[i]
                    } else if j + 1 == i {
                        r.b[j]
                    } else {
                        0.0
                    };
                    prop_assert!((dot(p, &hq) - t).abs() < 1e-8);
                }
            }
        }

        #[test]
        fn shift_moves_only_the_diagonal(dim in 2usize..40, seed in any::<u64>(), c in -10.0f64..10.0) {
            let (op, v) = random_diag(dim, seed);
            let r = run_lanczos(&op, &v, dim, true).unwrap();
            let s = run_lanczos(&Shifted { inner: &op, shift: c }, &v, dim, true).unwrap();
            prop_assert_eq!(r.a.len(), s.a.len());
            for (x, y) in r.a.iter().zip(&s.a) {
                prop_assert!((x + c - y).abs() < 1e-10);
            }
            for (x, y) in r.b.iter().zip(&s.b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
