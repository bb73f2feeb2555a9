//! Small dense square matrices and a cyclic Jacobi symmetric eigensolver.
//!
//! The arrays simulated here have at most a few hundred elements, so a
//! straightforward row-major store and Jacobi rotations are accurate and fast
//! enough while staying generic over [`Scalar`].

use num_complex::Complex;

use crate::error::{ensure_len, Error, Result};
use crate::Scalar;

/// Dense `n × n` matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_rows(n: usize, data: Vec<T>) -> Result<Self> {
        ensure_len(n * n, data.len())?;
        Ok(Self { n, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.n + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    /// `self · otherᵀ`.
    pub fn mul_transpose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self::from_fn(self.n, |i, j| {
            self.row(i)
                .iter()
                .zip(other.row(j))
                .map(|(&a, &b)| a * b)
                .sum()
        })
    }

    /// Real matrix times complex vector.
    pub fn mul_complex(&self, z: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        ensure_len(self.n, z.len())?;
        Ok((0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(z)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (&c, zj)| {
                        acc + zj * c
                    })
            })
            .collect())
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

/// Eigendecomposition `A = V · diag(values) · Vᵀ` of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    /// Eigenvalues in ascending order.
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Matrix<T>,
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi eigendecomposition.
///
/// Fails with [`Error::NumericFailure`] if the off-diagonal mass has not
/// vanished after a fixed number of sweeps or the input is not symmetric.
pub fn symmetric_eigen<T: Scalar>(matrix: &Matrix<T>) -> Result<SymmetricEigen<T>> {
    if !matrix.is_symmetric() {
        return Err(Error::NumericFailure(
            "eigendecomposition input is not symmetric".into(),
        ));
    }
    if matrix.data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericFailure(
            "eigendecomposition input has non-finite entries".into(),
        ));
    }

    let n = matrix.n;
    let mut a = matrix.clone();
    let mut v = Matrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let tol = T::epsilon() * T::from_usize_lossy(n.max(1)) * scale;

    let mut converged = n <= 1 || scale == T::zero();
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off = off_diagonal_norm(&a);
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > tol {
        return Err(Error::NumericFailure(format!(
            "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).partial_cmp(&a.get(j, j)).unwrap());
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let vectors = Matrix::from_fn(n, |row, col| v.get(row, order[col]));
    Ok(SymmetricEigen { values, vectors })
}

fn off_diagonal_norm<T: Scalar>(a: &Matrix<T>) -> T {
    let mut sum = T::zero();
    for i in 0..a.n {
        for j in 0..a.n {
            if i != j {
                let x = a.get(i, j);
                sum += x * x;
            }
        }
    }
    sum.sqrt()
}

/// Applies the rotation in the (p, q) plane that annihilates `a[p][q]`.
fn rotate<T: Scalar>(a: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let apq = a.get(p, q);
    if apq == T::zero() {
        return;
    }
    let two = T::lit(2.0);
    let theta = (a.get(q, q) - a.get(p, p)) / (two * apq);
    let t = theta.signum() / (theta.abs() + theta.hypot(T::one()));
    let c = T::one() / t.hypot(T::one());
    let s = t * c;

    let n = a.n;
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, c * akp - s * akq);
        a.set(k, q, s * akp + c * akq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, c * apk - s * aqk);
        a.set(q, k, s * apk + c * aqk);
    }
    // Exact symmetry and the annihilated pair.
    a.set(p, q, T::zero());
    a.set(q, p, T::zero());
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}
