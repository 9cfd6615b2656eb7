//! Small dense complex matrix helpers.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::scalar::{Cx, Real};

pub type CMatrix<T> = DMatrix<Cx<T>>;

pub fn zero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex::new(T::one(), T::zero())
        } else {
            zero()
        }
    })
}

/// Conjugate transpose.
pub fn adjoint<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let (r, c) = m.shape();
    DMatrix::from_fn(c, r, |i, j| m[(j, i)].conj())
}

pub fn frobenius<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

pub fn trace<T: Real>(m: &CMatrix<T>) -> Cx<T> {
    (0..m.nrows().min(m.ncols())).fold(zero(), |acc, i| acc + m[(i, i)])
}

/// `⟨u, v⟩ = Σ conj(u_i)·v_i`, conjugate-linear in the first argument.
pub fn inner<T: Real>(u: &[Cx<T>], v: &[Cx<T>]) -> Cx<T> {
    u.iter()
        .zip(v)
        .fold(zero(), |acc, (a, b)| acc + a.conj() * b)
}
