//! Seeded random instances: spectra, unitaries, unit vectors.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{adjoint, CMatrix};

/// `n` phases drawn uniformly from `[0, 2π)`.
pub fn uniform_phases<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>() * TAU).collect()
}

/// Equally spaced phases with independent jitter of up to `jitter` times
/// the spacing, all rotated by a uniform offset.
pub fn jittered_phases<R: Rng + ?Sized>(rng: &mut R, n: usize, jitter: f64) -> Vec<f64> {
    let spacing = TAU / n as f64;
    let offset = rng.random::<f64>() * TAU;
    (0..n)
        .map(|j| offset + spacing * (j as f64 + jitter * (rng.random::<f64>() - 0.5)))
        .collect()
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-distributed unitary: Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix<f64> {
    let mut q = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    for j in 0..n {
        // twice is enough for full double precision orthogonality
        for _pass in 0..2 {
            for i in 0..j {
                let proj: Complex<f64> = (0..n).map(|r| q[(r, i)].conj() * q[(r, j)]).sum();
                for r in 0..n {
                    let qi = q[(r, i)];
                    q[(r, j)] -= qi * proj;
                }
            }
        }
        let norm = (0..n).map(|r| q[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            q[(r, j)] /= norm;
        }
    }
    q
}

/// `Q·diag(exp(iθ))·Q†`.
pub fn conjugated_unitary(q: &CMatrix<f64>, phases: &[f64]) -> CMatrix<f64> {
    let n = phases.len();
    let d = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex::from_polar(1.0, phases[r])
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    q * d * adjoint(q)
}

/// Uniform point on the unit sphere of `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex<f64>> {
    let v: Vec<Complex<f64>> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Uniform point in the closed unit disk.
pub fn disk_point<R: Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    let r = rng.random::<f64>().sqrt();
    Complex::from_polar(r, rng.random::<f64>() * TAU)
}
