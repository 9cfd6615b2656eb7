//! Newton refinement of a frame towards a compressing subspace.
//!
//! Work in eigen-coordinates with shifted eigenvalues `μ_m = λ_m − λ`. The
//! span of a frame `Z` (one column per vector) satisfies `PσP = λP` exactly
//! when `Z†·Re(μ)·Z = 0` and `Z†·Im(μ)·Z = 0`; adding `Z†Z = I` gives `3k²`
//! real equations in `2·|support|·k` unknowns. The system is underdetermined,
//! so minimum-norm Gauss–Newton steps (with Levenberg damping) converge
//! quadratically from a nearby seed.
//!
//! Pairs built from two vertex-sharing triangles are orthonormal and match
//! `λ` on the diagonal, but their cross term `⟨φ1|σ|φ2⟩` does not vanish in
//! general; they serve as the seed here. Runs in double precision.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Accepted max-abs residual of the refined frame.
pub const REFINE_TOL: f64 = 1e-12;
const TARGET: f64 = 1e-15;
const MAX_ITERATIONS: usize = 100;
/// An attempt is abandoned when the residual norm fails to halve over this
/// many accepted steps; a perturbed restart is far cheaper than crawling.
const STALL_WINDOW: usize = 10;
const RESTART_SCALES: [f64; 8] = [1e-3, 1e-2, 0.05, 0.1, 0.3, 1.0, 3.0, 10.0];
const RESTART_SEED: u64 = 0x05ee_d0ff_4a3e;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    /// Number of frame columns that were moved.
    pub columns: usize,
    /// Number of eigen-labels the columns were allowed to use.
    pub support: usize,
    pub iterations: usize,
    pub restarts: usize,
    /// Max-abs defect of the seed.
    pub initial: f64,
    /// Max-abs defect after refinement.
    pub residual: f64,
}

/// Real residual vector: upper triangles of `Z†Z − I`, `Z†Re(μ)Z`, `Z†Im(μ)Z`.
fn residual(mu: &[Complex64], z: &DMatrix<Complex64>) -> DVector<f64> {
    let k = z.ncols();
    let mut out = Vec::with_capacity(3 * k * k);
    for form in 0..3 {
        for i in 0..k {
            for j in i..k {
                let mut q = Complex64::new(0.0, 0.0);
                for (m, w) in mu.iter().enumerate() {
                    q += weight(form, *w) * z[(m, i)].conj() * z[(m, j)];
                }
                if form == 0 && i == j {
                    q -= 1.0;
                }
                out.push(q.re);
                if i < j {
                    out.push(q.im);
                }
            }
        }
    }
    DVector::from_vec(out)
}

fn weight(form: usize, mu: Complex64) -> f64 {
    match form {
        0 => 1.0,
        1 => mu.re,
        _ => mu.im,
    }
}

fn jacobian(mu: &[Complex64], z: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (n, k) = z.shape();
    let rows = 3 * k * k;
    let mut jac = DMatrix::zeros(rows, 2 * n * k);
    let mut row = 0;
    for form in 0..3 {
        for i in 0..k {
            for j in i..k {
                for (m, w) in mu.iter().enumerate() {
                    let w = weight(form, *w);
                    let columns: &[usize] = if i == j { &[i] } else { &[i, j] };
                    for &l in columns {
                        // d/dRe and d/dIm of w·conj(z_mi)·z_mj with respect to z_ml
                        let mut d_re = Complex64::new(0.0, 0.0);
                        let mut d_im = Complex64::new(0.0, 0.0);
                        if l == i {
                            d_re += z[(m, j)];
                            d_im += Complex64::new(0.0, -1.0) * z[(m, j)];
                        }
                        if l == j {
                            d_re += z[(m, i)].conj();
                            d_im += Complex64::new(0.0, 1.0) * z[(m, i)].conj();
                        }
                        let col = 2 * (m * k + l);
                        jac[(row, col)] = w * d_re.re;
                        jac[(row, col + 1)] = w * d_im.re;
                        if i < j {
                            jac[(row + 1, col)] = w * d_re.im;
                            jac[(row + 1, col + 1)] = w * d_im.im;
                        }
                    }
                }
                row += if i < j { 2 } else { 1 };
            }
        }
    }
    jac
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn to_vars(z: &DMatrix<Complex64>) -> DVector<f64> {
    let (n, k) = z.shape();
    DVector::from_fn(2 * n * k, |idx, _| {
        let c = z[(idx / 2 / k, idx / 2 % k)];
        if idx % 2 == 0 {
            c.re
        } else {
            c.im
        }
    })
}

fn from_vars(v: &DVector<f64>, n: usize, k: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, k, |m, l| {
        Complex64::new(v[2 * (m * k + l)], v[2 * (m * k + l) + 1])
    })
}

/// Max-abs entry of `Z†Z − I`, `Z†Re(μ)Z` and `Z†Im(μ)Z`.
pub fn frame_defect(mu: &[Complex64], z: &DMatrix<Complex64>) -> f64 {
    max_abs(&residual(mu, z))
}

/// Levenberg–Marquardt on the dual normal equations.
fn newton(mu: &[Complex64], seed: DMatrix<Complex64>) -> (DMatrix<Complex64>, usize, f64) {
    let (n, k) = seed.shape();
    let mut x = to_vars(&seed);
    let mut z = seed;
    let mut r = residual(mu, &z);
    let mut norm = r.norm();
    let mut damping = 1e-8;
    let mut iterations = 0;
    let mut history = vec![norm];
    while iterations < MAX_ITERATIONS && max_abs(&r) > TARGET {
        if history.len() > STALL_WINDOW && norm > 0.5 * history[history.len() - 1 - STALL_WINDOW] {
            break;
        }
        iterations += 1;
        let jac = jacobian(mu, &z);
        let jjt = &jac * jac.transpose();
        let mut improved = false;
        while damping < 1e12 {
            let system = &jjt + DMatrix::identity(jjt.nrows(), jjt.ncols()) * damping;
            let Some(chol) = Cholesky::new(system) else {
                damping *= 10.0;
                continue;
            };
            let step = jac.transpose() * chol.solve(&r);
            let trial_x = &x - step;
            let trial_z = from_vars(&trial_x, n, k);
            let trial_r = residual(mu, &trial_z);
            let trial_norm = trial_r.norm();
            if trial_norm < norm {
                x = trial_x;
                z = trial_z;
                r = trial_r;
                norm = trial_norm;
                damping = (damping * 0.1).max(1e-15);
                improved = true;
                history.push(norm);
                break;
            }
            damping *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let defect = max_abs(&r);
    (z, iterations, defect)
}

/// Orthonormal frame with the same span (thin QR).
fn orthonormalize(z: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let k = z.ncols();
    let q = z.qr().q();
    q.columns(0, k).into_owned()
}

/// Moves `seed` (rows indexed like `mu`) to a frame whose span compresses
/// `diag(μ)` to zero. Tries the seed first, then deterministic perturbations
/// of growing size. Returns `None` if no attempt reaches [`REFINE_TOL`].
pub fn refine_frame(
    mu: &[Complex64],
    seed: &DMatrix<Complex64>,
) -> Option<(DMatrix<Complex64>, RefineReport)> {
    assert_eq!(mu.len(), seed.nrows(), "frame rows must match the support");
    let (n, k) = seed.shape();
    let initial = frame_defect(mu, seed);
    let mut rng = ChaCha8Rng::seed_from_u64(RESTART_SEED);
    let mut total = 0;
    for restart in 0..=RESTART_SCALES.len() * 4 {
        let start = if restart == 0 {
            seed.clone()
        } else {
            let scale = RESTART_SCALES[(restart - 1) % RESTART_SCALES.len()];
            let noise = DMatrix::from_fn(n, k, |_, _| {
                Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * scale
            });
            orthonormalize(seed + noise)
        };
        let (z, iterations, _) = newton(mu, start);
        total += iterations;
        let z = orthonormalize(z);
        let defect = frame_defect(mu, &z);
        if defect <= REFINE_TOL {
            return Some((
                z,
                RefineReport {
                    columns: k,
                    support: n,
                    iterations: total,
                    restarts: restart,
                    initial,
                    residual: defect,
                },
            ));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn shifted(phases: &[f64], lambda: Complex64) -> Vec<Complex64> {
        phases
            .iter()
            .map(|&t| Complex64::from_polar(1.0, t) - lambda)
            .collect()
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mu = shifted(&[0.0, 1.0, 2.5, 4.0], Complex64::new(0.1, -0.2));
        let z = DMatrix::from_fn(4, 2, |m, l| {
            Complex64::new((m + 2 * l) as f64 * 0.3 - 0.5, (m as f64 - l as f64) * 0.2)
        });
        let jac = jacobian(&mu, &z);
        let x = to_vars(&z);
        let h = 1e-7;
        for c in 0..x.len() {
            let mut xp = x.clone();
            xp[c] += h;
            let mut xm = x.clone();
            xm[c] -= h;
            let fd = (residual(&mu, &from_vars(&xp, 4, 2)) - residual(&mu, &from_vars(&xm, 4, 2)))
                / (2.0 * h);
            for r in 0..fd.len() {
                assert!((fd[r] - jac[(r, c)]).abs() < 1e-6, "row {r} col {c}");
            }
        }
    }

    #[test]
    fn pentagon_centre_from_coordinate_seed() {
        let phases: Vec<f64> = (0..5).map(|j| 2.0 * PI * j as f64 / 5.0).collect();
        let mu = shifted(&phases, Complex64::new(0.0, 0.0));
        let seed = DMatrix::from_fn(5, 2, |m, l| {
            Complex64::new(if m == l { 1.0 } else { 0.0 }, 0.0)
        });
        let (z, report) = refine_frame(&mu, &seed).unwrap();
        assert!(report.residual <= REFINE_TOL);
        assert!(frame_defect(&mu, &z) <= REFINE_TOL);
    }

    #[test]
    fn infeasible_target_is_reported() {
        // three points cannot carry a rank-2 compression away from a vertex
        let mu = shifted(
            &[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0],
            Complex64::new(0.0, 0.0),
        );
        let seed = DMatrix::from_fn(3, 2, |m, l| {
            Complex64::new(if m == l { 1.0 } else { 0.0 }, 0.0)
        });
        assert!(refine_frame(&mu, &seed).is_none());
    }
}
