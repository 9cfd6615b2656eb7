//! Orthonormal vector pairs from two weight systems sharing one eigen-label.
//!
//! Given convex weights `p` over `{s} ∪ T` and `q` over `{s} ∪ R` that both
//! reproduce the same target `λ`, with `T ∩ R = ∅` and the shared weight
//! `p_s ≤ 1/2`, the vectors
//!
//! ```text
//! φ1 = (√p_s cosθ + i√q_s sinθ)ψ_s + e^{iα} cosθ Σ√p_t ψ_t + e^{iβ} sinθ Σ√q_r ψ_r
//! φ2 = (√p_s cosτ + i√q_s sinτ)ψ_s +        cosτ Σ√p_t ψ_t +        sinτ Σ√q_r ψ_r
//! ```
//!
//! are unit vectors with `⟨φ|σ|φ⟩ = λ` for any angles. Orthogonality holds
//! when `x = tanθ`, `y = tanτ` solve
//!
//! ```text
//! p_s + q_s·xy + cosα(1 − p_s) + cosβ(1 − q_s)·xy = 0
//! √(p_s q_s)(x − y) + sinα(1 − p_s) + sinβ(1 − q_s)·xy = 0
//! ```
//!
//! The default gauge fixes `β = 0`, `cosα = −p_s/(1 − p_s)`, `sinα ≥ 0`,
//! which zeroes the constant of the eliminated quadratic and admits the root
//! `x = 0`, `tanτ = √(1 − 2p_s)/√(p_s q_s)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::inner;
use crate::scalar::{Cx, Real};
use crate::spectrum::EigenSystem;
use crate::triangle::{BarycentricWeights, RECONSTRUCTION_TOL, SUM_TOL};
use num_complex::Complex;

pub const ORTHOGONALITY_TOL: f64 = 1e-10;
pub const EQUATION_TOL: f64 = 1e-10;
const DENOMINATOR_GUARD: f64 = 1e-12;
/// Below this `p_s·q_s` the shared coordinate is negligible in one of the
/// two vectors and the plain triangle vectors are already orthogonal.
pub const DEGENERATE_PRODUCT: f64 = 1e-14;
const SEARCH_STEPS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SharedVertexProblem<T: Real> {
    pub shared: usize,
    pub p1: T,
    pub q1: T,
    pub t_weights: Vec<(usize, T)>,
    pub r_weights: Vec<(usize, T)>,
}

impl<T: Real> SharedVertexProblem<T> {
    pub fn new(
        shared: usize,
        p1: T,
        q1: T,
        t_weights: Vec<(usize, T)>,
        r_weights: Vec<(usize, T)>,
    ) -> Result<Self> {
        let overlap = t_weights
            .iter()
            .any(|(t, _)| r_weights.iter().any(|(r, _)| r == t));
        let contains_shared = t_weights
            .iter()
            .chain(&r_weights)
            .any(|(j, _)| *j == shared);
        if overlap || contains_shared {
            return Err(Error::InvalidInput(
                "weight supports must meet only at the shared label".into(),
            ));
        }
        let all_weights = std::iter::once(&p1)
            .chain(std::iter::once(&q1))
            .chain(t_weights.iter().map(|(_, w)| w))
            .chain(r_weights.iter().map(|(_, w)| w));
        if all_weights
            .into_iter()
            .any(|w| !w.is_finite() || *w < T::zero())
        {
            return Err(Error::InvalidInput(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let sum_p = p1 + t_weights.iter().map(|(_, w)| *w).sum::<T>();
        let sum_q = q1 + r_weights.iter().map(|(_, w)| *w).sum::<T>();
        let tol = T::tol(SUM_TOL);
        if (sum_p - T::one()).abs() > tol || (sum_q - T::one()).abs() > tol {
            return Err(Error::InvalidInput("weights do not sum to one".into()));
        }
        Ok(Self {
            shared,
            p1,
            q1,
            t_weights,
            r_weights,
        })
    }

    /// Problem for two triangles sharing exactly one label.
    pub fn from_triangles(
        first: &BarycentricWeights<T>,
        second: &BarycentricWeights<T>,
    ) -> Result<Self> {
        let common: Vec<usize> = first
            .triangle
            .indices()
            .into_iter()
            .filter(|&j| second.triangle.contains_label(j))
            .collect();
        let [shared] = common[..] else {
            return Err(Error::InvalidInput(format!(
                "triangles {} and {} must share exactly one vertex",
                first.triangle, second.triangle
            )));
        };
        let p1 = first.weight_of(shared).expect("shared label");
        let q1 = second.weight_of(shared).expect("shared label");
        let t = first.entries().filter(|&(j, _)| j != shared).collect();
        let r = second.entries().filter(|&(j, _)| j != shared).collect();
        Self::new(shared, p1, q1, t, r)
    }

    /// Exchanges the roles of the two weight systems.
    pub fn swapped(&self) -> Self {
        Self {
            shared: self.shared,
            p1: self.q1,
            q1: self.p1,
            t_weights: self.r_weights.clone(),
            r_weights: self.t_weights.clone(),
        }
    }

    fn targets(&self, es: &EigenSystem<T>) -> (Cx<T>, Cx<T>) {
        let s = es.eigenvalue(self.shared as i64);
        let lp = self.t_weights.iter().fold(s * self.p1, |acc, &(j, w)| {
            acc + es.eigenvalue(j as i64) * w
        });
        let lq = self.r_weights.iter().fold(s * self.q1, |acc, &(j, w)| {
            acc + es.eigenvalue(j as i64) * w
        });
        (lp, lq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairParameters<T: Real> {
    pub alpha: T,
    pub beta: T,
    pub theta: T,
    pub tau: T,
    pub x: T,
    pub y: T,
    pub a: T,
    pub b: T,
}

/// Coefficients `z_m` of a vector in the eigenbasis, keyed by label.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorCoefficients<T: Real> {
    pub coefficients: Vec<(usize, Cx<T>)>,
    /// `|Σ|z_m|² − 1|`.
    pub norm_residual: T,
    /// `|Σ λ_m|z_m|² − λ|`.
    pub compression_residual: T,
}

impl<T: Real> VectorCoefficients<T> {
    pub(crate) fn measure(
        mut coefficients: Vec<(usize, Cx<T>)>,
        es: &EigenSystem<T>,
        lambda: Cx<T>,
    ) -> Self {
        coefficients.sort_by_key(|&(j, _)| j);
        let norm: T = coefficients.iter().map(|(_, z)| z.norm_sqr()).sum();
        let image = coefficients
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &(j, z)| {
                acc + es.eigenvalue(j as i64) * z.norm_sqr()
            });
        Self {
            coefficients,
            norm_residual: (norm - T::one()).abs(),
            compression_residual: (image - lambda).norm(),
        }
    }

    /// Dense coordinate vector of length `n` (labels are 1-based).
    pub fn dense(&self, n: usize) -> Vec<Cx<T>> {
        let mut v = vec![Complex::new(T::zero(), T::zero()); n];
        for &(j, z) in &self.coefficients {
            v[j - 1] += z;
        }
        v
    }
}

/// How a pair was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPath {
    ClosedForm,
    Degenerate,
    Search,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSolution<T: Real> {
    pub first: VectorCoefficients<T>,
    pub second: VectorCoefficients<T>,
    /// `None` on the degenerate path.
    pub parameters: Option<PairParameters<T>>,
    pub path: PairPath,
    /// `|⟨φ1, φ2⟩|`.
    pub overlap: T,
    /// True when the roles of the two weight systems were exchanged so that
    /// the shared weight of the first is at most one half.
    pub swapped: bool,
}

/// Coefficients `A` and `B` of the quadratic `x² + Ax + B = 0`:
///
/// ```text
/// A = [(p−1) sinα (q + (1−q)cosβ) + (q−1) sinβ ((p−1)cosα − p)] / [√(pq)(q + (1−q)cosβ)]
/// B = (p + (1−p)cosα) / (q + (1−q)cosβ)
/// ```
///
/// Eliminating `y` from the orthogonality equations actually yields
/// `x² − Ax + B = 0`; both share the discriminant `A² − 4B`.
pub fn discriminant_coeffs<T: Real>(p1: T, q1: T, alpha: T, beta: T) -> Result<(T, T)> {
    let one = T::one();
    let den = q1 + (one - q1) * beta.cos();
    if den.abs() <= T::tol(DENOMINATOR_GUARD) {
        return Err(Error::DegenerateDenominator);
    }
    if p1 * q1 <= T::zero() {
        return Err(Error::InvalidInput(
            "discriminant coefficients need p1·q1 > 0".into(),
        ));
    }
    let root = (p1 * q1).sqrt();
    let num_a =
        (p1 - one) * alpha.sin() * den + (q1 - one) * beta.sin() * ((p1 - one) * alpha.cos() - p1);
    let a = num_a / (root * den);
    let b = (p1 + (one - p1) * alpha.cos()) / den;
    Ok((a, b))
}

/// Residual of the real-part orthogonality equation.
pub fn real_orthogonality_residual<T: Real>(p1: T, q1: T, alpha: T, beta: T, x: T, y: T) -> T {
    let one = T::one();
    (p1 + q1 * x * y + alpha.cos() * (one - p1) + beta.cos() * (one - q1) * x * y).abs()
}

/// Residual of the imaginary-part orthogonality equation.
pub fn imag_orthogonality_residual<T: Real>(p1: T, q1: T, alpha: T, beta: T, x: T, y: T) -> T {
    let one = T::one();
    ((p1 * q1).sqrt() * (x - y) + alpha.sin() * (one - p1) + beta.sin() * (one - q1) * x * y).abs()
}

/// Vector for a single convex weight system: `√p` at each vertex.
pub fn vector_from_triangle<T: Real>(w: &BarycentricWeights<T>) -> VectorCoefficients<T> {
    let coefficients: Vec<(usize, Cx<T>)> = w
        .entries()
        .map(|(j, p)| (j, Complex::new(p.sqrt(), T::zero())))
        .collect();
    let sum: T = w.weights.iter().copied().sum();
    VectorCoefficients {
        coefficients,
        norm_residual: (sum - T::one()).abs(),
        compression_residual: w.residual,
    }
}

struct Angles<T> {
    cos_theta: T,
    sin_theta: T,
    cos_tau: T,
    sin_tau: T,
    phase_alpha: Cx<T>,
    phase_beta: Cx<T>,
}

type Coefficients<T> = Vec<(usize, Cx<T>)>;

fn assemble<T: Real>(
    problem: &SharedVertexProblem<T>,
    g: &Angles<T>,
) -> (Coefficients<T>, Coefficients<T>) {
    let sp = problem.p1.sqrt();
    let sq = problem.q1.sqrt();
    let head = |c: T, s: T| Complex::new(sp * c, sq * s);
    let mut first = vec![(problem.shared, head(g.cos_theta, g.sin_theta))];
    let mut second = vec![(problem.shared, head(g.cos_tau, g.sin_tau))];
    for &(j, p) in &problem.t_weights {
        first.push((j, g.phase_alpha * (g.cos_theta * p.sqrt())));
        second.push((j, Complex::new(g.cos_tau * p.sqrt(), T::zero())));
    }
    for &(j, q) in &problem.r_weights {
        first.push((j, g.phase_beta * (g.sin_theta * q.sqrt())));
        second.push((j, Complex::new(g.sin_tau * q.sqrt(), T::zero())));
    }
    (first, second)
}

fn finish<T: Real>(
    problem: &SharedVertexProblem<T>,
    es: &EigenSystem<T>,
    lambda: Cx<T>,
    angles: &Angles<T>,
    parameters: Option<PairParameters<T>>,
    path: PairPath,
    swapped: bool,
) -> PairSolution<T> {
    let (a, b) = assemble(problem, angles);
    let first = VectorCoefficients::measure(a, es, lambda);
    let second = VectorCoefficients::measure(b, es, lambda);
    let n = es.dim();
    let overlap = inner(&first.dense(n), &second.dense(n)).norm();
    PairSolution {
        first,
        second,
        parameters,
        path,
        overlap,
        swapped,
    }
}

fn acceptable<T: Real>(s: &PairSolution<T>) -> bool {
    let norm_tol = T::tol(EQUATION_TOL);
    let comp_tol = T::tol(RECONSTRUCTION_TOL);
    s.overlap <= T::tol(ORTHOGONALITY_TOL)
        && [&s.first, &s.second]
            .iter()
            .all(|v| v.norm_residual <= norm_tol && v.compression_residual <= comp_tol)
}

/// Two orthonormal vectors compressing `σ` to the common target of the
/// problem's two weight systems.
pub fn solve_pair<T: Real>(
    problem: &SharedVertexProblem<T>,
    es: &EigenSystem<T>,
) -> Result<PairSolution<T>> {
    let half = T::lit(0.5);
    if problem.p1 > half && problem.q1 > half {
        return Err(Error::BothHeavy {
            p1: problem.p1.to_f64().unwrap_or(f64::NAN),
            q1: problem.q1.to_f64().unwrap_or(f64::NAN),
        });
    }
    let swapped = problem.p1 > half;
    let owned;
    let problem = if swapped {
        owned = problem.swapped();
        &owned
    } else {
        problem
    };
    let (lp, lq) = problem.targets(es);
    if (lp - lq).norm() > T::tol(RECONSTRUCTION_TOL) {
        return Err(Error::InvalidInput(
            "the two weight systems reproduce different targets".into(),
        ));
    }
    let lambda = lp;

    if problem.p1 * problem.q1 <= T::tol(DEGENERATE_PRODUCT) {
        let solution = finish(
            problem,
            es,
            lambda,
            &degenerate_angles(),
            None,
            PairPath::Degenerate,
            swapped,
        );
        if acceptable(&solution) {
            return Ok(solution);
        }
    } else {
        let (angles, params) = closed_form(problem.p1, problem.q1)?;
        let solution = finish(
            problem,
            es,
            lambda,
            &angles,
            Some(params),
            PairPath::ClosedForm,
            swapped,
        );
        if acceptable(&solution) {
            return Ok(solution);
        }
    }
    let mut solution = solve_pair_by_search(problem, es)?;
    solution.swapped = swapped;
    Ok(solution)
}

/// Limit of the closed form as `p_s·q_s → 0`: `α = τ = π/2`, `θ = 0`.
fn degenerate_angles<T: Real>() -> Angles<T> {
    Angles {
        cos_theta: T::one(),
        sin_theta: T::zero(),
        cos_tau: T::zero(),
        sin_tau: T::one(),
        phase_alpha: Complex::new(T::zero(), T::one()),
        phase_beta: Complex::new(T::one(), T::zero()),
    }
}

fn closed_form<T: Real>(p1: T, q1: T) -> Result<(Angles<T>, PairParameters<T>)> {
    let one = T::one();
    let slack = (one - T::lit(2.0) * p1).max(T::zero()).sqrt();
    let cos_alpha = -p1 / (one - p1);
    let sin_alpha = slack / (one - p1);
    let root = (p1 * q1).sqrt();
    let r = slack.hypot(root);
    let (cos_tau, sin_tau) = if r > T::zero() {
        (root / r, slack / r)
    } else {
        (one, T::zero())
    };
    let alpha = sin_alpha.atan2(cos_alpha);
    let tau = slack.atan2(root);
    let (a, b) = discriminant_coeffs(p1, q1, alpha, T::zero())?;
    let params = PairParameters {
        alpha,
        beta: T::zero(),
        theta: T::zero(),
        tau,
        x: T::zero(),
        y: slack / root,
        a,
        b,
    };
    let angles = Angles {
        cos_theta: one,
        sin_theta: T::zero(),
        cos_tau,
        sin_tau,
        phase_alpha: Complex::new(cos_alpha, sin_alpha),
        phase_beta: Complex::new(one, T::zero()),
    };
    Ok((angles, params))
}

/// Deterministic scan over `(α, β)` on a uniform grid. For each gauge with a
/// real root of the eliminated quadratic, `x` is taken from the root and `y`
/// from `xy = −B`; the first candidate meeting every tolerance is returned.
pub fn solve_pair_by_search<T: Real>(
    problem: &SharedVertexProblem<T>,
    es: &EigenSystem<T>,
) -> Result<PairSolution<T>> {
    let (p1, q1) = (problem.p1, problem.q1);
    if p1 > T::lit(0.5) || p1 * q1 <= T::zero() {
        return Err(Error::NoSolution);
    }
    let (lambda, _) = problem.targets(es);
    let step = T::two_pi() / T::lit(SEARCH_STEPS as f64);
    let eq_tol = T::tol(EQUATION_TOL);
    for ia in 0..SEARCH_STEPS {
        let alpha = step * T::lit(ia as f64);
        for ib in 0..SEARCH_STEPS {
            let beta = step * T::lit(ib as f64);
            let Ok((a, b)) = discriminant_coeffs(p1, q1, alpha, beta) else {
                continue;
            };
            let disc = a * a - T::lit(4.0) * b;
            if disc < T::zero() {
                continue;
            }
            let s = disc.sqrt();
            for x in [(a + s) * T::lit(0.5), (a - s) * T::lit(0.5)] {
                let y = if x == T::zero() {
                    if b.abs() > eq_tol {
                        continue;
                    }
                    alpha.sin() * (T::one() - p1) / (p1 * q1).sqrt()
                } else {
                    -b / x
                };
                if !y.is_finite()
                    || real_orthogonality_residual(p1, q1, alpha, beta, x, y) > eq_tol
                    || imag_orthogonality_residual(p1, q1, alpha, beta, x, y) > eq_tol
                {
                    continue;
                }
                let (theta, tau) = (x.atan(), y.atan());
                let angles = Angles {
                    cos_theta: theta.cos(),
                    sin_theta: theta.sin(),
                    cos_tau: tau.cos(),
                    sin_tau: tau.sin(),
                    phase_alpha: Complex::new(alpha.cos(), alpha.sin()),
                    phase_beta: Complex::new(beta.cos(), beta.sin()),
                };
                let params = PairParameters {
                    alpha,
                    beta,
                    theta,
                    tau,
                    x,
                    y,
                    a,
                    b,
                };
                let solution = finish(
                    problem,
                    es,
                    lambda,
                    &angles,
                    Some(params),
                    PairPath::Search,
                    false,
                );
                if acceptable(&solution) {
                    return Ok(solution);
                }
            }
        }
    }
    Err(Error::NoSolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::ingest_spectrum;
    use crate::triangle::{solve_barycentric, TriangleSpec};
    use std::f64::consts::PI;

    fn gram(s: &PairSolution<f64>, n: usize) -> [[f64; 2]; 2] {
        let u = s.first.dense(n);
        let v = s.second.dense(n);
        [
            [inner(&u, &u).norm(), inner(&u, &v).norm()],
            [inner(&v, &u).norm(), inner(&v, &v).norm()],
        ]
    }

    fn thirds_problem() -> (EigenSystem<f64>, SharedVertexProblem<f64>) {
        // cube roots with the two non-real roots doubled, so both weight
        // systems can use disjoint labels for them
        let es = ingest_spectrum(&[
            0.0,
            2.0 * PI / 3.0,
            2.0 * PI / 3.0,
            4.0 * PI / 3.0,
            4.0 * PI / 3.0,
        ])
        .unwrap();
        let third = 1.0 / 3.0;
        let problem = SharedVertexProblem::new(
            1,
            third,
            third,
            vec![(2, third), (4, third)],
            vec![(3, third), (5, third)],
        )
        .unwrap();
        (es, problem)
    }

    #[test]
    fn equal_thirds_closed_form() {
        let (es, problem) = thirds_problem();
        let s = solve_pair(&problem, &es).unwrap();
        assert_eq!(s.path, PairPath::ClosedForm);
        let params = s.parameters.unwrap();
        assert!((params.alpha - 2.0 * PI / 3.0).abs() < 1e-12);
        assert!((params.tau - PI / 3.0).abs() < 1e-12);
        let g = gram(&s, 5);
        assert!((g[0][0] - 1.0).abs() < 1e-12 && (g[1][1] - 1.0).abs() < 1e-12);
        assert!(g[0][1] < 1e-12 && g[1][0] < 1e-12);
        assert!(s.first.compression_residual < 1e-12 && s.second.compression_residual < 1e-12);
    }

    #[test]
    fn threshold_half() {
        // labels: 1 → 1, 2 → e^{2πi/3}, 3 → −1, 4 → e^{4πi/3}; both systems give 0
        let es = ingest_spectrum(&[0.0, 2.0 * PI / 3.0, PI, 4.0 * PI / 3.0]).unwrap();
        let third = 1.0 / 3.0;
        let problem =
            SharedVertexProblem::new(1, 0.5, third, vec![(3, 0.5)], vec![(2, third), (4, third)])
                .unwrap();
        let s = solve_pair(&problem, &es).unwrap();
        let params = s.parameters.unwrap();
        assert!((params.alpha - PI).abs() < 1e-12);
        assert!(params.tau.abs() < 1e-12);
        let r = 0.5f64.sqrt();
        let u = s.first.dense(4);
        let v = s.second.dense(4);
        assert!((u[0] - Complex::new(r, 0.0)).norm() < 1e-12);
        assert!((u[2] + Complex::new(r, 0.0)).norm() < 1e-12);
        assert!((v[0] - Complex::new(r, 0.0)).norm() < 1e-12);
        assert!((v[2] - Complex::new(r, 0.0)).norm() < 1e-12);
        assert!(s.overlap < 1e-15);
    }

    #[test]
    fn zero_shared_weight_uses_disjoint_supports() {
        let es = ingest_spectrum(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]).unwrap();
        let problem =
            SharedVertexProblem::new(1, 0.0, 0.5, vec![(2, 0.5), (4, 0.5)], vec![(3, 0.5)])
                .unwrap();
        let s = solve_pair(&problem, &es).unwrap();
        assert_eq!(s.path, PairPath::Degenerate);
        assert!(s
            .first
            .coefficients
            .iter()
            .all(|&(j, z)| j != 1 || z.norm() == 0.0));
        assert!(s
            .second
            .coefficients
            .iter()
            .all(|&(j, z)| (j == 1 || j == 3) || z.norm() == 0.0));
        assert_eq!(s.overlap, 0.0);
    }

    #[test]
    fn closed_form_gauge_zeroes_b() {
        for &p1 in &[1e-6, 0.1, 0.25, 0.4, 0.5] {
            let (_, params) = closed_form::<f64>(p1, 0.3).unwrap();
            assert!(params.b.abs() <= 1e-12, "B = {} at p1 = {p1}", params.b);
            assert!(params.a * params.a >= 4.0 * params.b);
            assert!(
                real_orthogonality_residual(p1, 0.3, params.alpha, 0.0, params.x, params.y) < 1e-10
            );
            assert!(
                imag_orthogonality_residual(p1, 0.3, params.alpha, 0.0, params.x, params.y) < 1e-10
            );
            // x = 0 solves x² + Ax + B = 0
            assert!((params.x * params.x + params.a * params.x + params.b).abs() < 1e-10);
        }
    }

    #[test]
    fn spurious_root_rejected() {
        let (p1, q1) = (0.3, 0.4);
        let (_, params) = closed_form::<f64>(p1, q1).unwrap();
        let x = -params.a;
        assert!((x * x + params.a * x + params.b).abs() < 1e-12);
        // paired with y from xy = −B = 0 it violates the imaginary equation
        assert!(imag_orthogonality_residual(p1, q1, params.alpha, 0.0, x, 0.0) > 1e-3);
        assert_eq!(params.x, 0.0);
    }

    #[test]
    fn discriminant_examples() {
        let third = 1.0 / 3.0;
        let (_, b) = discriminant_coeffs(third, third, 2.0 * PI / 3.0, 0.0).unwrap();
        assert!(b.abs() < 1e-15);
        let (a, b) = discriminant_coeffs(0.5, 0.4, PI, 0.0).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-15);
        for &(p, q) in &[(0.2, 0.7), (0.45, 0.1)] {
            let (_, b) = discriminant_coeffs::<f64>(p, q, 0.0, 0.0).unwrap();
            assert!((b - 1.0).abs() < 1e-15);
        }
        // q + (1 − q)cosβ = 0 at q = 0.5, β = π
        assert_eq!(
            discriminant_coeffs(0.3, 0.5, 0.0, PI),
            Err(Error::DegenerateDenominator)
        );
    }

    #[test]
    fn continuity_towards_zero_shared_weight() {
        let es = ingest_spectrum(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]).unwrap();
        let p1 = 1e-6;
        // both systems reproduce λ = p1
        let near = SharedVertexProblem::new(
            1,
            p1,
            0.5 + p1 / 2.0,
            vec![(2, 0.5 - p1 / 2.0), (4, 0.5 - p1 / 2.0)],
            vec![(3, 0.5 - p1 / 2.0)],
        )
        .unwrap();
        let at_zero =
            SharedVertexProblem::new(1, 0.0, 0.5, vec![(2, 0.5), (4, 0.5)], vec![(3, 0.5)])
                .unwrap();
        let s_near = solve_pair(&near, &es).unwrap();
        let s_zero = solve_pair(&at_zero, &es).unwrap();
        assert_eq!(s_near.path, PairPath::ClosedForm);
        assert_eq!(s_zero.path, PairPath::Degenerate);
        let a = s_near.second.dense(4);
        let b = s_zero.second.dense(4);
        let diff: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(diff < 1e-3, "{diff}");
    }

    #[test]
    fn both_heavy_rejected_and_swap_applied() {
        let es = ingest_spectrum(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]).unwrap();
        let heavy = SharedVertexProblem::new(1, 0.6, 0.6, vec![(3, 0.4)], vec![(2, 0.2), (4, 0.2)])
            .unwrap();
        assert!(matches!(
            solve_pair(&heavy, &es),
            Err(Error::BothHeavy { .. })
        ));
        // λ = 0.2 from {1, 3} (heavy at 1) and from {1, 2, 4} (light at 1)
        let lop = SharedVertexProblem::new(1, 0.6, 0.2, vec![(3, 0.4)], vec![(2, 0.4), (4, 0.4)])
            .unwrap();
        let s = solve_pair(&lop, &es).unwrap();
        assert!(s.swapped);
        assert!(s.overlap < 1e-12);
    }

    #[test]
    fn search_path_finds_orthonormal_pairs() {
        let (es, problem) = thirds_problem();
        let s = solve_pair_by_search(&problem, &es).unwrap();
        assert_eq!(s.path, PairPath::Search);
        assert!(s.overlap <= 1e-10);
        let p = s.parameters.unwrap();
        assert!(
            real_orthogonality_residual(problem.p1, problem.q1, p.alpha, p.beta, p.x, p.y) <= 1e-10
        );
        assert!(
            imag_orthogonality_residual(problem.p1, problem.q1, p.alpha, p.beta, p.x, p.y) <= 1e-10
        );
    }

    #[test]
    fn triangles_to_problem() {
        let phases: Vec<f64> = (0..5).map(|j| 2.0 * PI * j as f64 / 5.0).collect();
        let es = ingest_spectrum(&phases).unwrap();
        let zero = Complex::new(0.0, 0.0);
        let w1 = solve_barycentric(&es, &TriangleSpec::new(1, 3, 5, 5).unwrap(), zero).unwrap();
        let w2 = solve_barycentric(&es, &TriangleSpec::new(1, 2, 4, 5).unwrap(), zero).unwrap();
        let problem = SharedVertexProblem::from_triangles(&w1, &w2).unwrap();
        assert_eq!(problem.shared, 1);
        let s = solve_pair(&problem, &es).unwrap();
        assert!(s.overlap < 1e-12);
        let v = vector_from_triangle(&w1);
        // label 3 sits opposite the short edge {5, 1}
        let expected = [0.5257, 0.6687, 0.5257];
        for ((_, z), e) in v.coefficients.iter().zip(expected) {
            assert!((z.re - e).abs() < 1e-4);
        }
        assert!(v.compression_residual < 1e-12);
    }
}
