//! Triangle plans for `N ∈ {3k, 3k−1, 3k−2}` and assembly of the rank-k
//! compression projector.
//!
//! Every plan consists of `k` triangles of eigen-labels, each with all cyclic
//! gaps at most `k`, so each contains `Ω_k`. Triangles are disjoint except
//! for zero, one or two shared labels; each shared label is weak (weight at
//! most one half) in one of its two triangles, which is what the pair
//! construction needs. The remaining triangles contribute plain square-root
//! weight vectors.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{adjoint, frobenius, identity, inner, trace, CMatrix};
use crate::pair::{
    solve_pair, vector_from_triangle, PairPath, SharedVertexProblem, VectorCoefficients,
};
use crate::refine::{frame_defect, refine_frame, RefineReport, REFINE_TOL};
use crate::region::{build_region, contains, Membership, DEFAULT_MEMBERSHIP_TOL};
use crate::scalar::{dot, Cx, Real};
use crate::spectrum::{reflect_labels, EigenSystem, LabelMap};
use crate::triangle::{
    solve_barycentric, validate_triangle, BarycentricWeights, TriangleSpec, RECONSTRUCTION_TOL,
};

pub const GRAM_TOL: f64 = 1e-9;
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum DimensionCase {
    ThreeK,
    ThreeKMinus1,
    ThreeKMinus2Case1,
    ThreeKMinus2Case2,
    Rank1,
}

impl DimensionCase {
    pub fn pairings(&self) -> usize {
        match self {
            DimensionCase::ThreeK | DimensionCase::Rank1 => 0,
            DimensionCase::ThreeKMinus1 => 1,
            DimensionCase::ThreeKMinus2Case1 | DimensionCase::ThreeKMinus2Case2 => 2,
        }
    }
}

impl fmt::Display for DimensionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DimensionCase::ThreeK => "3k",
            DimensionCase::ThreeKMinus1 => "3k-1",
            DimensionCase::ThreeKMinus2Case1 => "3k-2/case1",
            DimensionCase::ThreeKMinus2Case2 => "3k-2/case2",
            DimensionCase::Rank1 => "rank1",
        };
        f.write_str(s)
    }
}

/// Two planned triangles (positions in the plan) sharing one label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Pairing {
    pub triangles: [usize; 2],
    pub shared: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionPlan {
    pub case: DimensionCase,
    pub n: usize,
    pub k: usize,
    pub triangles: Vec<TriangleSpec>,
    pub pairings: Vec<Pairing>,
    /// Pivot of the label reflection used for the first pairing, if any.
    pub reflection: Option<usize>,
    /// Rank-1 plans on fewer than three eigenvalues: the segment or vertex
    /// carrying the target.
    pub support: Vec<usize>,
}

/// Is `(n, k)` covered by a construction?
pub fn supported(n: usize, k: usize) -> bool {
    k >= 1
        && k <= n
        && (n == 3 * k || (n + 1 == 3 * k && k >= 2) || (n + 2 == 3 * k && k >= 5) || k == 1)
}

struct Frame {
    n: usize,
    reflection: Option<LabelMap>,
}

impl Frame {
    fn label(&self, j: usize) -> usize {
        match &self.reflection {
            Some(r) => r.apply(j),
            None => j,
        }
    }

    fn tri(&self, a: usize, b: usize, c: usize) -> TriangleSpec {
        TriangleSpec::new(
            self.label(a) as i64,
            self.label(b) as i64,
            self.label(c) as i64,
            self.n,
        )
        .expect("template labels are distinct")
    }
}

impl DecompositionPlan {
    /// Purely combinatorial plan for the given branch choices.
    ///
    /// `reflect_first` relabels by the reflection that swaps the two
    /// candidate weak vertices of the opening triangle; `second_case` picks
    /// the second branch of the `3k − 2` construction. Returns `None` for
    /// unsupported dimensions and for `Rank1`, whose triangle depends on the
    /// target.
    pub fn template(n: usize, k: usize, reflect_first: bool, second_case: bool) -> Option<Self> {
        if !supported(n, k) || (k == 1 && n != 3) {
            return None;
        }
        if n == 3 * k {
            let frame = Frame {
                n,
                reflection: None,
            };
            return Some(Self {
                case: DimensionCase::ThreeK,
                n,
                k,
                triangles: (1..=k).map(|m| frame.tri(m, k + m, 2 * k + m)).collect(),
                pairings: vec![],
                reflection: None,
                support: vec![],
            });
        }
        if n + 1 == 3 * k {
            let pivot = 2 * k + 1;
            let frame = Frame {
                n,
                reflection: reflect_first.then(|| reflect_labels(n, pivot)),
            };
            let mut triangles = vec![frame.tri(1, k + 1, 2 * k + 1), frame.tri(1, k, 2 * k)];
            triangles.extend((1..=k - 2).map(|m| frame.tri(k - m, 2 * k - m, 3 * k - m)));
            return Some(Self {
                case: DimensionCase::ThreeKMinus1,
                n,
                k,
                triangles,
                pairings: vec![Pairing {
                    triangles: [0, 1],
                    shared: frame.label(1),
                }],
                reflection: reflect_first.then_some(pivot),
                support: vec![],
            });
        }
        if n + 2 == 3 * k {
            let pivot = k - 1;
            let frame = Frame {
                n,
                reflection: reflect_first.then(|| reflect_labels(n, pivot)),
            };
            let mut triangles = vec![
                frame.tri(1, k - 1, 2 * k - 1),
                frame.tri(1, k + 1, 2 * k + 1),
                frame.tri(k - 2, 2 * k - 2, 3 * k - 3),
            ];
            let mut pairings = vec![Pairing {
                triangles: [0, 1],
                shared: frame.label(1),
            }];
            let case = if !second_case {
                triangles.push(frame.tri(k, 2 * k - 2, 3 * k - 2));
                pairings.push(Pairing {
                    triangles: [2, 3],
                    shared: frame.label(2 * k - 2),
                });
                triangles.push(frame.tri(2, k + 2, 2 * k));
                triangles.extend((3..=k - 3).map(|m| frame.tri(m, k + m, 2 * k + m - 1)));
                DimensionCase::ThreeKMinus2Case1
            } else {
                triangles.push(frame.tri(k - 3, 2 * k - 3, 3 * k - 3));
                pairings.push(Pairing {
                    triangles: [2, 3],
                    shared: frame.label(3 * k - 3),
                });
                triangles.push(frame.tri(k, 2 * k, 3 * k - 2));
                triangles.extend((2..=k - 4).map(|m| frame.tri(m, k + m, 2 * k + m)));
                DimensionCase::ThreeKMinus2Case2
            };
            return Some(Self {
                case,
                n,
                k,
                triangles,
                pairings,
                reflection: reflect_first.then_some(pivot),
                support: vec![],
            });
        }
        None
    }

    /// Exact cover, gap bounds and pairing count.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::PlanInvariant(msg));
        for t in &self.triangles {
            if t.dim() != self.n {
                return fail(format!("{t} built for N = {}", t.dim()));
            }
            if self.case != DimensionCase::Rank1 && !validate_triangle(t, self.k) {
                return fail(format!("{t} has a gap larger than k = {}", self.k));
            }
        }
        if self.case == DimensionCase::Rank1 {
            let size = self.triangles.len() * 3 + self.support.len();
            return if (1..=3).contains(&size) && self.triangles.len() <= 1 {
                Ok(())
            } else {
                fail("rank-1 plan must use a single simplex".into())
            };
        }
        if self.triangles.len() != self.k {
            return fail(format!(
                "{} triangles for k = {}",
                self.triangles.len(),
                self.k
            ));
        }
        if self.pairings.len() != self.case.pairings() {
            return fail(format!(
                "{} pairings for case {}",
                self.pairings.len(),
                self.case
            ));
        }
        let mut uses = vec![0usize; self.n + 1];
        for t in &self.triangles {
            for j in t.indices() {
                uses[j] += 1;
            }
        }
        for p in &self.pairings {
            let [a, b] = p.triangles;
            let common: Vec<usize> = self.triangles[a]
                .indices()
                .into_iter()
                .filter(|&j| self.triangles[b].contains_label(j))
                .collect();
            if common != [p.shared] {
                return fail(format!(
                    "pairing {a}/{b} does not share exactly label {}",
                    p.shared
                ));
            }
        }
        for (j, &used) in uses.iter().enumerate().skip(1) {
            let expected = if self.pairings.iter().any(|p| p.shared == j) {
                2
            } else {
                1
            };
            if used != expected {
                return fail(format!("label {j} used {used} times, expected {expected}"));
            }
        }
        Ok(())
    }

    /// Triangle positions not consumed by a pairing.
    pub fn unpaired(&self) -> Vec<usize> {
        (0..self.triangles.len())
            .filter(|i| !self.pairings.iter().any(|p| p.triangles.contains(i)))
            .collect()
    }
}

/// Chooses the triangles for `(N, k)` and a target strictly inside `Ω_k`.
pub fn plan<T: Real>(es: &EigenSystem<T>, k: usize, lambda: Cx<T>) -> Result<DecompositionPlan> {
    let n = es.dim();
    if !supported(n, k) {
        return Err(Error::UnsupportedDimension { n, k });
    }
    require_inside(es, k, lambda, true)?;
    if k == 1 && n != 3 {
        return rank1_plan(es, lambda);
    }
    let half = T::lit(0.5);
    let weight = |t: &TriangleSpec, label: usize| -> Result<T> {
        let w = solve_barycentric(es, t, lambda)?;
        Ok(w.weight_of(label).expect("label of triangle"))
    };
    let plan = if n == 3 * k {
        DecompositionPlan::template(n, k, false, false)
    } else if n + 1 == 3 * k {
        let probe = TriangleSpec::new(1, k as i64 + 1, 2 * k as i64 + 1, n)?;
        let reflect = weight(&probe, 1)? > half;
        DecompositionPlan::template(n, k, reflect, false)
    } else {
        let probe = TriangleSpec::new(1, k as i64 - 1, 2 * k as i64 - 1, n)?;
        let reflect = weight(&probe, 1)? > half;
        let frame = Frame {
            n,
            reflection: reflect.then(|| reflect_labels(n, k - 1)),
        };
        let second = frame.tri(k - 2, 2 * k - 2, 3 * k - 3);
        let case2 = weight(&second, frame.label(2 * k - 2))? > half;
        DecompositionPlan::template(n, k, reflect, case2)
    }
    .ok_or(Error::UnsupportedDimension { n, k })?;
    plan.check_invariants()?;
    Ok(plan)
}

fn require_inside<T: Real>(
    es: &EigenSystem<T>,
    k: usize,
    lambda: Cx<T>,
    strict: bool,
) -> Result<()> {
    let region = build_region(es, k)?;
    let verdict = contains(&region, lambda, T::tol(DEFAULT_MEMBERSHIP_TOL));
    let ok = match verdict {
        Membership::Inside => true,
        Membership::Boundary => !strict,
        Membership::Outside => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::LambdaOutsideRegion {
            re: lambda.re.to_f64().unwrap_or(f64::NAN),
            im: lambda.im.to_f64().unwrap_or(f64::NAN),
            k,
        })
    }
}

/// Carathéodory search: the first simplex of eigenvalues (triangles in
/// lexicographic label order) whose convex hull holds the target.
fn rank1_plan<T: Real>(es: &EigenSystem<T>, lambda: Cx<T>) -> Result<DecompositionPlan> {
    let n = es.dim();
    let outside = || Error::LambdaOutsideRegion {
        re: lambda.re.to_f64().unwrap_or(f64::NAN),
        im: lambda.im.to_f64().unwrap_or(f64::NAN),
        k: 1,
    };
    let base = DecompositionPlan {
        case: DimensionCase::Rank1,
        n,
        k: 1,
        triangles: vec![],
        pairings: vec![],
        reflection: None,
        support: vec![],
    };
    if n >= 3 {
        for a in 1..=n {
            for b in a + 1..=n {
                for c in b + 1..=n {
                    let t = TriangleSpec::new(a as i64, b as i64, c as i64, n)?;
                    if solve_barycentric(es, &t, lambda).is_ok() {
                        return Ok(DecompositionPlan {
                            triangles: vec![t],
                            ..base
                        });
                    }
                }
            }
        }
        return Err(outside());
    }
    let support = small_support_weights(es, lambda).ok_or_else(outside)?;
    Ok(DecompositionPlan {
        support: support.into_iter().map(|(j, _)| j).collect(),
        ..base
    })
}

/// Convex weights over all of a one- or two-point spectrum.
fn small_support_weights<T: Real>(es: &EigenSystem<T>, lambda: Cx<T>) -> Option<Vec<(usize, T)>> {
    let tol = T::tol(RECONSTRUCTION_TOL);
    let a = es.eigenvalue(1);
    if es.dim() == 1 || (a - lambda).norm() <= tol {
        return ((a - lambda).norm() <= tol).then(|| vec![(1, T::one())]);
    }
    let b = es.eigenvalue(2);
    let e = b - a;
    let len2 = e.norm_sqr();
    if len2 == T::zero() {
        return None;
    }
    let floor = T::tol(1e-12);
    let s = dot(e, lambda - a) / len2;
    if s < -floor || s > T::one() + floor {
        return None;
    }
    let s = s.max(T::zero()).min(T::one());
    ((a + e * s - lambda).norm() <= tol).then(|| vec![(1, T::one() - s), (2, s)])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub hermitian: f64,
    pub idempotent: f64,
    pub trace: f64,
    pub compression: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            idempotent: 1e-9,
            trace: 1e-9,
            compression: 1e-8,
        }
    }
}

impl Thresholds {
    /// Defaults rescaled so that `tol = 1e-9` reproduces them.
    pub fn scaled(tol: f64) -> Self {
        let f = tol / DEFAULT_VERIFY_TOL;
        let d = Self::default();
        Self {
            hermitian: d.hermitian * f,
            idempotent: d.idempotent * f,
            trace: d.trace * f,
            compression: d.compression * f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    /// `‖P − P†‖_F`
    pub hermitian: f64,
    /// `‖P² − P‖_F`
    pub idempotent: f64,
    /// `|tr P − k|`
    pub trace: f64,
    /// `‖PσP − λP‖_F`
    pub compression: f64,
    pub pass: bool,
}

/// Residuals of a candidate projector against `σ`, `λ` and `k`.
pub fn verify_projector<T: Real>(
    p: &CMatrix<T>,
    sigma: &CMatrix<T>,
    lambda: Cx<T>,
    k: usize,
    tol: f64,
) -> Result<ResidualReport> {
    if p.shape() != sigma.shape() || p.nrows() != p.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "P is {:?}, sigma is {:?}",
            p.shape(),
            sigma.shape()
        )));
    }
    let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
    let hermitian = f(frobenius(&(p - adjoint(p))));
    let idempotent = f(frobenius(&(p * p - p)));
    let tr = trace(p);
    let trace = f((tr - Complex::new(T::lit(k as f64), T::zero())).norm());
    let compression = f(frobenius(&(p * sigma * p - p.map(|z| z * lambda))));
    let th = Thresholds::scaled(tol * T::TOL_SCALE);
    let pass = hermitian <= th.hermitian
        && idempotent <= th.idempotent
        && trace <= th.trace
        && compression <= th.compression;
    Ok(ResidualReport {
        hermitian,
        idempotent,
        trace,
        compression,
        pass,
    })
}

/// Rank-k orthogonal projector with `PσP = λP` and its certificate.
#[derive(Debug, Clone)]
pub struct Projector<T: Real> {
    pub matrix: CMatrix<T>,
    pub rank: usize,
    pub lambda: Cx<T>,
    pub plan: DecompositionPlan,
    /// Eigenbasis coefficients of the spanning vectors.
    pub vectors: Vec<VectorCoefficients<T>>,
    pub pair_paths: Vec<PairPath>,
    /// `max |G − I|` over the Gram matrix of the constructed vectors.
    pub gram_residual: T,
    /// Frames moved to cancel the cross terms `⟨φ_i|σ|φ_j⟩` left by pairings.
    pub refinements: Vec<RefineReport>,
    pub residuals: ResidualReport,
}

pub fn construct_projector<T: Real>(
    es: &EigenSystem<T>,
    k: usize,
    lambda: Cx<T>,
) -> Result<Projector<T>> {
    let plan = plan(es, k, lambda)?;
    assemble(es, plan, lambda)
}

/// Rank-1 projector for any `λ` in the closed convex hull of the spectrum.
pub fn caratheodory_rank1<T: Real>(es: &EigenSystem<T>, lambda: Cx<T>) -> Result<Projector<T>> {
    require_inside(es, 1, lambda, false)?;
    let plan = rank1_plan(es, lambda)?;
    plan.check_invariants()?;
    assemble(es, plan, lambda)
}

fn assemble<T: Real>(
    es: &EigenSystem<T>,
    plan: DecompositionPlan,
    lambda: Cx<T>,
) -> Result<Projector<T>> {
    let n = es.dim();
    let weights: Vec<BarycentricWeights<T>> = plan
        .triangles
        .iter()
        .map(|t| solve_barycentric(es, t, lambda))
        .collect::<Result<_>>()?;
    let mut slots: Vec<Option<VectorCoefficients<T>>> = vec![None; plan.triangles.len()];
    let mut pair_paths = Vec::with_capacity(plan.pairings.len());
    for p in &plan.pairings {
        let [a, b] = p.triangles;
        let problem = SharedVertexProblem::from_triangles(&weights[a], &weights[b])?;
        let solution = solve_pair(&problem, es)?;
        let (va, vb) = if solution.swapped {
            (solution.second, solution.first)
        } else {
            (solution.first, solution.second)
        };
        slots[a] = Some(va);
        slots[b] = Some(vb);
        pair_paths.push(solution.path);
    }
    let mut vectors: Vec<VectorCoefficients<T>> = slots
        .into_iter()
        .zip(&weights)
        .map(|(slot, w)| slot.unwrap_or_else(|| vector_from_triangle(w)))
        .collect();
    if !plan.support.is_empty() {
        let support = small_support_weights(es, lambda).ok_or(Error::NoConvexSolution {
            triangle: [1, 1, 1],
        })?;
        let sum: T = support.iter().map(|(_, w)| *w).sum();
        let image = support
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &(j, w)| {
                acc + es.eigenvalue(j as i64) * w
            });
        vectors.push(VectorCoefficients {
            coefficients: support
                .iter()
                .map(|&(j, w)| (j, Complex::new(w.sqrt(), T::zero())))
                .collect(),
            norm_residual: (sum - T::one()).abs(),
            compression_residual: (image - lambda).norm(),
        });
    }

    let k = plan.k;
    let dense: Vec<Vec<Cx<T>>> = vectors.iter().map(|v| v.dense(n)).collect();
    let mut gram_residual = T::zero();
    for i in 0..k {
        for j in 0..k {
            let g = inner(&dense[i], &dense[j]);
            let target = if i == j { T::one() } else { T::zero() };
            gram_residual = gram_residual.max((g - Complex::new(target, T::zero())).norm());
        }
    }
    let worst_compression = vectors
        .iter()
        .map(|v| v.compression_residual)
        .fold(T::zero(), T::max);
    if gram_residual > T::tol(GRAM_TOL) || worst_compression > T::tol(GRAM_TOL) {
        return Err(Error::GramFailure {
            residual: gram_residual
                .max(worst_compression)
                .to_f64()
                .unwrap_or(f64::NAN),
        });
    }

    let refinements = cancel_cross_terms(es, &plan, lambda, &mut vectors)?;
    let dense: Vec<Vec<Cx<T>>> = vectors.iter().map(|v| v.dense(n)).collect();
    let z = DMatrix::from_fn(n, k, |r, c| dense[c][r]);
    let phi = es.basis() * z;
    let matrix = &phi * adjoint(&phi);
    let residuals = verify_projector(&matrix, es.matrix(), lambda, k, DEFAULT_VERIFY_TOL)?;
    Ok(Projector {
        matrix,
        rank: k,
        lambda,
        plan,
        vectors,
        pair_paths,
        gram_residual,
        refinements,
        residuals,
    })
}

fn c64<T: Real>(z: Cx<T>) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// Paired vectors are orthonormal with the right diagonal, but
/// `⟨φ1|σ|φ2⟩ = λ⟨φ1|φ2⟩` fails unless `λ` is the shared eigenvalue. Each
/// pair is moved within the span of its own labels (which keeps it
/// orthogonal to every other vector); if that subproblem has no solution
/// near the seed, the whole frame is refined instead.
fn cancel_cross_terms<T: Real>(
    es: &EigenSystem<T>,
    plan: &DecompositionPlan,
    lambda: Cx<T>,
    vectors: &mut [VectorCoefficients<T>],
) -> Result<Vec<RefineReport>> {
    let n = es.dim();
    let mu: Vec<Complex64> = (1..=n)
        .map(|j| c64(es.eigenvalue(j as i64) - lambda))
        .collect();
    let mut reports = Vec::new();
    let mut local_failure = false;
    for p in &plan.pairings {
        let columns: Vec<usize> = p.triangles.to_vec();
        let mut labels: Vec<usize> = columns
            .iter()
            .flat_map(|&c| plan.triangles[c].indices())
            .collect();
        labels.sort_unstable();
        labels.dedup();
        if !pair_feasible(es, &labels, lambda) {
            local_failure = true;
            continue;
        }
        match refine_columns(es, lambda, &mu, vectors, &columns, &labels) {
            Some(Some(report)) => reports.push(report),
            Some(None) => {}
            None => local_failure = true,
        }
    }
    if local_failure {
        let columns: Vec<usize> = (0..vectors.len()).collect();
        let labels: Vec<usize> = (1..=n).collect();
        match refine_columns(es, lambda, &mu, vectors, &columns, &labels) {
            Some(Some(report)) => reports.push(report),
            Some(None) => {}
            None => {
                let seed = frame(vectors, &columns, &labels);
                return Err(Error::RefinementFailed {
                    residual: frame_defect(
                        &labels.iter().map(|&j| mu[j - 1]).collect::<Vec<_>>(),
                        &seed,
                    ),
                });
            }
        }
    }
    Ok(reports)
}

/// A rank-2 compression inside the span of `labels` exists iff `λ` lies in
/// the rank-2 region of that sub-spectrum.
fn pair_feasible<T: Real>(es: &EigenSystem<T>, labels: &[usize], lambda: Cx<T>) -> bool {
    let phases: Vec<T> = labels.iter().map(|&j| es.phases()[j - 1]).collect();
    let Ok(sub) = crate::spectrum::ingest_spectrum(&phases) else {
        return false;
    };
    build_region(&sub, 2)
        .is_ok_and(|r| contains(&r, lambda, T::tol(DEFAULT_MEMBERSHIP_TOL)) == Membership::Inside)
}

fn frame<T: Real>(
    vectors: &[VectorCoefficients<T>],
    columns: &[usize],
    labels: &[usize],
) -> DMatrix<Complex64> {
    DMatrix::from_fn(labels.len(), columns.len(), |r, c| {
        vectors[columns[c]]
            .coefficients
            .iter()
            .find(|(j, _)| *j == labels[r])
            .map_or(Complex64::new(0.0, 0.0), |&(_, z)| c64(z))
    })
}

/// `Some(None)`: already compressing; `Some(Some(_))`: moved; `None`: failed.
fn refine_columns<T: Real>(
    es: &EigenSystem<T>,
    lambda: Cx<T>,
    mu: &[Complex64],
    vectors: &mut [VectorCoefficients<T>],
    columns: &[usize],
    labels: &[usize],
) -> Option<Option<RefineReport>> {
    let local_mu: Vec<Complex64> = labels.iter().map(|&j| mu[j - 1]).collect();
    let seed = frame(vectors, columns, labels);
    if frame_defect(&local_mu, &seed) <= REFINE_TOL {
        return Some(None);
    }
    let (z, report) = refine_frame(&local_mu, &seed)?;
    for (c, &col) in columns.iter().enumerate() {
        let coefficients = labels
            .iter()
            .enumerate()
            .map(|(r, &j)| (j, Complex::new(T::lit(z[(r, c)].re), T::lit(z[(r, c)].im))))
            .collect();
        vectors[col] = VectorCoefficients::measure(coefficients, es, lambda);
    }
    Some(Some(report))
}

/// Projector onto the span of the first `k` basis columns; used as a
/// reference in tests and by callers that only need `tr P = k`.
pub fn coordinate_projector<T: Real>(n: usize, k: usize) -> CMatrix<T> {
    let mut p = identity::<T>(n);
    for i in k..n {
        p[(i, i)] = Complex::new(T::zero(), T::zero());
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::ingest_spectrum;
    use std::f64::consts::PI;

    fn roots(n: usize) -> EigenSystem<f64> {
        let phases: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        ingest_spectrum(&phases).unwrap()
    }

    fn labels(plan: &DecompositionPlan) -> Vec<[usize; 3]> {
        plan.triangles.iter().map(|t| t.indices()).collect()
    }

    #[test]
    fn five_two_both_branches() {
        let p = DecompositionPlan::template(5, 2, false, false).unwrap();
        assert_eq!(labels(&p), vec![[1, 3, 5], [1, 2, 4]]);
        assert_eq!(p.pairings[0].shared, 1);
        let p = DecompositionPlan::template(5, 2, true, false).unwrap();
        assert_eq!(labels(&p), vec![[1, 3, 5], [2, 4, 5]]);
        assert_eq!(p.pairings[0].shared, 5);
    }

    #[test]
    fn thirteen_five_cases() {
        let p = DecompositionPlan::template(13, 5, false, false).unwrap();
        assert_eq!(p.case, DimensionCase::ThreeKMinus2Case1);
        assert_eq!(
            labels(&p),
            vec![[1, 4, 9], [1, 6, 11], [3, 8, 12], [5, 8, 13], [2, 7, 10]]
        );
        assert_eq!(
            p.pairings.iter().map(|x| x.shared).collect::<Vec<_>>(),
            vec![1, 8]
        );
        let p = DecompositionPlan::template(13, 5, false, true).unwrap();
        assert_eq!(p.case, DimensionCase::ThreeKMinus2Case2);
        assert_eq!(
            labels(&p),
            vec![[1, 4, 9], [1, 6, 11], [3, 8, 12], [2, 7, 12], [5, 10, 13]]
        );
        assert_eq!(
            p.pairings.iter().map(|x| x.shared).collect::<Vec<_>>(),
            vec![1, 12]
        );
    }

    #[test]
    fn templates_satisfy_invariants() {
        for k in 1..=20 {
            for (n, ok) in [(3 * k, true), (3 * k - 1, k >= 2), (3 * k - 2, k >= 5)] {
                for reflect in [false, true] {
                    for case2 in [false, true] {
                        match DecompositionPlan::template(n, k, reflect, case2) {
                            Some(p) => {
                                assert!(ok || k == 1);
                                p.check_invariants()
                                    .unwrap_or_else(|e| panic!("({n},{k}) {e}"));
                            }
                            None => assert!(!ok, "({n},{k}) missing"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn unsupported_dimensions() {
        assert!(!supported(7, 3));
        assert!(!supported(10, 4));
        assert!(!supported(4, 2));
        assert!(supported(13, 5));
        assert!(supported(8, 1));
        let es = roots(7);
        assert_eq!(
            plan(&es, 3, Complex::new(0.0, 0.0)).unwrap_err(),
            Error::UnsupportedDimension { n: 7, k: 3 }
        );
    }

    #[test]
    fn pentagon_projector() {
        let es = roots(5);
        let p = construct_projector(&es, 2, Complex::new(0.0, 0.0)).unwrap();
        assert!(p.residuals.pass, "{:?}", p.residuals);
        assert!(p.residuals.compression <= 1e-9);
        assert_eq!(p.plan.case, DimensionCase::ThreeKMinus1);
    }

    #[test]
    fn identity_spectrum_projectors() {
        for (n, k) in [(3, 1), (5, 2), (6, 2), (8, 3), (13, 5), (2, 1)] {
            let es = ingest_spectrum(&vec![0.0; n]).unwrap();
            let p = construct_projector(&es, k, Complex::new(1.0, 0.0)).unwrap();
            assert!(p.residuals.pass, "({n},{k}) {:?}", p.residuals);
            assert!(p.residuals.compression < 1e-14);
        }
    }

    #[test]
    fn boundary_target_rejected() {
        let es = roots(5);
        let mid = (es.eigenvalue(1) + es.eigenvalue(3)) * 0.5;
        assert!(matches!(
            construct_projector(&es, 2, mid),
            Err(Error::LambdaOutsideRegion { .. })
        ));
    }

    #[test]
    fn rank_one_cases() {
        let es = ingest_spectrum(&[0.0, PI]).unwrap();
        let p = caratheodory_rank1(&es, Complex::new(0.0, 0.0)).unwrap();
        assert!(p.residuals.pass);
        let w = &p.vectors[0].coefficients;
        assert!(w.iter().all(|(_, z)| (z.norm_sqr() - 0.5).abs() < 1e-15));

        let es = roots(5);
        let p = caratheodory_rank1(&es, Complex::new(0.0, 0.0)).unwrap();
        assert!(p.residuals.compression <= 1e-10);
        assert_eq!(p.rank, 1);

        for j in 1..=5 {
            let p = caratheodory_rank1(&es, es.eigenvalue(j)).unwrap();
            let mut expected = coordinate_projector::<f64>(5, 0);
            expected[((j - 1) as usize, (j - 1) as usize)] = Complex::new(1.0, 0.0);
            assert!(frobenius(&(p.matrix - expected)) < 1e-12);
        }
    }

    #[test]
    fn verify_rejects_zero_and_accepts_identity() {
        let sigma = identity::<f64>(3);
        let zero = coordinate_projector::<f64>(3, 0);
        let r = verify_projector(&zero, &sigma, Complex::new(1.0, 0.0), 1, 1e-9).unwrap();
        assert!(!r.pass);
        let r = verify_projector(&sigma, &sigma, Complex::new(1.0, 0.0), 3, 1e-9).unwrap();
        assert!(r.pass);
        let bad = identity::<f64>(2);
        assert!(matches!(
            verify_projector(&bad, &sigma, Complex::new(1.0, 0.0), 2, 1e-9),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
