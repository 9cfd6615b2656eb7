//! Triangles of eigenvalues and the convex weights of a target over them.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Hull;
use crate::region::{boundary_samples, build_region};
use crate::scalar::{cross, dot, Cx, Real};
use crate::spectrum::{CyclicIndex, EigenSystem};

/// Weights below this are rounding noise; below it the target is outside.
pub const WEIGHT_FLOOR: f64 = -1e-12;
pub const SUM_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_TOL: f64 = 1e-9;
const SINGULAR_DET: f64 = 1e-14;
const CONTAINMENT_TOL: f64 = 1e-8;

/// Three distinct canonical eigen-labels in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(into = "[usize; 3]")]
pub struct TriangleSpec {
    indices: [usize; 3],
    dim: usize,
}

impl From<TriangleSpec> for [usize; 3] {
    fn from(t: TriangleSpec) -> Self {
        t.indices
    }
}

impl TriangleSpec {
    /// Labels may be given in any order and outside `1..=N`; they are
    /// reduced cyclically and sorted.
    pub fn new(a: i64, b: i64, c: i64, dim: usize) -> Result<Self> {
        let mut idx = [a, b, c].map(|r| CyclicIndex::new(r, dim).canonical());
        idx.sort_unstable();
        if idx[0] == idx[1] || idx[1] == idx[2] {
            return Err(Error::InvalidInput(format!(
                "triangle labels {a}, {b}, {c} are not distinct mod {dim}"
            )));
        }
        Ok(Self { indices: idx, dim })
    }

    pub fn indices(&self) -> [usize; 3] {
        self.indices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cyclic gaps `(b − a, c − b, N + a − c)`; positive and summing to `N`.
    pub fn gaps(&self) -> [usize; 3] {
        let [a, b, c] = self.indices;
        [b - a, c - b, self.dim + a - c]
    }

    pub fn contains_label(&self, label: usize) -> bool {
        self.indices.contains(&label)
    }

    /// Same triangle with every label passed through `f`.
    pub fn map(&self, f: impl Fn(usize) -> usize) -> Result<Self> {
        let [a, b, c] = self.indices.map(f);
        Self::new(a as i64, b as i64, c as i64, self.dim)
    }
}

impl fmt::Display for TriangleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.indices;
        write!(f, "T{{{a},{b},{c}}}")
    }
}

/// True iff every cyclic gap is at most `k`.
pub fn validate_triangle(t: &TriangleSpec, k: usize) -> bool {
    t.gaps().iter().all(|&g| g <= k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricWeights<T: Real> {
    pub triangle: TriangleSpec,
    /// Weights aligned with `triangle.indices()`, each in `[0, 1]`.
    pub weights: [T; 3],
    /// `|Σ p·λ_vertex − λ|`.
    pub residual: T,
}

impl<T: Real> BarycentricWeights<T> {
    pub fn weight_of(&self, label: usize) -> Option<T> {
        self.triangle
            .indices()
            .iter()
            .position(|&j| j == label)
            .map(|i| self.weights[i])
    }

    /// `(label, weight)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.triangle.indices().into_iter().zip(self.weights)
    }
}

/// Convex weights of `lambda` over the triangle's eigenvalues.
///
/// Solves the 3×3 system directly; if it is singular or its solution is not
/// a certified convex combination, tries each edge and then each vertex.
pub fn solve_barycentric<T: Real>(
    es: &EigenSystem<T>,
    t: &TriangleSpec,
    lambda: Cx<T>,
) -> Result<BarycentricWeights<T>> {
    let [ia, ib, ic] = t.indices();
    let v = [ia, ib, ic].map(|j| es.eigenvalue(j as i64));
    let candidates = std::iter::once(full_solve(v, lambda))
        .chain([(0, 1), (1, 2), (2, 0)].map(|(i, j)| edge_solve(v, i, j, lambda)))
        .chain((0..3).map(|i| vertex_solve(v, i, lambda)));
    for cand in candidates.flatten() {
        if let Some(w) = certify(v, cand, lambda) {
            return Ok(BarycentricWeights {
                triangle: *t,
                weights: w,
                residual: reconstruction(v, &w, lambda),
            });
        }
    }
    Err(Error::NoConvexSolution {
        triangle: t.indices(),
    })
}

fn full_solve<T: Real>(v: [Cx<T>; 3], lambda: Cx<T>) -> Option<[T; 3]> {
    let det = cross(v[1] - v[0], v[2] - v[0]);
    if det.abs() <= T::tol(SINGULAR_DET) {
        return None;
    }
    let d = v.map(|x| x - lambda);
    Some([
        cross(d[1], d[2]) / det,
        cross(d[2], d[0]) / det,
        cross(d[0], d[1]) / det,
    ])
}

fn edge_solve<T: Real>(v: [Cx<T>; 3], i: usize, j: usize, lambda: Cx<T>) -> Option<[T; 3]> {
    let e = v[j] - v[i];
    let len2 = e.norm_sqr();
    if len2 == T::zero() {
        return None;
    }
    let s = dot(e, lambda - v[i]) / len2;
    let mut w = [T::zero(); 3];
    w[i] = T::one() - s;
    w[j] = s;
    Some(w)
}

fn vertex_solve<T: Real>(v: [Cx<T>; 3], i: usize, lambda: Cx<T>) -> Option<[T; 3]> {
    if (v[i] - lambda).norm() > T::tol(RECONSTRUCTION_TOL) {
        return None;
    }
    let mut w = [T::zero(); 3];
    w[i] = T::one();
    Some(w)
}

fn certify<T: Real>(v: [Cx<T>; 3], w: [T; 3], lambda: Cx<T>) -> Option<[T; 3]> {
    let floor = -T::tol(-WEIGHT_FLOOR);
    if w.iter().any(|&p| !p.is_finite() || p < floor) {
        return None;
    }
    let w = w.map(|p| p.max(T::zero()).min(T::one()));
    let sum: T = w.iter().copied().sum();
    if (sum - T::one()).abs() > T::tol(SUM_TOL)
        || reconstruction(v, &w, lambda) > T::tol(RECONSTRUCTION_TOL)
    {
        return None;
    }
    Some(w)
}

fn reconstruction<T: Real>(v: [Cx<T>; 3], w: &[T; 3], lambda: Cx<T>) -> T {
    (v[0] * w[0] + v[1] * w[1] + v[2] * w[2] - lambda).norm()
}

/// Labels whose weight is at most one half.
pub fn weak_vertices<T: Real>(w: &BarycentricWeights<T>) -> Vec<usize> {
    let half = T::lit(0.5);
    w.entries()
        .filter(|&(_, p)| p <= half)
        .map(|(j, _)| j)
        .collect()
}

/// Samples the boundary of `Ω_k` and checks every sample against the closed
/// triangle. An empty region is vacuously contained.
pub fn containment_check<T: Real>(
    es: &EigenSystem<T>,
    t: &TriangleSpec,
    k: usize,
    samples: usize,
) -> bool {
    let region = match build_region(es, k) {
        Ok(r) => r,
        Err(_) => return false,
    };
    let points = match boundary_samples(&region, samples.max(3)) {
        Ok(p) => p,
        Err(Error::EmptyRegion) => return true,
        Err(_) => return false,
    };
    let [ia, ib, ic] = t.indices();
    let verts = [ia, ib, ic].map(|j| es.eigenvalue(j as i64));
    let hull = Hull::of(&verts);
    let tol = T::tol(CONTAINMENT_TOL);
    points.iter().all(|&z| hull.contains_closed(z, tol))
}
