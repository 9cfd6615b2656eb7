//! The region `Ω_k(σ)` as an intersection of chord–arc pieces of the unit
//! disk, one per eigen-label `i`, cut by the chord from `λ_i` to `λ_{i+k}`.
//!
//! A brute-force oracle evaluates the defining intersection of convex hulls
//! of all `(N − k + 1)`-point eigenvalue sub-multisets directly.

use std::f64::consts::PI;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{clip, line_margin, polygon_area, Hull};
use crate::scalar::{cross, unit, Cx, Real};
use crate::spectrum::{CyclicIndex, EigenSystem};

pub use crate::geometry::Membership;

pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-9;
/// Chord endpoints closer than this are treated as coincident.
pub const COINCIDENT_TOL: f64 = 1e-9;
/// Largest spectrum the brute-force oracle will enumerate.
pub const ORACLE_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintKind {
    /// Ordinary chord: the region lies on one side of the line.
    HalfPlane,
    /// Coincident endpoints with the labels `i..i+k` sweeping the whole
    /// circle: the piece collapses to `{λ_i}`.
    Point,
    /// Coincident endpoints with an empty sweep: the piece is the full disk.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChordConstraint<T: Real> {
    /// Canonical start label `i`.
    pub start: usize,
    /// Raw end label `i + k` (may exceed `N`).
    pub end: CyclicIndex,
    pub endpoint_a: Cx<T>,
    pub endpoint_b: Cx<T>,
    /// `+1` or `−1`; the region is where `sign · cross(b − a, z − a) ≥ 0`.
    pub inward_sign: T,
    pub kind: ConstraintKind,
}

impl<T: Real> ChordConstraint<T> {
    pub fn degenerate(&self) -> bool {
        self.kind != ConstraintKind::HalfPlane
    }

    /// Signed distance to the chord line, positive on the region side.
    /// `None` for degenerate constraints.
    pub fn margin(&self, z: Cx<T>) -> Option<T> {
        match self.kind {
            ConstraintKind::HalfPlane => {
                Some(self.inward_sign * line_margin(self.endpoint_a, self.endpoint_b, z))
            }
            _ => None,
        }
    }

    /// Distance from the origin to the chord line.
    pub fn origin_distance(&self) -> T {
        line_margin(
            self.endpoint_a,
            self.endpoint_b,
            Complex::new(T::zero(), T::zero()),
        )
        .abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaRegion<T: Real> {
    pub k: usize,
    pub constraints: Vec<ChordConstraint<T>>,
    pub point_constraints: Vec<Cx<T>>,
}

impl<T: Real> OmegaRegion<T> {
    pub fn dim(&self) -> usize {
        self.constraints.len()
    }

    pub fn half_planes(&self) -> impl Iterator<Item = &ChordConstraint<T>> {
        self.constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::HalfPlane)
    }

    /// Smallest signed slack over the disk, all chords and all point
    /// constraints. Positive exactly on the interior.
    pub fn margin(&self, z: Cx<T>) -> T {
        let mut m = T::one() - z.norm();
        for c in self.half_planes() {
            m = m.min(c.margin(z).expect("half-plane"));
        }
        for p in &self.point_constraints {
            m = m.min(-(z - p).norm());
        }
        m
    }
}

pub fn build_region<T: Real>(es: &EigenSystem<T>, k: usize) -> Result<OmegaRegion<T>> {
    let n = es.dim();
    if k < 1 || k > n {
        return Err(Error::InvalidRank { k, n });
    }
    let tol = T::tol(COINCIDENT_TOL);
    let pi = T::PI();
    let mut constraints = Vec::with_capacity(n);
    let mut point_constraints = Vec::new();
    for i in 1..=n {
        let end = CyclicIndex::new((i + k) as i64, n);
        let a = es.eigenvalue(i as i64);
        let b = es.eigenvalue(end.raw);
        let start_phase = es.unwrapped_phase(i as i64);
        let span = es.unwrapped_phase(end.raw) - start_phase;
        let (kind, inward_sign) = if (b - a).norm() <= tol {
            if span > pi {
                point_constraints.push(a);
                (ConstraintKind::Point, T::one())
            } else {
                (ConstraintKind::Vacuous, T::one())
            }
        } else {
            // midpoint of the counterclockwise arc from λ_{i+k} back to λ_i
            let mid = unit(start_phase + span * T::lit(0.5) + pi);
            let side = cross(b - a, mid - a);
            (
                ConstraintKind::HalfPlane,
                if side >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                },
            )
        };
        constraints.push(ChordConstraint {
            start: i,
            end,
            endpoint_a: a,
            endpoint_b: b,
            inward_sign,
            kind,
        });
    }
    Ok(OmegaRegion {
        k,
        constraints,
        point_constraints,
    })
}

pub fn contains<T: Real>(region: &OmegaRegion<T>, z: Cx<T>, tol: T) -> Membership {
    if z.norm() > T::one() + tol {
        return Membership::Outside;
    }
    if region
        .point_constraints
        .iter()
        .any(|p| (z - p).norm() > tol)
    {
        return Membership::Outside;
    }
    let mut verdict = Membership::Inside;
    for c in region.half_planes() {
        let m = c.margin(z).expect("half-plane");
        if m < -tol {
            return Membership::Outside;
        }
        if m <= tol {
            verdict = Membership::Boundary;
        }
    }
    verdict
}

/// Membership decided from the defining intersection of convex hulls over all
/// `(N − k + 1)`-point sub-multisets of the spectrum.
pub fn brute_force_contains<T: Real>(
    es: &EigenSystem<T>,
    k: usize,
    z: Cx<T>,
    tol: T,
) -> Result<Membership> {
    let n = es.dim();
    if k < 1 || k > n {
        return Err(Error::InvalidRank { k, n });
    }
    if n > ORACLE_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: ORACLE_LIMIT,
        });
    }
    let values = es.eigenvalues();
    let size = n - k + 1;
    let mut verdict = Membership::Inside;
    let mut subset: Vec<usize> = (0..size).collect();
    let mut points = Vec::with_capacity(size);
    loop {
        points.clear();
        points.extend(subset.iter().map(|&j| values[j]));
        verdict = verdict.and(Hull::of(&points).classify(z, tol));
        if verdict == Membership::Outside {
            return Ok(verdict);
        }
        if !next_combination(&mut subset, n) {
            return Ok(verdict);
        }
    }
}

/// Advances a sorted index combination in lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let r = subset.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if subset[i] < n - r + i {
            subset[i] += 1;
            for j in i + 1..r {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Approximate Chebyshev centre: the grid point of `[−1, 1]²` with the
/// largest minimum constraint margin, refined twice around the best point.
/// `None` when no point with positive margin is found.
pub fn interior_point<T: Real>(region: &OmegaRegion<T>, resolution: usize) -> Option<Cx<T>> {
    assert!(resolution >= 8, "resolution must be at least 8");
    let res = T::lit(resolution as f64);
    let mut center = Complex::new(T::zero(), T::zero());
    let mut half = T::one();
    let mut best = center;
    let mut best_margin = T::neg_infinity();
    for _round in 0..3 {
        let step = half * T::lit(2.0) / res;
        for iy in 0..=resolution {
            let y = center.im - half + step * T::lit(iy as f64);
            for ix in 0..=resolution {
                let x = center.re - half + step * T::lit(ix as f64);
                let z = Complex::new(x, y);
                let m = region.margin(z);
                if m > best_margin {
                    best_margin = m;
                    best = z;
                }
            }
        }
        center = best;
        half = step * T::lit(2.0);
    }
    (best_margin > T::zero()).then_some(best)
}

enum Piece<T: Real> {
    Segment(Cx<T>, Cx<T>),
    Arc { start: T, sweep: T },
}

impl<T: Real> Piece<T> {
    fn length(&self) -> T {
        match self {
            Piece::Segment(a, b) => (*b - *a).norm(),
            Piece::Arc { sweep, .. } => *sweep,
        }
    }

    fn at(&self, t: T) -> Cx<T> {
        match self {
            Piece::Segment(a, b) => *a + (*b - *a) * t,
            Piece::Arc { start, sweep } => unit(*start + *sweep * t),
        }
    }
}

/// Points on the region boundary, counterclockwise. Every corner of the
/// boundary is included; the remaining samples are spread by arc length.
pub fn boundary_samples<T: Real>(region: &OmegaRegion<T>, count: usize) -> Result<Vec<Cx<T>>> {
    assert!(count >= 3, "need at least three samples");
    let tol = T::tol(COINCIDENT_TOL);
    if let Some(&p) = region.point_constraints.first() {
        let consistent = region
            .point_constraints
            .iter()
            .all(|q| (p - q).norm() <= tol)
            && p.norm() <= T::one() + tol
            && region
                .half_planes()
                .all(|c| c.margin(p).expect("half-plane") >= -tol);
        return if consistent {
            Ok(vec![p; count])
        } else {
            Err(Error::EmptyRegion)
        };
    }

    let two = T::lit(2.0);
    let mut poly = vec![
        Complex::new(-two, -two),
        Complex::new(two, -two),
        Complex::new(two, two),
        Complex::new(-two, two),
    ];
    for c in region.half_planes() {
        poly = clip(&poly, |z| c.margin(z).expect("half-plane"));
        if poly.is_empty() {
            return Err(Error::EmptyRegion);
        }
    }
    poly.dedup_by(|a, b| (*a - *b).norm() <= T::epsilon());
    if poly.len() >= 2 && (poly[0] - poly[poly.len() - 1]).norm() <= T::epsilon() {
        poly.pop();
    }
    if poly.len() < 3 || polygon_area(&poly) <= T::tol(1e-14) {
        return degenerate_samples(&poly, count);
    }

    let pieces = disk_pieces(&poly)?;
    Ok(sample_pieces(&pieces, count))
}

fn degenerate_samples<T: Real>(poly: &[Cx<T>], count: usize) -> Result<Vec<Cx<T>>> {
    let inside: Vec<Cx<T>> = poly
        .iter()
        .copied()
        .filter(|z| z.norm() <= T::one() + T::tol(COINCIDENT_TOL))
        .collect();
    match inside.len() {
        0 => Err(Error::EmptyRegion),
        _ => {
            let hull = Hull::of(&inside);
            match hull {
                Hull::Point(p) => Ok(vec![p; count]),
                Hull::Segment(a, b) => {
                    let seg = Piece::Segment(a, b);
                    let last = T::lit((count - 1) as f64);
                    Ok((0..count)
                        .map(|i| seg.at(T::lit(i as f64) / last))
                        .collect())
                }
                Hull::Polygon(v) => Ok(sample_pieces(
                    &(0..v.len())
                        .map(|i| Piece::Segment(v[i], v[(i + 1) % v.len()]))
                        .collect::<Vec<_>>(),
                    count,
                )),
            }
        }
    }
}

/// Splits the boundary of `poly ∩ disk` into chord segments and arcs.
fn disk_pieces<T: Real>(poly: &[Cx<T>]) -> Result<Vec<Piece<T>>> {
    let slack = T::one() + T::tol(1e-12);
    let n = poly.len();
    // (entry point, exit point, entered from outside, leaves to outside)
    let mut portions: Vec<(Cx<T>, Cx<T>, bool, bool)> = Vec::new();
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        if let Some((t0, t1)) = disk_interval(p, q, slack) {
            let d = q - p;
            portions.push((p + d * t0, p + d * t1, t0 > T::zero(), t1 < T::one()));
        }
    }
    if portions.is_empty() {
        let origin = Complex::new(T::zero(), T::zero());
        let origin_inside =
            (0..n).all(|i| line_margin(poly[i], poly[(i + 1) % n], origin) >= T::zero());
        return if origin_inside {
            Ok(vec![Piece::Arc {
                start: T::zero(),
                sweep: T::two_pi(),
            }])
        } else {
            Err(Error::EmptyRegion)
        };
    }
    let mut pieces = Vec::with_capacity(2 * portions.len());
    let m = portions.len();
    for idx in 0..m {
        let (a, b, _, exits) = portions[idx];
        if (b - a).norm() > T::epsilon() {
            pieces.push(Piece::Segment(a, b));
        }
        let (next_a, _, enters, _) = portions[(idx + 1) % m];
        if exits || enters {
            let start = b.im.atan2(b.re);
            let end = next_a.im.atan2(next_a.re);
            let mut sweep = end - start;
            while sweep < T::zero() {
                sweep += T::two_pi();
            }
            if m == 1 && sweep <= T::epsilon() {
                sweep = T::two_pi();
            }
            if sweep > T::epsilon() {
                pieces.push(Piece::Arc { start, sweep });
            }
        }
    }
    Ok(pieces)
}

/// Parameter range of `p + t(q − p)`, `t ∈ [0, 1]`, with `|·|² ≤ r2`.
fn disk_interval<T: Real>(p: Cx<T>, q: Cx<T>, r2: T) -> Option<(T, T)> {
    let d = q - p;
    let a = d.norm_sqr();
    if a == T::zero() {
        return None;
    }
    let b = T::lit(2.0) * (p.re * d.re + p.im * d.im);
    let c = p.norm_sqr() - r2;
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < T::zero() {
        return None;
    }
    let s = disc.sqrt();
    let t0 = ((-b - s) / (T::lit(2.0) * a)).max(T::zero());
    let t1 = ((-b + s) / (T::lit(2.0) * a)).min(T::one());
    (t0 < t1).then_some((t0, t1))
}

fn sample_pieces<T: Real>(pieces: &[Piece<T>], count: usize) -> Vec<Cx<T>> {
    let m = pieces.len();
    let total: T = pieces.iter().map(Piece::length).sum();
    let spare = count.saturating_sub(m);
    let shares: Vec<f64> = pieces
        .iter()
        .map(|p| {
            let frac = (p.length() / total).to_f64().unwrap_or(0.0);
            frac * spare as f64
        })
        .collect();
    let mut alloc: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut left = spare - alloc.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let ra = shares[a] - shares[a].floor();
        let rb = shares[b] - shares[b].floor();
        rb.partial_cmp(&ra).expect("finite").then(a.cmp(&b))
    });
    for &i in order.iter().cycle().take(m * 2) {
        if left == 0 {
            break;
        }
        alloc[i] += 1;
        left -= 1;
    }
    let mut out = Vec::with_capacity(count.max(m));
    for (piece, extra) in pieces.iter().zip(alloc) {
        let per = extra + 1;
        for j in 0..per {
            out.push(piece.at(T::lit(j as f64 / per as f64)));
        }
    }
    out
}

/// Distance from the origin to every chord of the regular `n`-gon that skips
/// `k` vertices, `cos(πk/n)`.
pub fn regular_chord_distance(n: usize, k: usize) -> f64 {
    (PI * k as f64 / n as f64).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::ingest_spectrum;

    fn roots(n: usize) -> EigenSystem<f64> {
        let phases: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        ingest_spectrum(&phases).unwrap()
    }

    fn c(re: f64, im: f64) -> Cx<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn pentagon_chords() {
        let region = build_region(&roots(5), 2).unwrap();
        assert_eq!(region.constraints.len(), 5);
        for con in &region.constraints {
            assert_eq!(con.kind, ConstraintKind::HalfPlane);
            assert!((con.origin_distance() - (2.0 * PI / 5.0).cos()).abs() < 1e-12);
            // the origin is on the inward side
            assert!(con.margin(c(0.0, 0.0)).unwrap() > 0.3);
        }
        assert!((regular_chord_distance(5, 2) - 0.309_016_994).abs() < 1e-9);
    }

    #[test]
    fn pentagon_membership() {
        let es = roots(5);
        let region = build_region(&es, 2).unwrap();
        assert_eq!(contains(&region, c(0.0, 0.0), 1e-9), Membership::Inside);
        let mid = (es.eigenvalue(1) + es.eigenvalue(3)) * 0.5;
        assert_eq!(contains(&region, mid, 1e-9), Membership::Boundary);
        assert_eq!(contains(&region, c(0.99, 0.0), 1e-9), Membership::Outside);
        assert_eq!(
            brute_force_contains(&es, 2, c(0.99, 0.0), 1e-9).unwrap(),
            Membership::Outside
        );
        assert_eq!(
            brute_force_contains(&es, 2, c(0.0, 0.0), 1e-9).unwrap(),
            Membership::Inside
        );
    }

    #[test]
    fn identity_region_is_a_point() {
        let es = ingest_spectrum(&[0.0; 4]).unwrap();
        for k in 1..=4 {
            let region = build_region(&es, k).unwrap();
            assert!(region.constraints.iter().all(|c| c.degenerate()));
            assert!(!region.point_constraints.is_empty());
            assert_eq!(contains(&region, c(1.0, 0.0), 1e-9), Membership::Inside);
            assert_eq!(contains(&region, c(0.5, 0.0), 1e-9), Membership::Outside);
            assert_eq!(interior_point(&region, 16), None);
            let pts = boundary_samples(&region, 5).unwrap();
            assert!(pts.iter().all(|p| (p - c(1.0, 0.0)).norm() < 1e-12));
        }
    }

    #[test]
    fn triple_zero_spectrum_point_region() {
        let es = ingest_spectrum(&[0.0, 0.0, 2.0]).unwrap();
        let region = build_region(&es, 2).unwrap();
        // D(2, 4) wraps the whole circle
        assert_eq!(region.constraints[1].kind, ConstraintKind::Point);
        assert_eq!(region.point_constraints, vec![c(1.0, 0.0)]);
        for z in [c(1.0, 0.0), c(0.0, 0.0), c(0.5, 0.3)] {
            let oracle = brute_force_contains(&es, 2, z, 1e-9).unwrap();
            assert_eq!(contains(&region, z, 1e-9), oracle, "{z}");
        }
    }

    #[test]
    fn coincident_pair_without_wrap_is_vacuous() {
        // Ω_1 is the convex hull even when two eigenvalues coincide
        let es = ingest_spectrum(&[0.0, 0.0, 2.0, 4.0]).unwrap();
        let region = build_region(&es, 1).unwrap();
        assert_eq!(region.constraints[0].kind, ConstraintKind::Vacuous);
        let z = (es.eigenvalue(1) + es.eigenvalue(3) + es.eigenvalue(4)) / 3.0;
        assert_eq!(contains(&region, z, 1e-9), Membership::Inside);
        assert_eq!(
            brute_force_contains(&es, 1, z, 1e-9).unwrap(),
            Membership::Inside
        );
    }

    #[test]
    fn rank_guard() {
        let es = roots(5);
        assert!(matches!(
            build_region(&es, 0),
            Err(Error::InvalidRank { .. })
        ));
        assert!(matches!(
            build_region(&es, 6),
            Err(Error::InvalidRank { .. })
        ));
        let big = roots(17);
        assert!(matches!(
            brute_force_contains(&big, 2, c(0.0, 0.0), 1e-9),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn oracle_rank_one_contains_mean() {
        let es = ingest_spectrum(&[0.3, 1.9, 2.2, 5.0]).unwrap();
        let mean = es.eigenvalues().iter().sum::<Cx<f64>>() / 4.0;
        assert_eq!(
            brute_force_contains(&es, 1, mean, 1e-9).unwrap(),
            Membership::Inside
        );
    }

    #[test]
    fn oracle_three_points_rank_two() {
        let es = ingest_spectrum(&[0.0, 2.0, 4.0]).unwrap();
        let l1 = es.eigenvalue(1);
        assert_eq!(
            brute_force_contains(&es, 2, l1, 1e-9).unwrap(),
            Membership::Outside
        );
        assert_eq!(
            contains(&build_region(&es, 2).unwrap(), l1, 1e-9),
            Membership::Outside
        );
    }

    #[test]
    fn interior_point_of_pentagon_is_centre() {
        let region = build_region(&roots(5), 2).unwrap();
        let z = interior_point(&region, 32).unwrap();
        assert!(z.norm() < 1e-2);
    }

    #[test]
    fn segment_region_has_no_interior() {
        // Ω_1 of {1, −1} is the diameter
        let es = ingest_spectrum(&[0.0, PI]).unwrap();
        let region = build_region(&es, 1).unwrap();
        assert_eq!(interior_point(&region, 32), None);
        assert_eq!(contains(&region, c(0.0, 0.0), 1e-9), Membership::Boundary);
        assert_eq!(contains(&region, c(0.0, 0.1), 1e-9), Membership::Outside);
    }

    #[test]
    fn pentagon_boundary_vertices() {
        let es = roots(5);
        let region = build_region(&es, 2).unwrap();
        let pts = boundary_samples(&region, 20).unwrap();
        assert_eq!(pts.len(), 20);
        // inner pentagon vertices: intersections of consecutive chords
        let r = (2.0 * PI / 5.0).cos() / (PI / 5.0).cos();
        let hits = pts.iter().filter(|p| (p.norm() - r).abs() < 1e-6).count();
        assert_eq!(hits, 5);
        for j in 0..5 {
            let v = unit(2.0 * PI * j as f64 / 5.0) * (-r);
            assert!(
                pts.iter().any(|p| (p - v).norm() < 1e-6),
                "missing vertex {v}"
            );
        }
        // counterclockwise order
        let area = polygon_area(&pts);
        assert!(area > 0.0);
    }

    #[test]
    fn triangle_region_boundary() {
        let es = ingest_spectrum(&[0.0, 2.0, 4.0]).unwrap();
        let region = build_region(&es, 1).unwrap();
        let pts = boundary_samples(&region, 12).unwrap();
        for v in es.eigenvalues() {
            assert!(pts.iter().any(|p| (p - v).norm() < 1e-6));
        }
        assert!(pts.iter().all(|p| p.norm() <= 1.0 + 1e-9));
    }

    #[test]
    fn full_disk_boundary_when_no_chord_bites() {
        // a single vacuous constraint: N = 2 with coincident eigenvalues, k = 1
        let es = ingest_spectrum(&[1.0, 1.0]).unwrap();
        let region = build_region(&es, 1).unwrap();
        // D(2, 3) wraps fully, so the region is the point λ_1
        assert_eq!(region.point_constraints.len(), 1);
        let pts = boundary_samples(&region, 4).unwrap();
        assert!(pts.iter().all(|p| (p - unit(1.0)).norm() < 1e-12));
    }

    #[test]
    fn combinations_are_enumerated() {
        let mut s = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut s, 5) {
            count += 1;
        }
        assert_eq!(count, 10);
    }
}
