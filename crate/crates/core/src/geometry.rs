//! Planar primitives on complex numbers: convex hulls, point classification
//! and half-plane clipping.

use serde::{Deserialize, Serialize};

use crate::scalar::{cross, dot, Cx, Real};

/// Three-way membership verdict against a closed convex set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

impl Membership {
    /// Meet of two verdicts for an intersection of sets.
    pub fn and(self, other: Membership) -> Membership {
        use Membership::*;
        match (self, other) {
            (Outside, _) | (_, Outside) => Outside,
            (Boundary, _) | (_, Boundary) => Boundary,
            _ => Inside,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Membership::Inside => "inside",
            Membership::Boundary => "boundary",
            Membership::Outside => "outside",
        }
    }
}

impl std::fmt::Display for Membership {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Convex hull of a finite point set, by dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum Hull<T: Real> {
    Point(Cx<T>),
    Segment(Cx<T>, Cx<T>),
    /// Counterclockwise, strictly convex.
    Polygon(Vec<Cx<T>>),
}

impl<T: Real> Hull<T> {
    /// Andrew's monotone chain. Panics on an empty slice.
    pub fn of(points: &[Cx<T>]) -> Self {
        assert!(!points.is_empty(), "hull of no points");
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| {
            a.re.partial_cmp(&b.re)
                .expect("finite")
                .then(a.im.partial_cmp(&b.im).expect("finite"))
        });
        pts.dedup();
        if pts.len() == 1 {
            return Hull::Point(pts[0]);
        }
        let mut lower: Vec<Cx<T>> = Vec::with_capacity(pts.len());
        for &p in &pts {
            while lower.len() >= 2
                && cross(
                    lower[lower.len() - 1] - lower[lower.len() - 2],
                    p - lower[lower.len() - 2],
                ) <= T::zero()
            {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Cx<T>> = Vec::with_capacity(pts.len());
        for &p in pts.iter().rev() {
            while upper.len() >= 2
                && cross(
                    upper[upper.len() - 1] - upper[upper.len() - 2],
                    p - upper[upper.len() - 2],
                ) <= T::zero()
            {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        match lower.len() {
            0 => Hull::Point(pts[0]),
            1 => Hull::Point(lower[0]),
            2 => Hull::Segment(lower[0], lower[1]),
            _ => Hull::Polygon(lower),
        }
    }

    /// Signed distance to the boundary, positive inside. Only defined for
    /// polygons; lower-dimensional hulls have no interior.
    pub fn margin(&self, z: Cx<T>) -> Option<T> {
        match self {
            Hull::Polygon(v) => Some(
                (0..v.len())
                    .map(|i| line_margin(v[i], v[(i + 1) % v.len()], z))
                    .fold(T::infinity(), T::min),
            ),
            _ => None,
        }
    }

    pub fn distance(&self, z: Cx<T>) -> T {
        match self {
            Hull::Point(p) => (z - p).norm(),
            Hull::Segment(a, b) => segment_distance(*a, *b, z),
            Hull::Polygon(v) => {
                if self.margin(z).expect("polygon") >= T::zero() {
                    T::zero()
                } else {
                    (0..v.len())
                        .map(|i| segment_distance(v[i], v[(i + 1) % v.len()], z))
                        .fold(T::infinity(), T::min)
                }
            }
        }
    }

    /// Classification with a two-sided tolerance band. A single-point hull
    /// reports `Inside` when matched, mirroring point constraints.
    pub fn classify(&self, z: Cx<T>, tol: T) -> Membership {
        match self {
            Hull::Point(p) => {
                if (z - p).norm() <= tol {
                    Membership::Inside
                } else {
                    Membership::Outside
                }
            }
            Hull::Segment(a, b) => {
                if segment_distance(*a, *b, z) <= tol {
                    Membership::Boundary
                } else {
                    Membership::Outside
                }
            }
            Hull::Polygon(_) => {
                let m = self.margin(z).expect("polygon");
                if m > tol {
                    Membership::Inside
                } else if m < -tol {
                    Membership::Outside
                } else {
                    Membership::Boundary
                }
            }
        }
    }

    pub fn contains_closed(&self, z: Cx<T>, tol: T) -> bool {
        self.classify(z, tol) != Membership::Outside
    }
}

/// Signed distance from `z` to the line through `a → b`, positive on the left.
pub fn line_margin<T: Real>(a: Cx<T>, b: Cx<T>, z: Cx<T>) -> T {
    cross(b - a, z - a) / (b - a).norm()
}

pub fn segment_distance<T: Real>(a: Cx<T>, b: Cx<T>, z: Cx<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == T::zero() {
        return (z - a).norm();
    }
    let t = (dot(d, z - a) / len2).max(T::zero()).min(T::one());
    (a + d * t - z).norm()
}

/// Shoelace area, positive for counterclockwise order.
pub fn polygon_area<T: Real>(poly: &[Cx<T>]) -> T {
    let n = poly.len();
    (0..n).map(|i| cross(poly[i], poly[(i + 1) % n])).sum::<T>() * T::lit(0.5)
}

/// Sutherland–Hodgman step: keeps the part of `poly` where `margin ≥ 0`.
pub fn clip<T: Real>(poly: &[Cx<T>], margin: impl Fn(Cx<T>) -> T) -> Vec<Cx<T>> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let (mp, mq) = (margin(p), margin(q));
        if mp >= T::zero() {
            out.push(p);
        }
        if (mp >= T::zero()) != (mq >= T::zero()) {
            let t = mp / (mp - mq);
            out.push(p + (q - p) * t);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn hull_dimensions() {
        assert_eq!(
            Hull::of(&[c(1.0, 0.0), c(1.0, 0.0)]),
            Hull::Point(c(1.0, 0.0))
        );
        assert!(matches!(
            Hull::of(&[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]),
            Hull::Segment(..)
        ));
        let h = Hull::of(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.2, 0.2)]);
        match &h {
            Hull::Polygon(v) => {
                assert_eq!(v.len(), 3);
                assert!(polygon_area(v) > 0.0);
            }
            _ => panic!("expected polygon"),
        }
        assert_eq!(h.classify(c(0.2, 0.2), 1e-9), Membership::Inside);
        assert_eq!(h.classify(c(0.5, 0.0), 1e-9), Membership::Boundary);
        assert_eq!(h.classify(c(1.0, 1.0), 1e-9), Membership::Outside);
        assert!((h.distance(c(-1.0, 0.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clip_square_by_half_plane() {
        let sq = vec![c(-1.0, -1.0), c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0)];
        let half = clip(&sq, |z| z.re);
        assert!((polygon_area(&half) - 2.0).abs() < 1e-15);
    }
}
