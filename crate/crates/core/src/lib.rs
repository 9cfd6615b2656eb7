//! Rank-k numerical ranges of unitary matrices.
//!
//! The crate computes the region `Ω_k(σ)` cut out of the unit disk by the
//! chords joining eigenvalues `k` steps apart, tests membership against it
//! (with an independent convex-hull oracle), and for `N ∈ {3k−2 (k ≥ 5),
//! 3k−1, 3k}` builds an explicit rank-k orthogonal projector `P` with
//! `PσP = λP` for any `λ` strictly inside the region.
//!
//! All numerics are generic over [`Real`]; the `*64` aliases below fix the
//! scalar to `f64`, which is what the tolerances are calibrated for.

pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod pair;
pub mod refine;
pub mod region;
pub mod sampling;
pub mod scalar;
pub mod schema;
pub mod spectrum;
pub mod triangle;

pub use decomposition::{
    caratheodory_rank1, construct_projector, plan, verify_projector, DecompositionPlan,
    DimensionCase, Pairing, Projector, ResidualReport, Thresholds,
};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use pair::{
    discriminant_coeffs, solve_pair, vector_from_triangle, PairParameters, SharedVertexProblem,
    VectorCoefficients,
};
pub use refine::{refine_frame, RefineReport};
pub use region::{
    boundary_samples, brute_force_contains, build_region, contains, interior_point,
    ChordConstraint, ConstraintKind, Membership, OmegaRegion,
};
pub use scalar::{Cx, Real};
pub use spectrum::{
    ingest_matrix, ingest_spectrum, reflect_labels, CyclicIndex, EigenSystem, LabelMap,
};
pub use triangle::{
    containment_check, solve_barycentric, validate_triangle, weak_vertices, BarycentricWeights,
    TriangleSpec,
};

pub type Complex64 = Cx<f64>;
pub type Matrix64 = CMatrix<f64>;
pub type EigenSystem64 = EigenSystem<f64>;
pub type OmegaRegion64 = OmegaRegion<f64>;
pub type BarycentricWeights64 = BarycentricWeights<f64>;
pub type VectorCoefficients64 = VectorCoefficients<f64>;
pub type Projector64 = Projector<f64>;
