use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unitary: ||S^H S - I||_F = {residual:e} exceeds {tol:e}")]
    NotUnitary { residual: f64, tol: f64 },
    #[error("eigensolver failed: {0}")]
    EigensolveFailed(String),
    #[error("spectrum is empty")]
    EmptySpectrum,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("rank k = {k} is outside 1..={n}")]
    InvalidRank { k: usize, n: usize },
    #[error("brute-force oracle refused N = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("region is empty at sampling resolution")]
    EmptyRegion,
    #[error("no convex combination of triangle {triangle:?} reproduces the target")]
    NoConvexSolution { triangle: [usize; 3] },
    #[error("denominator q1 + (1 - q1)cos(beta) vanishes")]
    DegenerateDenominator,
    #[error("shared vertex is heavy in both triangles (p1 = {p1}, q1 = {q1})")]
    BothHeavy { p1: f64, q1: f64 },
    #[error("no orthogonal pair found for shared vertex problem")]
    NoSolution,
    #[error("unsupported dimension N = {n}, k = {k}: construction covers N = 3k, N = 3k-1 (k >= 2), N = 3k-2 (k >= 5) and k = 1")]
    UnsupportedDimension { n: usize, k: usize },
    #[error("target lambda = {re} + {im}i is not strictly inside the rank-{k} region")]
    LambdaOutsideRegion { re: f64, im: f64, k: usize },
    #[error("constructed vectors are not orthonormal: Gram residual {residual:e}")]
    GramFailure { residual: f64 },
    #[error("no compressing frame found near the constructed vectors: defect {residual:e}")]
    RefinementFailed { residual: f64 },
    #[error("decomposition plan violates its invariants: {0}")]
    PlanInvariant(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

impl Error {
    /// Mathematical rejections of the input, as opposed to internal faults.
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            Error::NotUnitary { .. }
                | Error::LambdaOutsideRegion { .. }
                | Error::UnsupportedDimension { .. }
                | Error::InvalidRank { .. }
                | Error::EmptyRegion
                | Error::TooLarge { .. }
                | Error::EmptySpectrum
        )
    }

    /// Violations of invariants the construction guarantees.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::GramFailure { .. }
                | Error::RefinementFailed { .. }
                | Error::PlanInvariant(_)
                | Error::NoSolution
                | Error::BothHeavy { .. }
                | Error::NoConvexSolution { .. }
                | Error::EigensolveFailed(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
