//! Eigensystems of unitary matrices on the unit circle.
//!
//! Eigen-labels are 1-based and extend cyclically: label `j + N` refers to the
//! same eigenvector as `j`, with its phase advanced by one full turn.

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{adjoint, frobenius, identity};
use crate::scalar::{unit, Cx, Real};

pub const DEFAULT_UNITARITY_TOL: f64 = 1e-9;
pub const DEFAULT_EIGEN_TOL: f64 = 1e-9;

/// Canonically ordered eigensystem of a unitary matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem<T: Real> {
    phases: Vec<T>,
    basis: DMatrix<Cx<T>>,
    matrix: DMatrix<Cx<T>>,
    unitarity_residual: T,
    eigen_residual: T,
}

impl<T: Real> EigenSystem<T> {
    /// Assembles an eigensystem from already known parts, checking every
    /// invariant. `phases[j]` must belong to column `j` of `basis`.
    pub fn from_parts(
        matrix: DMatrix<Cx<T>>,
        phases: Vec<T>,
        basis: DMatrix<Cx<T>>,
        tol: T,
    ) -> Result<Self> {
        let n = phases.len();
        if n == 0 {
            return Err(Error::EmptySpectrum);
        }
        if matrix.shape() != (n, n) || basis.shape() != (n, n) {
            return Err(Error::ShapeMismatch(format!(
                "matrix {:?}, basis {:?}, {} phases",
                matrix.shape(),
                basis.shape(),
                n
            )));
        }
        let two_pi = T::two_pi();
        if phases
            .iter()
            .any(|p| !p.is_finite() || *p < T::zero() || *p >= two_pi)
        {
            return Err(Error::InvalidInput("phases must lie in [0, 2pi)".into()));
        }
        if phases.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidInput(
                "phases must be sorted ascending".into(),
            ));
        }
        let unitarity_residual = frobenius(&(adjoint(&matrix) * &matrix - identity(n)));
        if unitarity_residual > tol {
            return Err(not_unitary(unitarity_residual, tol));
        }
        let gram = frobenius(&(adjoint(&basis) * &basis - identity(n)));
        if gram > tol {
            return Err(Error::InvalidInput(format!(
                "eigenbasis is not orthonormal (Gram residual {:e})",
                gram.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let eigen_residual = column_residual(&matrix, &basis, &phases);
        if eigen_residual > tol {
            return Err(Error::EigensolveFailed(format!(
                "eigenpair residual {:e} exceeds tolerance",
                eigen_residual.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self {
            phases,
            basis,
            matrix,
            unitarity_residual,
            eigen_residual,
        })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// Sorted phases in `[0, 2π)`.
    pub fn phases(&self) -> &[T] {
        &self.phases
    }

    /// Columns are the eigenvectors, in phase order.
    pub fn basis(&self) -> &DMatrix<Cx<T>> {
        &self.basis
    }

    /// The matrix the eigensystem was derived from.
    pub fn matrix(&self) -> &DMatrix<Cx<T>> {
        &self.matrix
    }

    pub fn unitarity_residual(&self) -> T {
        self.unitarity_residual
    }

    /// Largest `‖σv − e^{iθ}v‖` over the basis columns.
    pub fn eigen_residual(&self) -> T {
        self.eigen_residual
    }

    /// Eigenvalue for a 1-based label, resolved cyclically.
    pub fn eigenvalue(&self, label: i64) -> Cx<T> {
        let (j, _) = CyclicIndex::new(label, self.dim()).resolve();
        unit(self.phases[j - 1])
    }

    /// Unwrapped phase of a 1-based label: the canonical phase plus one full
    /// turn per wrap.
    pub fn unwrapped_phase(&self, label: i64) -> T {
        let idx = CyclicIndex::new(label, self.dim());
        let (j, _) = idx.resolve();
        self.phases[j - 1] + idx.angular_offset::<T>()
    }

    pub fn eigenvalues(&self) -> Vec<Cx<T>> {
        self.phases.iter().map(|&p| unit(p)).collect()
    }

    /// Same eigensystem with every eigenvalue multiplied by `exp(i·angle)`.
    pub fn rotated(&self, angle: T) -> Self {
        let mut phases: Vec<T> = self
            .phases
            .iter()
            .map(|&p| canonical_phase(unit(p + angle)))
            .collect();
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| phases[a].partial_cmp(&phases[b]).expect("finite phase"));
        let basis = DMatrix::from_fn(n, n, |r, c| self.basis[(r, order[c])]);
        phases = order.iter().map(|&j| phases[j]).collect();
        let rot = unit(angle);
        let matrix = self.matrix.map(|z| z * rot);
        let eigen_residual = column_residual(&matrix, &basis, &phases);
        Self {
            phases,
            basis,
            matrix,
            unitarity_residual: self.unitarity_residual,
            eigen_residual,
        }
    }
}

/// Maps `z` to its argument in `[0, 2π)`.
pub fn canonical_phase<T: Real>(z: Cx<T>) -> T {
    let two_pi = T::two_pi();
    let mut p = z.im.atan2(z.re);
    if p < T::zero() {
        p += two_pi;
    }
    if p >= two_pi {
        p = T::zero();
    }
    p
}

/// Builds the eigensystem of the diagonal unitary `diag(exp(iθ_j))`.
///
/// Phases are canonicalised through the same argument map that
/// [`ingest_matrix`] applies to computed eigenvalues, so both routes agree
/// exactly on diagonal input.
pub fn ingest_spectrum<T: Real>(phases: &[T]) -> Result<EigenSystem<T>> {
    if phases.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if phases.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("phases must be finite".into()));
    }
    let n = phases.len();
    let matrix = DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            unit(phases[r])
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let canonical: Vec<T> = phases.iter().map(|&p| canonical_phase(unit(p))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        canonical[a]
            .partial_cmp(&canonical[b])
            .expect("finite phase")
    });
    let sorted: Vec<T> = order.iter().map(|&j| canonical[j]).collect();
    let basis = DMatrix::from_fn(n, n, |r, c| {
        if r == order[c] {
            Complex::new(T::one(), T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let eigen_residual = column_residual(&matrix, &basis, &sorted);
    let unitarity_residual = frobenius(&(adjoint(&matrix) * &matrix - identity(n)));
    Ok(EigenSystem {
        phases: sorted,
        basis,
        matrix,
        unitarity_residual,
        eigen_residual,
    })
}

/// Eigendecomposition of a dense unitary matrix.
///
/// Uses the complex Schur form, which is diagonal for normal input; the
/// Schur vectors are then an orthonormal eigenbasis.
pub fn ingest_matrix<T: Real + RealField>(
    matrix: DMatrix<Cx<T>>,
    tol: T,
) -> Result<EigenSystem<T>> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(Error::ShapeMismatch(format!(
            "matrix is {rows}x{cols}, expected square"
        )));
    }
    if rows == 0 {
        return Err(Error::EmptySpectrum);
    }
    if matrix
        .iter()
        .any(|z| !Float::is_finite(z.re) || !Float::is_finite(z.im))
    {
        return Err(Error::InvalidInput("matrix entries must be finite".into()));
    }
    let n = rows;
    let unitarity_residual = frobenius(&(adjoint(&matrix) * &matrix - identity(n)));
    if unitarity_residual > tol {
        return Err(not_unitary(unitarity_residual, tol));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let diagonal = (0..n).all(|r| (0..n).all(|c| r == c || matrix[(r, c)] == zero));
    let (q, t) = if diagonal {
        // already in Schur form; iterating would only perturb the last bits
        (identity(n), matrix.clone())
    } else {
        nalgebra::linalg::Schur::try_new(matrix.clone(), <T as Real>::tol(1e-15), 10_000 * n)
            .ok_or_else(|| Error::EigensolveFailed("Schur iteration did not converge".into()))?
            .unpack()
    };
    let raw_phases: Vec<T> = (0..n).map(|j| canonical_phase(t[(j, j)])).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        raw_phases[a]
            .partial_cmp(&raw_phases[b])
            .expect("finite phase")
    });
    let phases: Vec<T> = order.iter().map(|&j| raw_phases[j]).collect();
    let basis = DMatrix::from_fn(n, n, |r, c| q[(r, order[c])]);
    let eigen_residual = column_residual(&matrix, &basis, &phases);
    if eigen_residual > tol {
        return Err(Error::EigensolveFailed(format!(
            "eigenpair residual {:e} exceeds tolerance {:e}",
            num_traits::ToPrimitive::to_f64(&eigen_residual).unwrap_or(f64::NAN),
            num_traits::ToPrimitive::to_f64(&tol).unwrap_or(f64::NAN)
        )));
    }
    Ok(EigenSystem {
        phases,
        basis,
        matrix,
        unitarity_residual,
        eigen_residual,
    })
}

fn not_unitary<T: Real>(residual: T, tol: T) -> Error {
    Error::NotUnitary {
        residual: residual.to_f64().unwrap_or(f64::NAN),
        tol: tol.to_f64().unwrap_or(f64::NAN),
    }
}

fn column_residual<T: Real>(matrix: &DMatrix<Cx<T>>, basis: &DMatrix<Cx<T>>, phases: &[T]) -> T {
    let image = matrix * basis;
    let mut worst = T::zero();
    for (j, &p) in phases.iter().enumerate() {
        let lambda = unit(p);
        let mut acc = T::zero();
        for r in 0..phases.len() {
            acc += (image[(r, j)] - basis[(r, j)] * lambda).norm_sqr();
        }
        worst = worst.max(acc.sqrt());
    }
    worst
}

/// A 1-based eigen-label that may lie outside `1..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicIndex {
    pub raw: i64,
    pub dim: usize,
}

impl CyclicIndex {
    pub fn new(raw: i64, dim: usize) -> Self {
        assert!(dim >= 1, "cyclic index over an empty range");
        Self { raw, dim }
    }

    /// Canonical label in `1..=N` and the number of full turns wrapped.
    pub fn resolve(&self) -> (usize, i64) {
        let n = self.dim as i64;
        let canonical = (self.raw - 1).rem_euclid(n) + 1;
        let wraps = (self.raw - 1).div_euclid(n);
        (canonical as usize, wraps)
    }

    pub fn canonical(&self) -> usize {
        self.resolve().0
    }

    /// `2π · wraps`.
    pub fn angular_offset<T: Real>(&self) -> T {
        T::two_pi() * T::lit(self.resolve().1 as f64)
    }
}

/// Orientation-reversing relabeling `r(j) = ((c − j) mod N) + 1`.
///
/// The pivot `c` is sent to label 1. The map is an involution on `1..=N` and
/// preserves the multiset of cyclic gaps of every index triple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    pivot: usize,
    table: Vec<usize>,
}

impl LabelMap {
    pub fn pivot(&self) -> usize {
        self.pivot
    }

    /// Image of a canonical label.
    pub fn apply(&self, label: usize) -> usize {
        self.table[label - 1]
    }
}

pub fn reflect_labels(dim: usize, pivot: usize) -> LabelMap {
    assert!(
        (1..=dim).contains(&pivot),
        "pivot {pivot} outside 1..={dim}"
    );
    let n = dim as i64;
    let c = pivot as i64;
    let table = (1..=n)
        .map(|j| ((c - j).rem_euclid(n) + 1) as usize)
        .collect();
    LabelMap { pivot, table }
}
