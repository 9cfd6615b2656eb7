//! JSON file formats (double precision).
//!
//! * matrix: `{"n": N, "re": [[..]], "im": [[..]]}`, row-major
//! * spectrum: `{"phases": [..]}` in radians
//! * region: `{"k": k, "constraints": [{"i", "a", "b", "sign", "degenerate", "kind"}]}`
//! * plan: `{"case", "triangles", "pairings", "reflected"}`
//! * projector: `{"n", "k", "lambda", "re", "im", "residuals", "plan"}`

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::decomposition::{DecompositionPlan, Pairing, Projector, ResidualReport};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::region::{ConstraintKind, OmegaRegion};
use crate::spectrum::{ingest_matrix, ingest_spectrum, EigenSystem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix<f64>) -> Self {
        let n = m.nrows();
        Self {
            n,
            re: (0..n)
                .map(|r| (0..m.ncols()).map(|c| m[(r, c)].re).collect())
                .collect(),
            im: (0..n)
                .map(|r| (0..m.ncols()).map(|c| m[(r, c)].im).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix<f64>> {
        let n = self.n;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !rows_ok(&self.re) || !rows_ok(&self.im) {
            return Err(Error::ShapeMismatch(format!(
                "matrix file declares n = {n} but arrays disagree"
            )));
        }
        Ok(DMatrix::from_fn(n, n, |r, c| {
            Complex::new(self.re[r][c], self.im[r][c])
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumFile {
    pub phases: Vec<f64>,
}

/// Either accepted input shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputFile {
    Matrix(MatrixFile),
    Spectrum(SpectrumFile),
}

impl InputFile {
    /// The unitary `σ` the file describes.
    pub fn sigma(&self) -> Result<CMatrix<f64>> {
        match self {
            InputFile::Matrix(m) => m.to_matrix(),
            InputFile::Spectrum(s) => Ok(ingest_spectrum(&s.phases)?.matrix().clone()),
        }
    }

    pub fn eigensystem(&self, tol: f64) -> Result<EigenSystem<f64>> {
        match self {
            InputFile::Matrix(m) => ingest_matrix(m.to_matrix()?, tol),
            InputFile::Spectrum(s) => ingest_spectrum(&s.phases),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintJson {
    pub i: usize,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub sign: i8,
    pub degenerate: bool,
    pub kind: ConstraintKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionFile {
    pub k: usize,
    pub constraints: Vec<ConstraintJson>,
    /// Counterclockwise boundary samples, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<[f64; 2]>>,
}

impl From<&OmegaRegion<f64>> for RegionFile {
    fn from(r: &OmegaRegion<f64>) -> Self {
        Self {
            k: r.k,
            constraints: r
                .constraints
                .iter()
                .map(|c| ConstraintJson {
                    i: c.start,
                    a: [c.endpoint_a.re, c.endpoint_a.im],
                    b: [c.endpoint_b.re, c.endpoint_b.im],
                    sign: if c.inward_sign > 0.0 { 1 } else { -1 },
                    degenerate: c.degenerate(),
                    kind: c.kind,
                })
                .collect(),
            boundary: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub case: String,
    pub triangles: Vec<Vec<usize>>,
    pub pairings: Vec<Pairing>,
    pub reflected: bool,
}

impl<'de> Deserialize<'de> for Pairing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            triangles: [usize; 2],
            shared: usize,
        }
        let raw = Raw::deserialize(d)?;
        Ok(Pairing {
            triangles: raw.triangles,
            shared: raw.shared,
        })
    }
}

impl From<&DecompositionPlan> for PlanFile {
    fn from(p: &DecompositionPlan) -> Self {
        let mut triangles: Vec<Vec<usize>> =
            p.triangles.iter().map(|t| t.indices().to_vec()).collect();
        if !p.support.is_empty() {
            triangles.push(p.support.clone());
        }
        Self {
            case: p.case.to_string(),
            triangles,
            pairings: p.pairings.clone(),
            reflected: p.reflection.is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorFile {
    pub n: usize,
    pub k: usize,
    pub lambda: [f64; 2],
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    pub residuals: ResidualReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanFile>,
}

impl From<&Projector<f64>> for ProjectorFile {
    fn from(p: &Projector<f64>) -> Self {
        let m = MatrixFile::from_matrix(&p.matrix);
        Self {
            n: m.n,
            k: p.rank,
            lambda: [p.lambda.re, p.lambda.im],
            re: m.re,
            im: m.im,
            residuals: p.residuals,
            plan: Some(PlanFile::from(&p.plan)),
        }
    }
}

impl ProjectorFile {
    pub fn matrix(&self) -> Result<CMatrix<f64>> {
        MatrixFile {
            n: self.n,
            re: self.re.clone(),
            im: self.im.clone(),
        }
        .to_matrix()
    }

    pub fn lambda(&self) -> Complex<f64> {
        Complex::new(self.lambda[0], self.lambda[1])
    }
}
