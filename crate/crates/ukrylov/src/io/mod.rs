//! File formats: Matrix Market matrices, vectors, and solve reports.

mod mtx;
mod report;
mod vector;

use std::path::Path;

use ukrylov_core::DenseSymmetric;

pub use mtx::{parse_matrix_market, read_matrix_market, to_matrix_market, write_matrix_market, MAX_DIM};
pub use report::{
    ConfigEcho, Format, IterationData, ReportDocument, Timings, TripleRecord, SCHEMA_VERSION,
};
pub use vector::{parse_vector, read_vector, to_vector_file, write_vector};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("matrix is not symmetric: entries ({row}, {col}) and ({col}, {row}) differ by {difference:e}")]
    NotSymmetric { row: usize, col: usize, difference: f64 },
    #[error("unsupported Matrix Market header field `{0}`")]
    UnsupportedField(String),
    #[error("dimension {n} exceeds the supported maximum of {MAX_DIM}")]
    TooLarge { n: usize },
    #[error("vector file holds no entries")]
    EmptyVector,
    #[error("report field `{0}` is not finite")]
    NonFinite(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed report: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] ukrylov_core::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        line,
        reason: reason.into(),
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// A system `Hx + c = 0` loaded from disk.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub h: DenseSymmetric,
    pub c: Vec<f64>,
    pub name: String,
    pub source_paths: Vec<String>,
}

impl ProblemInstance {
    /// Checks `dim(H) = len(c)` and `c != 0`.
    pub fn new(h: DenseSymmetric, c: Vec<f64>, name: impl Into<String>) -> Result<Self> {
        if h.n() != c.len() {
            return Err(ukrylov_core::Error::DimensionMismatch {
                expected: h.n(),
                found: c.len(),
            }
            .into());
        }
        if c.iter().all(|v| *v == 0.0) {
            return Err(ukrylov_core::Error::ZeroRightHandSide.into());
        }
        Ok(ProblemInstance {
            h,
            c,
            name: name.into(),
            source_paths: Vec::new(),
        })
    }

    /// Reads `H` and the right-hand side. With `rhs_is_b` the vector file is
    /// taken to hold `b` of `Hx = b`, and `c = -b`.
    pub fn load(matrix: &Path, rhs: &Path, rhs_is_b: bool) -> Result<Self> {
        let h = read_matrix_market(matrix)?;
        let mut c = read_vector(rhs)?;
        if rhs_is_b {
            for v in &mut c {
                *v = -*v;
            }
        }
        let name = matrix
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut p = ProblemInstance::new(h, c, name)?;
        p.source_paths = vec![matrix.display().to_string(), rhs.display().to_string()];
        Ok(p)
    }
}
