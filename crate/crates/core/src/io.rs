//! JSON interchange format for covariance matrices.
//!
//! ```json
//! {
//!   "n_modes": 1,
//!   "ordering": "qpqp",
//!   "matrix": [[1.0, 0.0], [0.0, 1.0]]
//! }
//! ```
//!
//! `matrix` holds the rows of the 2N x 2N covariance matrix in the
//! interleaved quadrature ordering; `"qpqp"` is the only ordering this
//! format admits, and naming it in the file guards against silently
//! importing block-ordered data. The reader symmetrizes and validates;
//! the writer emits 17 significant digits so values round-trip to the
//! exact same floats.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::symplectic::CovarianceMatrix;
use crate::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct CmFile {
    n_modes: usize,
    ordering: String,
    matrix: Vec<Vec<f64>>,
}

/// Parse a covariance matrix from its JSON text.
///
/// Malformed JSON, a wrong `ordering` tag, or shape mismatches yield
/// [`Error::Parse`] (with line and column for syntax errors); a matrix
/// that parses but fails the physical checks yields
/// [`Error::InvalidState`].
pub fn cm_from_json(text: &str) -> Result<CovarianceMatrix> {
    let file: CmFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.ordering != "qpqp" {
        return Err(Error::Parse(format!(
            "unsupported ordering {:?}; this format stores interleaved \"qpqp\" quadratures",
            file.ordering
        )));
    }
    if file.n_modes == 0 {
        return Err(Error::Parse("n_modes must be positive".into()));
    }
    let dim = 2 * file.n_modes;
    if file.matrix.len() != dim {
        return Err(Error::Parse(format!(
            "matrix has {} rows, expected {dim} for {} modes",
            file.matrix.len(),
            file.n_modes
        )));
    }
    for (i, row) in file.matrix.iter().enumerate() {
        if row.len() != dim {
            return Err(Error::Parse(format!(
                "row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
    }
    let data = DMatrix::from_fn(dim, dim, |i, j| file.matrix[i][j]);
    CovarianceMatrix::new(data)
}

/// Serialize a covariance matrix to JSON text (trailing newline
/// included). Floats carry 17 significant digits.
pub fn cm_to_json(cm: &CovarianceMatrix) -> String {
    let dim = 2 * cm.n_modes();
    let m = cm.matrix();
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"n_modes\": {},\n", cm.n_modes()));
    out.push_str("  \"ordering\": \"qpqp\",\n");
    out.push_str("  \"matrix\": [\n");
    for i in 0..dim {
        out.push_str("    [");
        for j in 0..dim {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("{:.16e}", m[(i, j)]));
        }
        out.push(']');
        if i + 1 < dim {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    out
}
