//! Plain-text matrix format.
//!
//! ```text
//! rows cols field        # field is `real` or `complex`
//! a11 a12 ...            # rows*cols entries, row-major, any whitespace
//! ```
//!
//! Complex entries are written as `re im` pairs. Lines starting with `#`
//! are comments.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use super::DenseMatrix;
use crate::error::{Error, Result};

pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);

    let mut header = || tokens.next().ok_or_else(|| Error::invalid("matrix file: truncated header"));
    let rows: usize = header()?
        .parse()
        .map_err(|e| Error::invalid(format!("matrix file: bad row count: {e}")))?;
    let cols: usize = header()?
        .parse()
        .map_err(|e| Error::invalid(format!("matrix file: bad column count: {e}")))?;
    let complex = match header()? {
        "real" => false,
        "complex" => true,
        other => {
            return Err(Error::invalid(format!(
                "matrix file: field must be `real` or `complex`, got `{other}`"
            )))
        }
    };

    let values: Vec<f64> = tokens
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::invalid(format!("matrix file: bad entry `{t}`: {e}")))
        })
        .collect::<Result<_>>()?;
    let per_entry = if complex { 2 } else { 1 };
    let expected = rows * cols * per_entry;
    if values.len() != expected {
        return Err(Error::invalid(format!(
            "matrix file: {rows}x{cols} {} needs {expected} numbers, found {}",
            if complex { "complex" } else { "real" },
            values.len()
        )));
    }
    let data = if complex {
        values.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
    } else {
        values.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    };
    DenseMatrix::new(rows, cols, data)
}

/// Writes the matrix with round-trip exact decimal representations. Uses
/// the `real` field when every imaginary part is zero.
pub fn format_matrix(m: &DenseMatrix) -> String {
    let complex = m.as_slice().iter().any(|z| z.im != 0.0);
    let mut out = format!(
        "{} {} {}\n",
        m.rows(),
        m.cols(),
        if complex { "complex" } else { "real" }
    );
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m[(i, j)];
                if complex {
                    format!("{:e} {:e}", z.re, z.im)
                } else {
                    format!("{:e}", z.re)
                }
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text)
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_matrix(m))
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}
