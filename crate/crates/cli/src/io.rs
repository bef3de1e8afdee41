//! Curve file I/O: CSV with a `t,x1,…,xd` header, atomic writes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use curveshape::DiscreteCurve;
use nalgebra::DMatrix;

use crate::CliError;

/// Read a curve file. The `t` column must be strictly increasing and the
/// ambient dimension is inferred from the header.
pub fn read_curve(path: &Path) -> Result<DiscreteCurve, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?
        .clone();
    if headers.len() < 3 || headers.get(0) != Some("t") {
        return Err(CliError::io(format!(
            "{}: expected header t,x1,…,xd with d >= 2",
            path.display()
        )));
    }
    let d = headers.len() - 1;
    for (k, name) in headers.iter().skip(1).enumerate() {
        let expected = format!("x{}", k + 1);
        if name != expected {
            return Err(CliError::io(format!(
                "{}: column {} named {name:?}, expected {expected:?}",
                path.display(),
                k + 1
            )));
        }
    }

    let mut grid: Vec<f64> = Vec::new();
    let mut rows: Vec<f64> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        if record.len() != d + 1 {
            return Err(CliError::io(format!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                grid.len() + 2,
                record.len(),
                d + 1
            )));
        }
        let mut fields = record.iter().map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|e| CliError::io(format!("{}: bad number {f:?}: {e}", path.display())))
        });
        let t = fields.next().unwrap()?;
        if let Some(&prev) = grid.last() {
            if t <= prev {
                return Err(CliError::io(format!(
                    "{}: t column not strictly increasing at row {}",
                    path.display(),
                    grid.len() + 2
                )));
            }
        }
        grid.push(t);
        for f in fields {
            rows.push(f?);
        }
    }
    let n = grid.len();
    let points = DMatrix::from_row_slice(n, d, &rows);
    DiscreteCurve::new(grid, points).map_err(CliError::from)
}

/// Write a curve file atomically; 17 significant digits round-trip f64
/// exactly.
pub fn write_curve(path: &Path, curve: &DiscreteCurve) -> Result<(), CliError> {
    let mut body = String::new();
    body.push('t');
    for c in 0..curve.dim() {
        body.push_str(&format!(",x{}", c + 1));
    }
    body.push('\n');
    for (i, &t) in curve.grid().iter().enumerate() {
        body.push_str(&format!("{t:.16e}"));
        for c in 0..curve.dim() {
            body.push_str(&format!(",{:.16e}", curve.points()[(i, c)]));
        }
        body.push('\n');
    }
    write_atomic(path, body.as_bytes())
}

/// Whole-file atomic write: temp file in the target directory, then
/// rename over the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(())
}

/// Write a table with an `s` column followed by named value columns.
pub fn write_profile_csv(
    path: &Path,
    s: &[f64],
    columns: &[(&str, Vec<f64>)],
) -> Result<(), CliError> {
    let mut body = String::from("s");
    for (name, _) in columns {
        body.push(',');
        body.push_str(name);
    }
    body.push('\n');
    for (i, &si) in s.iter().enumerate() {
        body.push_str(&format!("{si:.16e}"));
        for (_, col) in columns {
            body.push_str(&format!(",{:.16e}", col[i]));
        }
        body.push('\n');
    }
    write_atomic(path, body.as_bytes())
}

/// Symmetric matrix CSV: label header row, one labelled row per curve.
pub fn write_matrix_csv(
    path: &Path,
    labels: &[String],
    values: &DMatrix<f64>,
) -> Result<(), CliError> {
    let mut body = String::from("label");
    for l in labels {
        body.push(',');
        body.push_str(l);
    }
    body.push('\n');
    for (i, l) in labels.iter().enumerate() {
        body.push_str(l);
        for j in 0..labels.len() {
            let v = values[(i, j)];
            if v.is_nan() {
                body.push_str(",NaN");
            } else {
                body.push_str(&format!(",{v:.16e}"));
            }
        }
        body.push('\n');
    }
    write_atomic(path, body.as_bytes())
}

/// Buffered file creation for streaming writers that do not need
/// atomicity (currently unused by commands, kept for diagnostics).
#[allow(dead_code)]
pub fn create_buffered(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}
