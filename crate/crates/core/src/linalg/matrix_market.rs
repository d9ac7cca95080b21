//! Matrix Market coordinate format, real `general` and `symmetric` only.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::linalg::csr::SparseMatrix;

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MatrixMarket {
        line,
        reason: reason.into(),
    }
}

/// Reads a coordinate-format matrix. Symmetric files are expanded to general
/// storage by mirroring off-diagonal entries.
pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SparseMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty input"))?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(malformed(
            1,
            "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(malformed(1, format!("unsupported object `{}`", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(malformed(1, format!("unsupported format `{}`", tokens[2])));
    }
    if tokens[3] != "real" {
        return Err(Error::UnsupportedField(tokens[3].clone()));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(malformed(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut read = 0usize;
    for (line_no, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(malformed(line_no, "size line needs `rows cols entries`"));
                }
                let parse = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| malformed(line_no, format!("bad size field `{s}`")))
                };
                let dims = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                if symmetric && dims.0 != dims.1 {
                    return Err(malformed(line_no, "symmetric matrix must be square"));
                }
                triplets.reserve(if symmetric { 2 * dims.2 } else { dims.2 });
                size = Some(dims);
            }
            Some((n_rows, n_cols, nnz)) => {
                if fields.len() != 3 {
                    return Err(malformed(line_no, "entry line needs `row col value`"));
                }
                if read == nnz {
                    return Err(malformed(line_no, "more entries than declared"));
                }
                let index = |s: &str, bound: usize| match s.parse::<usize>() {
                    Ok(i) if i >= 1 && i <= bound => Ok(i - 1),
                    _ => Err(malformed(line_no, format!("index `{s}` outside 1..={bound}"))),
                };
                let i = index(fields[0], n_rows)?;
                let j = index(fields[1], n_cols)?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| malformed(line_no, format!("bad value `{}`", fields[2])))?;
                triplets.push((i, j, v));
                if symmetric && i != j {
                    triplets.push((j, i, v));
                }
                read += 1;
            }
        }
    }

    let (n_rows, n_cols, nnz) = size.ok_or_else(|| malformed(1, "missing size line"))?;
    if read != nnz {
        return Err(malformed(
            0,
            format!("declared {nnz} entries but found {read}"),
        ));
    }
    SparseMatrix::from_triplets(n_rows, n_cols, &triplets)
}

/// Writes `a` as a real general coordinate file with round-trip exact values.
pub fn write_matrix_market<W: Write>(a: &SparseMatrix, mut writer: W) -> Result<()> {
    writeln!(writer, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(writer, "{} {} {}", a.n_rows(), a.n_cols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(writer, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}
