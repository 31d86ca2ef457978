//! Matrix Market array files and plain CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Reads a dense matrix, picking the format from the first line: a
/// `%%MatrixMarket` banner means Matrix Market, anything else is CSV.
pub fn parse_matrix(text: &str) -> Result<DenseMatrix> {
    if text.trim_start().starts_with("%%MatrixMarket") {
        parse_matrix_market(text)
    } else {
        parse_csv(text)
    }
}

/// [`parse_matrix`] on a file. I/O failures surface as [`std::io::Error`].
pub fn read_matrix(path: &Path) -> std::result::Result<Result<DenseMatrix>, std::io::Error> {
    Ok(parse_matrix(&std::fs::read_to_string(path)?))
}

pub fn parse_matrix_market(text: &str) -> Result<DenseMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let fields: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("malformed banner '{banner}'"),
        });
    }
    if fields[2] != "array" {
        return Err(Error::UnsupportedFormat(format!("storage '{}'; only array is supported", fields[2])));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(Error::UnsupportedFormat(format!("field '{}'; only real data is supported", fields[3])));
    }
    if fields[4] != "general" {
        return Err(Error::UnsupportedFormat(format!("symmetry '{}'; only general is supported", fields[4])));
    }

    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));
    let (size_line, size) = body.next().ok_or(Error::Parse {
        line: 2,
        msg: "missing size line".into(),
    })?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::Parse {
            line: size_line,
            msg: format!("bad size line '{size}'"),
        })?;
    let [rows, cols] = dims[..] else {
        return Err(Error::Parse {
            line: size_line,
            msg: "size line needs exactly two integers".into(),
        });
    };
    let mut values = Vec::with_capacity(rows * cols);
    for (line, text) in body {
        for tok in text.split_whitespace() {
            values.push(parse_value(tok, line)?);
        }
    }
    if values.len() != rows * cols {
        return Err(Error::Parse {
            line: size_line,
            msg: format!("expected {} values, found {}", rows * cols, values.len()),
        });
    }
    DenseMatrix::from_column_major(rows, cols, &values)
}

/// Rows of comma-separated numbers; blank lines and lines starting with `#` are skipped.
pub fn parse_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| parse_value(t.trim(), i + 1))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("row has {} entries, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 1,
            msg: "no data rows".into(),
        });
    }
    DenseMatrix::from_rows(&rows)
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("'{tok}' is not a number"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite value '{tok}'"),
        });
    }
    Ok(v)
}

/// Matrix Market array text, column-major, shortest round-trip float formatting.
pub fn to_matrix_market(a: &DenseMatrix) -> String {
    let mut out = String::from("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} {}", a.rows(), a.cols());
    for c in 0..a.cols() {
        for r in 0..a.rows() {
            let _ = writeln!(out, "{:e}", a[(r, c)]);
        }
    }
    out
}

pub fn to_csv(a: &DenseMatrix) -> String {
    let mut out = String::new();
    for r in 0..a.rows() {
        let row: Vec<String> = a.row(r).iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_identity() {
        assert_eq!(parse_matrix("1,0\n0,1").unwrap(), DenseMatrix::identity(2));
        assert_eq!(parse_csv("# comment\n1, 0\n\n0 ,1\n").unwrap(), DenseMatrix::identity(2));
    }

    #[test]
    fn matrix_market_column() {
        let text = "%%MatrixMarket matrix array real general\n% note\n3 1\n1\n2\n3\n";
        assert_eq!(parse_matrix(text).unwrap(), DenseMatrix::column_vector(&[1.0, 2.0, 3.0]).unwrap());
    }

    #[test]
    fn matrix_market_is_column_major() {
        let text = "%%MatrixMarket matrix array integer general\n2 2\n1\n3\n2\n4\n";
        let a = parse_matrix(text).unwrap();
        assert_eq!(a, DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap());
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert_eq!(
            parse_csv("1,2\n3\n").unwrap_err(),
            Error::Parse {
                line: 2,
                msg: "row has 1 entries, expected 2".into()
            }
        );
        assert!(matches!(parse_csv("1,x"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_matrix("%%MatrixMarket matrix array complex general\n1 1\n1 0\n"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            parse_matrix("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"),
            Err(Error::UnsupportedFormat(_))
        ));
        assert!(matches!(
            parse_matrix("%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_matrix("%%MatrixMarket oops\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let a = DenseMatrix::from_rows(&[[0.1, -1.0 / 3.0, 1e-300], [std::f64::consts::PI, 2.5e10, -0.0]]).unwrap();
        let back = parse_matrix(&to_matrix_market(&a)).unwrap();
        assert!(a.entries().iter().zip(back.entries()).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(parse_csv(&to_csv(&a)).unwrap(), a);
    }
}
