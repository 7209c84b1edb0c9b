//! CSV formats: scripted mean tables, linear action sets and model classes.
//!
//! All three are numeric matrices with a generated header (`arm1..armK` or
//! `a1..ad`) and optional `#` comment lines. Values are written with Rust's
//! shortest round-trip float formatting, so write-then-read is bit-exact.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{BenchError, Result};

/// Header of column `c` (0-based) for a column prefix.
fn column_name(prefix: &str, c: usize) -> String {
    format!("{prefix}{}", c + 1)
}

/// Read a numeric CSV whose header is `{prefix}1..{prefix}N`. With `range`,
/// every value must lie inside it. Errors name the 1-based data row and the
/// column header.
pub fn read_matrix(path: &Path, prefix: &str, range: Option<(f64, f64)>) -> Result<Vec<Vec<f64>>> {
    let parse_err = |msg: String| BenchError::Parse {
        path: path.to_path_buf(),
        msg,
    };
    let file = File::open(path).map_err(|e| BenchError::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = rdr.headers()?.clone();
    if header.is_empty() {
        return Err(parse_err("empty header".into()));
    }
    for (c, h) in header.iter().enumerate() {
        let want = column_name(prefix, c);
        if h != want {
            return Err(parse_err(format!("header column {} is {h:?}, expected {want:?}", c + 1)));
        }
    }
    let width = header.len();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row_no = i + 1;
        let rec = rec.map_err(|e| parse_err(format!("row {row_no}: {e}")))?;
        if rec.len() != width {
            return Err(parse_err(format!("row {row_no}: {} fields, expected {width}", rec.len())));
        }
        let mut row = Vec::with_capacity(width);
        for (c, field) in rec.iter().enumerate() {
            let col = column_name(prefix, c);
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(format!("row {row_no}, {col}: {field:?} is not a number")))?;
            let ok = v.is_finite() && range.map_or(true, |(lo, hi)| v >= lo && v <= hi);
            if !ok {
                let bounds = range.map(|(lo, hi)| format!(" outside [{lo}, {hi}]")).unwrap_or_default();
                return Err(parse_err(format!("row {row_no}, {col}: value {v}{bounds}")));
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err("no data rows".into()));
    }
    Ok(rows)
}

/// Write a matrix with a `{prefix}1..` header, preceded by `#` comment lines.
pub fn write_matrix(path: &Path, prefix: &str, comments: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let width = rows.first().map_or(0, Vec::len);
    if width == 0 || rows.iter().any(|r| r.len() != width) {
        return Err(BenchError::Config("matrix must be non-empty and rectangular".into()));
    }
    let file = File::create(path).map_err(|e| BenchError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut emit = || -> std::io::Result<()> {
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        let header: Vec<String> = (0..width).map(|c| column_name(prefix, c)).collect();
        writeln!(w, "{}", header.join(","))?;
        for r in rows {
            let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()
    };
    emit().map_err(|e| BenchError::io(path, e))
}

/// Load a scripted environment table: one row per round, Bernoulli means.
/// Row `r` of the data (1-based in error messages) is round `r - 1`.
pub fn load_scripted_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_matrix(path, "arm", Some((0.0, 1.0))).map_err(|e| match e {
        BenchError::Parse { path, msg } if msg.starts_with("row ") => {
            let round = msg[4..]
                .split([',', ':'])
                .next()
                .and_then(|s| s.parse::<usize>().ok())
                .map(|r| format!(" (round {})", r - 1))
                .unwrap_or_default();
            BenchError::Parse {
                path,
                msg: format!("{msg}{round}"),
            }
        }
        other => other,
    })
}

/// Write a scripted table in the format [`load_scripted_csv`] reads.
pub fn write_scripted_csv(path: &Path, table: &[Vec<f64>]) -> Result<()> {
    write_matrix(
        path,
        "arm",
        &["Bernoulli means per round; rounds are 0-based: data row i is round i - 1"],
        table,
    )
}

/// Load a linear action set: one action per row, header `a1..ad`.
pub fn load_actions_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_matrix(path, "a", None)
}

/// Load a Bernoulli model class: one model per row, header `arm1..armK`.
pub fn load_models_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    read_matrix(path, "arm", Some((0.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let table = vec![vec![0.1, 1.0 / 3.0], vec![0.0, 1.0], vec![std::f64::consts::FRAC_1_SQRT_2, 1e-17]];
        write_scripted_csv(&path, &table).unwrap();
        let back = load_scripted_csv(&path).unwrap();
        for (a, b) in table.iter().flatten().zip(back.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn out_of_range_value_names_row_and_arm() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut rows = vec![vec![0.5, 0.5]; 9];
        rows[6][1] = 1.2;
        write_matrix(&path, "arm", &[], &rows).unwrap();
        let msg = load_scripted_csv(&path).unwrap_err().to_string();
        assert!(msg.contains("row 7, arm2"), "{msg}");
        assert!(msg.contains("round 6"), "{msg}");
    }

    #[test]
    fn header_is_checked() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        std::fs::write(&path, "arm1,arm3\n0.5,0.5\n").unwrap();
        assert!(load_scripted_csv(&path).unwrap_err().to_string().contains("arm2"));
    }
}
