//! Long-format `x,t,value` field files.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use ouwedge::{FieldData, GridSpec};

use crate::error::{CliError, CliResult};

pub const HEADER: &str = "x,t,value";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_field<W: Write>(field: &FieldData, mut out: W) -> std::io::Result<()> {
    let g = field.grid();
    writeln!(out, "{HEADER}")?;
    for i in 0..g.n {
        for j in 0..g.m {
            if let Some(v) = field.get(i, j) {
                writeln!(out, "{},{},{}", fmt17(g.x(i)), fmt17(g.t(j)), fmt17(v))?;
            }
        }
    }
    out.flush()
}

pub fn write_field_csv(field: &FieldData, path: &Path) -> CliResult<()> {
    let f = fs::File::create(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    write_field(field, std::io::BufWriter::new(f)).map_err(|e| CliError::io(path.display().to_string(), e))
}

/// Rows of `(x, t, value)` from a headed CSV.
pub fn read_rows<R: BufRead>(input: R) -> CliResult<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::new();
    let mut lines = input.lines().enumerate();
    match lines.next() {
        Some((_, Ok(h))) if h.trim_end_matches('\r') == HEADER => {}
        Some((_, Ok(h))) => {
            return Err(CliError::ParseError {
                line: 1,
                reason: format!("expected header '{HEADER}', found '{h}'"),
            })
        }
        Some((_, Err(e))) => return Err(CliError::ParseError { line: 1, reason: e.to_string() }),
        None => return Err(CliError::ParseError { line: 1, reason: "empty file".into() }),
    }
    for (k, line) in lines {
        let line_no = k + 1;
        let line = line.map_err(|e| CliError::ParseError { line: line_no, reason: e.to_string() })?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CliError::ParseError {
                line: line_no,
                reason: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let mut parsed = [0.0; 3];
        for (slot, text) in parsed.iter_mut().zip(&fields) {
            *slot = text.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                CliError::ParseError { line: line_no, reason: format!("'{text}' is not a finite number") }
            })?;
        }
        rows.push((parsed[0], parsed[1], parsed[2]));
    }
    Ok(rows)
}

/// Origin, spacing and count of a coordinate set that should sit on a
/// uniform lattice, possibly with gaps.
fn lattice_axis(values: &[f64], axis: &'static str) -> CliResult<(f64, f64, usize)> {
    let mut u: Vec<f64> = values.to_vec();
    u.sort_by(f64::total_cmp);
    u.dedup();
    let x0 = u[0];
    if u.len() == 1 {
        return Ok((x0, 1.0, 1));
    }
    let step = u.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let last = *u.last().unwrap();
    let count = ((last - x0) / step).round() as usize + 1;
    let step = (last - x0) / (count - 1) as f64;
    for &v in &u {
        let k = ((v - x0) / step).round();
        if (v - (x0 + k * step)).abs() > 1e-9 * (v - x0).abs().max(step) {
            return Err(CliError::NonUniformGrid { axis, value: v });
        }
    }
    Ok((x0, step, count))
}

/// Rebuild a gridded field from its valid points. Lattice points with no
/// row are masked out.
pub fn field_from_rows(rows: &[(f64, f64, f64)]) -> CliResult<FieldData> {
    if rows.is_empty() {
        return Err(CliError::ParseError { line: 2, reason: "no data rows".into() });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ts: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (x0, mut dx, n) = lattice_axis(&xs, "x")?;
    let (t0, mut dt, m) = lattice_axis(&ts, "t")?;
    // a single row or column carries no spacing of its own
    if n == 1 && m > 1 {
        dx = dt;
    }
    if m == 1 && n > 1 {
        dt = dx;
    }
    let grid = GridSpec { x0, t0, dx, dt, n, m };
    let mut values = vec![0.0; n * m];
    let mut mask = vec![false; n * m];
    for (k, &(x, t, v)) in rows.iter().enumerate() {
        let i = ((x - x0) / dx).round() as usize;
        let j = ((t - t0) / dt).round() as usize;
        let idx = i * m + j;
        if mask[idx] {
            return Err(CliError::ParseError { line: k + 2, reason: format!("duplicate point ({x}, {t})") });
        }
        mask[idx] = true;
        values[idx] = v;
    }
    Ok(FieldData::new(grid, values, mask)?)
}

pub fn read_field<R: BufRead>(input: R) -> CliResult<FieldData> {
    field_from_rows(&read_rows(input)?)
}

pub fn read_field_csv(path: &Path) -> CliResult<FieldData> {
    let f = fs::File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    read_field(BufReader::new(f))
}

pub fn read_rows_csv(path: &Path) -> CliResult<Vec<(f64, f64, f64)>> {
    let f = fs::File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    read_rows(BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_header() {
        let err = read_rows("a,b,c\n1,2,3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CliError::ParseError { line: 1, .. }));
    }

    #[test]
    fn reports_line_of_bad_number() {
        let err = read_rows("x,t,value\n0,0,1\n0,0.1,abc\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CliError::ParseError { line: 3, .. }));
    }

    #[test]
    fn non_uniform_spacing() {
        let text = "x,t,value\n0,0,1\n0.1,0,1\n0.25,0,1\n";
        assert!(matches!(read_field(text.as_bytes()), Err(CliError::NonUniformGrid { axis: "x", .. })));
    }

    #[test]
    fn gaps_become_masked_points() {
        let text = "x,t,value\n0,0,1\n0,0.2,2\n0.1,0.1,3\n";
        let f = read_field(text.as_bytes()).unwrap();
        assert_eq!((f.grid().n, f.grid().m), (2, 3));
        assert_eq!(f.get(0, 1), None);
        assert_eq!(f.get(1, 1), Some(3.0));
        assert_eq!(f.valid_count(), 3);
    }

    #[test]
    fn duplicate_point_is_a_parse_error() {
        let text = "x,t,value\n0,0,1\n0,0.1,2\n0,0,3\n";
        assert!(matches!(read_field(text.as_bytes()), Err(CliError::ParseError { line: 4, .. })));
    }
}
