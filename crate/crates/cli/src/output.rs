//! Deterministic table serialization and atomic file output.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::OutputFormat;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits.
fn number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) if v.is_nan() => out.push_str("NaN"),
                    Cell::Num(v) => out.push_str(&number(*v)),
                    Cell::Int(v) => write!(out, "{v}").expect("string write"),
                    Cell::Bool(v) => write!(out, "{v}").expect("string write"),
                    Cell::Text(s) if s.contains([',', '"', '\n']) => {
                        write!(out, "\"{}\"", s.replace('"', "\"\"")).expect("string write")
                    }
                    Cell::Text(s) => out.push_str(s),
                }
            }
            out.push('\n');
        }
        out
    }

    /// `{"columns": [...], "rows": [[...], ...]}`; non-finite numbers become `null`.
    pub fn to_json(&self) -> String {
        let quote = |s: &str| serde_json::to_string(s).expect("string serializes");
        let mut out = String::from("{\"columns\":[");
        out.push_str(&self.columns.iter().map(|c| quote(c)).collect::<Vec<_>>().join(","));
        out.push_str("],\"rows\":[");
        for (r, row) in self.rows.iter().enumerate() {
            if r > 0 {
                out.push(',');
            }
            out.push_str("\n[");
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Num(v) if !v.is_finite() => out.push_str("null"),
                    Cell::Num(v) => out.push_str(&number(*v)),
                    Cell::Int(v) => write!(out, "{v}").expect("string write"),
                    Cell::Bool(v) => write!(out, "{v}").expect("string write"),
                    Cell::Text(s) => out.push_str(&quote(s)),
                }
            }
            out.push(']');
        }
        out.push_str("\n]}\n");
        out
    }
}

/// Writes `bytes` to a temporary file beside `path` and renames it into place,
/// so `path` never holds a partial result.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .map_err(|e| CliError::io(format!("creating temporary file in {}", dir.display()), e))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(format!("writing {}", path.display()), e))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(format!("renaming into {}", path.display()), e.error))?;
    Ok(())
}

/// `out.csv` -> `out.<tag>.csv` (extension taken from `format`).
pub fn companion_path(main: &Path, tag: &str, format: OutputFormat) -> PathBuf {
    let stem = main
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| String::from("tlsqle"));
    main.with_file_name(format!("{stem}.{tag}.{}", format.extension()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["x", "n", "ok", "label"]);
        t.push(vec![0.1.into(), 3usize.into(), true.into(), "a,b".into()]);
        t.push(vec![f64::NAN.into(), 0usize.into(), false.into(), "plain".into()]);
        t
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            sample().to_csv(),
            "x,n,ok,label\n1.0000000000000001e-1,3,true,\"a,b\"\nNaN,0,false,plain\n"
        );
    }

    #[test]
    fn json_is_valid_and_round_trips_numbers() {
        let text = sample().to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rows"][0][0].as_f64().unwrap(), 0.1);
        assert!(v["rows"][1][0].is_null());
        assert_eq!(v["columns"][3], "label");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [1.0 / 3.0, 2e-308, 1.7976931348623157e308, -123456.789] {
            assert_eq!(number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn companion_names() {
        assert_eq!(
            companion_path(Path::new("dir/run.csv"), "extrema", OutputFormat::Csv),
            PathBuf::from("dir/run.extrema.csv")
        );
    }
}
