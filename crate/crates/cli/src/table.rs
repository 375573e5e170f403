//! Tabular output shared by every subcommand.
//!
//! Floats are written in scientific notation with 17 significant digits, which
//! is enough to recover every `f64` exactly. JSON files carry the same header
//! and the same number tokens as the CSV files.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 17 significant digits in scientific notation.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv_token(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json_token(&self) -> Result<String> {
        Ok(match self {
            Cell::Num(v) if !v.is_finite() => bail!("non-finite value {v} cannot be written as JSON"),
            Cell::Text(s) => serde_json::to_string(s)?,
            Cell::Null => "null".into(),
            other => other.csv_token(),
        })
    }

    fn from_csv_token(s: &str) -> Result<Cell> {
        if s.is_empty() {
            return Ok(Cell::Null);
        }
        match s {
            "true" => return Ok(Cell::Bool(true)),
            "false" => return Ok(Cell::Bool(false)),
            "NaN" => return Ok(Cell::Num(f64::NAN)),
            "inf" => return Ok(Cell::Num(f64::INFINITY)),
            "-inf" => return Ok(Cell::Num(f64::NEG_INFINITY)),
            _ => {}
        }
        let numeric = s.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b))
            && s.bytes().any(|b| b.is_ascii_digit());
        if numeric {
            if s.bytes().all(|b| b.is_ascii_digit() || b == b'-') {
                return Ok(Cell::Int(s.parse()?));
            }
            return Ok(Cell::Num(s.parse()?));
        }
        Ok(Cell::Text(s.to_string()))
    }

    fn from_json(v: &Value) -> Result<Cell> {
        Ok(match v {
            Value::Null => Cell::Null,
            Value::Bool(b) => Cell::Bool(*b),
            Value::String(s) => Cell::Text(s.clone()),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Cell::Int(i),
                None => Cell::Num(n.as_f64().context("number out of range")?),
            },
            other => bail!("unexpected JSON cell {other}"),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_token))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    /// `{"columns": [...], "rows": [[...], ...]}` with one row per line.
    pub fn to_json(&self) -> Result<String> {
        let mut out = String::from("{\"columns\":");
        out.push_str(&serde_json::to_string(&self.columns)?);
        out.push_str(",\"rows\":[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n[" } else { ",\n[" });
            for (j, cell) in row.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&cell.json_token()?);
            }
            out.push(']');
        }
        if !self.rows.is_empty() {
            out.push('\n');
        }
        out.push_str("]}\n");
        Ok(out)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn from_csv(text: &str) -> Result<Table> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Cell::from_csv_token).collect::<Result<_>>()?);
        }
        Ok(Table { columns, rows })
    }

    pub fn from_json(text: &str) -> Result<Table> {
        let v: Value = serde_json::from_str(text)?;
        let columns = v["columns"]
            .as_array()
            .context("missing columns")?
            .iter()
            .map(|c| c.as_str().map(str::to_string).context("column names must be strings"))
            .collect::<Result<_>>()?;
        let rows = v["rows"]
            .as_array()
            .context("missing rows")?
            .iter()
            .map(|r| r.as_array().context("row must be an array")?.iter().map(Cell::from_json).collect())
            .collect::<Result<_>>()?;
        Ok(Table { columns, rows })
    }

    pub fn parse(text: &str, format: Format) -> Result<Table> {
        match format {
            Format::Csv => Table::from_csv(text),
            Format::Json => Table::from_json(text),
        }
    }

    /// Writes `<dir>/<stem>.<ext>` and returns the file name.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<String> {
        let name = format!("{stem}.{}", format.extension());
        let path = dir.join(&name);
        fs::write(&path, self.render(format)?).with_context(|| format!("writing {}", path.display()))?;
        Ok(name)
    }
}
