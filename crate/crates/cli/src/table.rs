use std::io::Write;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    /// Seventeen significant digits, enough to round-trip any `f64`.
    fn real_text(x: f64) -> Option<String> {
        x.is_finite().then(|| format!("{x:.16e}"))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => Cell::real_text(*x).unwrap_or_else(|| x.to_string()),
            Cell::Text(s) => csv_quote(s),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Real(x) => match Cell::real_text(*x) {
                Some(t) => Value::Number(
                    t.parse::<Number>()
                        .expect("formatted float is a JSON number"),
                ),
                None => Value::Null,
            },
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Null => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Echo of the resolved configuration and library version.
    pub provenance: Map<String, Value>,
}

impl ReportTable {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            provenance: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row width must match the header"
        );
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(|c| csv_quote(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        obj.insert("columns".into(), Value::from(self.columns.clone()));
        obj.insert(
            "rows".into(),
            Value::Array(
                self.rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                    .collect(),
            ),
        );
        obj.insert("provenance".into(), Value::Object(self.provenance.clone()));
        let mut text =
            serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

/// Writes the table to `path`, or to stdout when `path` is `None`.
pub fn emit(table: &ReportTable, path: Option<&Path>, format: Format) -> Result<(), CliError> {
    let text = table.render(format);
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = ReportTable::new(&["k", "value"]);
        assert_eq!(t.to_csv(), "k,value\n");
    }

    #[test]
    fn one_by_one_is_two_lines() {
        let mut t = ReportTable::new(&["value"]);
        t.push(vec![Cell::Real(0.1)]);
        assert_eq!(t.to_csv(), "value\n1.0000000000000001e-1\n");
    }

    #[test]
    fn cells_render() {
        let mut t = ReportTable::new(&["a", "b", "c", "d", "e"]);
        t.push(vec![
            Cell::Int(3),
            Cell::Null,
            Cell::Bool(false),
            Cell::from("x,y"),
            Cell::Real(f64::NAN),
        ]);
        assert_eq!(t.to_csv().lines().nth(1).unwrap(), "3,,false,\"x,y\",NaN");
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(v["rows"][0][1], Value::Null);
        assert_eq!(v["rows"][0][4], Value::Null);
    }

    #[test]
    fn json_preserves_reals_exactly() {
        let values = [
            0.016_886_832_666_488_144,
            1.0 / 3.0,
            5.436_890_089_326_424e-19,
            -2.5e300,
            1e-320,
        ];
        let mut t = ReportTable::new(&["x"]);
        for &x in &values {
            t.push(vec![Cell::Real(x)]);
        }
        let v: Value = serde_json::from_str(&t.to_json()).unwrap();
        for (i, &x) in values.iter().enumerate() {
            assert_eq!(v["rows"][i][0].as_f64().unwrap().to_bits(), x.to_bits());
        }
        let csv = t.to_csv();
        for (line, &x) in csv.lines().skip(1).zip(&values) {
            assert_eq!(line.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
