//! Report documents and their CSV / JSON encodings.

use serde::Serialize;
use serde_json::{json, Map, Value};
use weakval::Cplx;

use crate::scenario::Format;

/// Marker written where a divided quantity is evaluated at `g = 0`.
pub const UNDEFINED: &str = "UNDEFINED";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }
}

/// Result of running one scenario: scalar findings plus one table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub summary: Map<String, Value>,
    pub table: Table,
}

/// `{"re": .., "im": ..}`.
pub fn complex(c: Cplx) -> Value {
    json!({ "re": c.re, "im": c.im })
}

/// Encodes a report. CSV carries the table only; JSON carries everything.
pub fn emit(report: &Report, format: Format) -> Vec<u8> {
    match format {
        Format::Csv => emit_csv(&report.table).into_bytes(),
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).expect("reports always serialize");
            out.push(b'\n');
            out
        }
    }
}

pub fn emit_csv(table: &Table) -> String {
    let mut out = String::new();
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(format_cell).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn format_cell(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => format_number(*v),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

/// Seventeen significant digits in scientific notation; `-0` prints as `0`.
pub fn format_number(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["g", "raw_re"]);
        assert_eq!(emit_csv(&t), "g,raw_re\n");
    }

    #[test]
    fn one_row_is_two_lines() {
        let mut t = Table::new(["g", "flag"]);
        t.push(vec![0.5.into(), true.into()]);
        assert_eq!(emit_csv(&t), "g,flag\n5.0000000000000000e-1,true\n");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_number(-0.0), format_number(0.0));
    }
}
