//! CSV tables: `#` header comments, one column-name line, then rows with
//! numbers at 17 significant digits.

use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// One output file. `suffix` distinguishes the planes of a multi-file sweep.
#[derive(Clone, Debug)]
pub struct Table {
    pub suffix: Option<String>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra header lines specific to this plane.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { suffix: None, columns, rows: vec![], notes: vec![] }
    }
}

/// Residuals and knobs recorded in every header of a run.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub knobs: Vec<(String, String)>,
    pub residuals: Vec<(String, f64)>,
}

impl Report {
    pub fn knob(&mut self, name: &str, value: impl ToString) {
        self.knobs.push((name.to_string(), value.to_string()));
    }

    pub fn residual(&mut self, name: &str, value: f64) {
        self.residuals.push((name.to_string(), value));
    }
}

pub fn format_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn format_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_num(*v),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

/// Render a table with its header block.
pub fn render(preamble: &[(String, String)], report: &Report, table: &Table) -> String {
    let mut s = String::new();
    for (k, v) in preamble.iter().chain(&report.knobs).chain(&table.notes) {
        writeln!(s, "# {k}: {v}").unwrap();
    }
    for (k, v) in &report.residuals {
        writeln!(s, "# residual {k}: {}", format_num(*v)).unwrap();
    }
    writeln!(s, "{}", table.columns.join(",")).unwrap();
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(format_cell).collect();
        writeln!(s, "{}", cells.join(",")).unwrap();
    }
    s
}
