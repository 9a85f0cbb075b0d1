//! Tabular artifacts: CSV with a `#` schema line, plus a `key: value` sidecar.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // Shortest round-trip form, so identical values give identical bytes.
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    /// `(name, unit)`; unit `-` for dimensionless or labels.
    pub columns: Vec<(&'static str, &'static str)>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: &[(&'static str, &'static str)]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the schema");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# ");
        let schema: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n}[{u}]")).collect();
        out.push_str(&schema.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

pub struct Metadata<'a> {
    pub check: &'a str,
    pub status: &'a str,
    pub config_sha256: &'a str,
    pub version: &'a str,
    pub wall_time_s: f64,
    pub note: &'a str,
}

impl Metadata<'_> {
    pub fn render(&self) -> String {
        format!(
            "check: {}\nstatus: {}\nconfig_sha256: {}\nversion: {}\nwall_time_s: {:.6}\nnote: {}\n",
            self.check, self.status, self.config_sha256, self.version, self.wall_time_s, self.note
        )
    }
}

/// Writes `<dir>/<check>.csv` and `<dir>/<check>.meta`.
pub fn write(dir: &Path, table: &ResultTable, meta: &Metadata) -> io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{}.csv", meta.check));
    let side = dir.join(format!("{}.meta", meta.check));
    std::fs::write(&csv, table.to_csv())?;
    std::fs::write(&side, meta.render())?;
    Ok((csv, side))
}
