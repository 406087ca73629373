use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::{CliError, RunConfig};

/// A table cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Num(x) => format!("{x:e}"),
                    Cell::Text(t) => t.clone(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub started: String,
    pub finished: String,
    pub notices: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    #[serde(skip)]
    pub tables: Vec<Table>,
    pub summary: Value,
    /// Extra files written next to the tables, as `(file name, contents)`.
    #[serde(skip)]
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes `summary.json`, and `<table>.csv` and `<table>.dat` for each table.
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let json = serde_json::to_string_pretty(self).expect("report serializes");
        fs::write(dir.join("summary.json"), json + "\n").map_err(io)?;
        for t in &self.tables {
            fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv()).map_err(io)?;
            let dat = emit_plot_data(self, &t.name)?;
            fs::write(dir.join(format!("{}.dat", t.name)), dat).map_err(io)?;
        }
        for (name, contents) in &self.artifacts {
            fs::write(dir.join(name), contents).map_err(io)?;
        }
        Ok(())
    }
}

/// Column projection used for plot output.
enum Axis {
    Raw(&'static str),
    Log(&'static str),
}

fn projection(table: &str) -> Option<Vec<Axis>> {
    use Axis::*;
    Some(match table {
        "picard" => vec![Log("N"), Log("phi2_norm"), Log("psi3_norm")],
        "omega" => vec![Log("M"), Log("measure"), Log("bound")],
        "gaps" => vec![Log("N"), Log("gap")],
        "ratios" => vec![Raw("s"), Log("N"), Log("ratio")],
        "slopes" => vec![Raw("s"), Raw("slope")],
        "conservation" => vec![Raw("time"), Raw("drift_e3"), Raw("drift_e4")],
        "convergents" => vec![Log("q"), Log("error")],
        "witnesses" => vec![Log("n"), Raw("scaled_distance")],
        "roots" => vec![Raw("alpha"), Raw("c1"), Raw("c2")],
        _ => return None,
    })
}

/// Whitespace-separated numeric columns with a one-line `#` header.
///
/// Rows whose projected values are not finite (for example the logarithm of
/// a zero norm) are left out.
pub fn emit_plot_data(report: &Report, table_name: &str) -> Result<String, CliError> {
    let table = report.table(table_name).ok_or_else(|| CliError::UnknownTable(table_name.to_string()))?;
    let axes = projection(table_name).unwrap_or_default();
    let mut resolved = Vec::new();
    for axis in &axes {
        let (name, log) = match axis {
            Axis::Raw(n) => (*n, false),
            Axis::Log(n) => (*n, true),
        };
        if let Some(i) = table.column(name) {
            resolved.push((name, log, i));
        }
    }
    let mut out = String::from("#");
    for (name, log, _) in &resolved {
        if *log {
            let _ = write!(out, " log({name})");
        } else {
            let _ = write!(out, " {name}");
        }
    }
    out.push('\n');
    for row in &table.rows {
        let values: Option<Vec<f64>> = resolved
            .iter()
            .map(|(_, log, i)| row[*i].as_f64().map(|v| if *log { v.ln() } else { v }))
            .collect();
        if let Some(values) = values.filter(|v| v.iter().all(|x| x.is_finite())) {
            let cells: Vec<String> = values.iter().map(|v| format!("{v:.12e}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    }
    Ok(out)
}
