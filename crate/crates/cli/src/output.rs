//! Tabular reports and their CSV, JSON and gnuplot renderings.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::Format;

/// Bumped whenever a command's columns change.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.10e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(serde_json::Value::Null, Into::into),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// How a report should be drawn, if at all.
#[derive(Debug, Clone, PartialEq)]
pub enum PlotSpec {
    /// One curve of `y` against `x` per distinct value of `group`.
    Lines { x: String, y: Vec<String>, group: Option<String>, logx: bool, logy: bool, title: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Summary records, written after the rows.
    pub footer: BTreeMap<String, String>,
    pub plot: Option<PlotSpec>,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    tool: &'static str,
    version: &'static str,
    schema: u32,
    command: &'a str,
    columns: &'a [String],
    rows: Vec<Vec<serde_json::Value>>,
    footer: &'a BTreeMap<String, String>,
}

impl Report {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Report {
            command: command.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            footer: BTreeMap::new(),
            plot: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.footer.insert(key.into(), value.to_string());
    }

    fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, format: Format) -> anyhow::Result<Vec<u8>> {
        match format {
            Format::Csv => self.render_csv(),
            Format::Json => {
                let doc = JsonReport {
                    tool: "ftlocal",
                    version: env!("CARGO_PKG_VERSION"),
                    schema: SCHEMA_VERSION,
                    command: &self.command,
                    columns: &self.columns,
                    rows: self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect(),
                    footer: &self.footer,
                };
                let mut out = serde_json::to_vec_pretty(&doc)?;
                out.push(b'\n');
                Ok(out)
            }
        }
    }

    fn render_csv(&self) -> anyhow::Result<Vec<u8>> {
        let mut out = Vec::new();
        writeln!(
            out,
            "# ftlocal {} schema {} command {}",
            env!("CARGO_PKG_VERSION"),
            SCHEMA_VERSION,
            self.command
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let mut out = w.into_inner().map_err(|e| anyhow::anyhow!("csv flush: {e}"))?;
        for (k, v) in &self.footer {
            writeln!(out, "# {k}: {v}")?;
        }
        Ok(out)
    }

    /// Whitespace-separated data; groups are separated by two blank lines so
    /// gnuplot can address them with `index`.
    fn gnuplot_data(&self, group: Option<usize>) -> String {
        let mut s = format!("# {}\n", self.columns.join(" "));
        let mut last: Option<String> = None;
        for row in &self.rows {
            if let Some(g) = group {
                let key = row[g].render();
                if last.as_ref().is_some_and(|l| *l != key) {
                    s.push_str("\n\n");
                }
                last = Some(key);
            }
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Empty => "NaN".to_string(),
                    Cell::Text(t) => format!("\"{}\"", t.replace('"', "'")),
                    other => other.render(),
                })
                .collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }

    /// Writes `<stem>.dat` and `<stem>.gp` next to `out`.
    pub fn write_plot(&self, out: &Path) -> anyhow::Result<Option<(PathBuf, PathBuf)>> {
        let Some(PlotSpec::Lines { x, y, group, logx, logy, title }) = &self.plot else {
            log::warn!("command {} has no plot; skipping", self.command);
            return Ok(None);
        };
        let col = |name: &str| {
            self.column(name).map(|i| i + 1).with_context(|| format!("plot column {name} missing"))
        };
        let group_idx = group.as_deref().and_then(|g| self.column(g));
        let data_path = out.with_extension("dat");
        let script_path = out.with_extension("gp");
        let data_name = data_path.file_name().unwrap().to_string_lossy().to_string();
        let groups = match group_idx {
            Some(g) => {
                let mut keys: Vec<String> = self.rows.iter().map(|r| r[g].render()).collect();
                keys.dedup();
                keys
            }
            None => vec![String::new()],
        };
        let xi = col(x)?;
        let mut plots = Vec::new();
        for (gi, key) in groups.iter().enumerate() {
            for name in y {
                let yi = col(name)?;
                let label = match group {
                    Some(g) => format!("{name} ({g}={key})"),
                    None => name.clone(),
                };
                plots.push(format!("'{data_name}' index {gi} using {xi}:{yi} with linespoints title '{label}'"));
            }
        }
        let mut script = String::new();
        script.push_str(&format!("# generated by ftlocal {}\n", env!("CARGO_PKG_VERSION")));
        script.push_str("set terminal pngcairo size 900,650\n");
        script.push_str(&format!(
            "set output '{}'\n",
            out.with_extension("png").file_name().unwrap().to_string_lossy()
        ));
        script.push_str(&format!("set title '{title}'\nset xlabel '{x}'\nset key outside\n"));
        if *logx {
            script.push_str("set logscale x\n");
        }
        if *logy {
            script.push_str("set logscale y\n");
        }
        script.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
        fs::write(&data_path, self.gnuplot_data(group_idx))?;
        fs::write(&script_path, script)?;
        Ok(Some((data_path, script_path)))
    }
}
