//! CSV and JSON report writers.
//!
//! Every report starts with the same header: schema version, command, the
//! operator config and the run parameters. CSV carries it as `#` comment
//! lines before the column row; JSON as top-level fields next to `data`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::OperatorConfig;
use crate::spectral::{ClassificationReport, EigLadder};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportHeader {
    pub schema_version: u32,
    pub command: String,
    pub config: Option<OperatorConfig>,
    pub parameters: BTreeMap<String, Value>,
}

impl ReportHeader {
    pub fn new(command: impl Into<String>, config: Option<OperatorConfig>) -> Self {
        Self { schema_version: SCHEMA_VERSION, command: command.into(), config, parameters: BTreeMap::new() }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("parameters serialise");
        self.parameters.insert(key.to_string(), value);
        self
    }
}

/// Rows of a table with fixed columns.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the columns");
        self.rows.push(row);
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Configuration(format!("cannot write report: {e}"))
}

/// Shortest representation that reads back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_csv<W: Write>(mut w: W, header: &ReportHeader, table: &Table) -> Result<()> {
    writeln!(w, "# schema_version: {}", header.schema_version).map_err(io_err)?;
    writeln!(w, "# command: {}", header.command).map_err(io_err)?;
    if let Some(cfg) = &header.config {
        for line in cfg.to_toml_string().lines() {
            writeln!(w, "# config: {line}").map_err(io_err)?;
        }
    }
    for (k, v) in &header.parameters {
        writeln!(w, "# param: {k} = {v}").map_err(io_err)?;
    }
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&table.columns).map_err(io_err)?;
    for row in &table.rows {
        out.write_record(row).map_err(io_err)?;
    }
    out.flush().map_err(io_err)
}

pub fn write_json<W: Write, T: Serialize>(mut w: W, header: &ReportHeader, data: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Document<'a, T> {
        #[serde(flatten)]
        header: &'a ReportHeader,
        data: &'a T,
    }
    serde_json::to_writer_pretty(&mut w, &Document { header, data }).map_err(io_err)?;
    writeln!(w).map_err(io_err)
}

/// `lambda, label, cap, count_n<n>..., density_n<n>...`.
pub fn classification_table(report: &ClassificationReport) -> Table {
    let mut columns = vec!["lambda".to_string(), "label".to_string(), "cap".to_string()];
    columns.extend(report.schedule.iter().map(|n| format!("count_n{n}")));
    columns.extend(report.schedule.iter().map(|n| format!("density_n{n}")));
    let mut table = Table::new(columns);
    for p in &report.points {
        let mut row = vec![fmt_f64(p.lambda), p.label.to_string(), p.cap.to_string()];
        row.extend(p.counts.iter().map(|c| c.to_string()));
        row.extend(p.densities.iter().map(|&d| fmt_f64(d)));
        table.push(row);
    }
    table
}

/// Long format: `n, dim, index, eigenvalue`.
pub fn ladder_table(ladder: &EigLadder) -> Table {
    let mut table = Table::new(["n", "dim", "index", "eigenvalue"]);
    for step in ladder.steps() {
        for (i, &x) in step.eigs.values().iter().enumerate() {
            table.push(vec![step.n.to_string(), step.dim.to_string(), i.to_string(), fmt_f64(x)]);
        }
    }
    table
}
