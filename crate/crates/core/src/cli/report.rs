use std::collections::BTreeMap;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use super::RunConfig;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Rows for the csv and text renderings.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// `{config, results[], errata[], residuals{}}`.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub results: Vec<Value>,
    pub errata: Vec<Value>,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn new(cfg: &RunConfig) -> Self {
        Report {
            config: cfg.clone(),
            results: Vec::new(),
            errata: Vec::new(),
            residuals: BTreeMap::new(),
            table: Table::default(),
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Text => self.to_text(),
        }
    }

    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        // Going through `Value` sorts every object's keys.
        let v = serde_json::to_value(self).expect("report serializes");
        canonical_json(&v)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.header).expect("in-memory write");
        for r in &self.table.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = format!(
            "{} N={} j={} z={} grading={} backend={}\n",
            serde_json::to_value(c.command).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
            c.sites,
            c.spin,
            c.z,
            serde_json::to_value(c.grading).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
            serde_json::to_value(c.backend).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
        );
        let ncol = self.table.header.len();
        let mut width = vec![0usize; ncol];
        for r in std::iter::once(&self.table.header).chain(&self.table.rows) {
            for (w, cell) in width.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        for r in std::iter::once(&self.table.header).chain(&self.table.rows) {
            let cells: Vec<String> = r.iter().zip(&width).map(|(cell, w)| format!("{cell:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        if !self.residuals.is_empty() {
            out.push('\n');
            for (k, v) in &self.residuals {
                let shown = if *v != 0.0 && v.abs() < 1e-4 { format!("{v:e}") } else { format!("{v}") };
                out.push_str(&format!("{k}: {shown}\n"));
            }
        }
        out
    }
}

/// The one JSON layout every command emits; parsing and re-emitting it is
/// the identity on bytes.
pub fn canonical_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}
