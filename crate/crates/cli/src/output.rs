//! Emission of command results as JSON or CSV.

use std::io::Write;

use anyhow::{bail, Context, Result};
use qmask_core::repro::{ReproReport, Table};
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    ClaimFailed,
}

pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
    pub status: Status,
    pub default_format: Format,
}

impl Output {
    pub fn json(value: impl Serialize) -> Result<Self> {
        Ok(Output {
            json: serde_json::to_value(value)?,
            csv: None,
            status: Status::Pass,
            default_format: Format::Json,
        })
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn csv_by_default(mut self) -> Self {
        self.default_format = Format::Csv;
        self
    }

    pub fn failed_if(mut self, failed: bool) -> Self {
        if failed {
            self.status = Status::ClaimFailed;
        }
        self
    }

    pub fn report(report: &ReproReport) -> Result<Self> {
        Ok(Output::json(report)?.with_csv(report_csv(report)?).failed_if(!report.pass))
    }
}

/// The shortest decimal that parses back to the same double, as in the JSON
/// output.
pub fn num(x: f64) -> String {
    serde_json::to_string(&x).expect("floats serialize")
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    Ok(String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)
}

pub fn table_csv(table: &Table) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| num(x)))?;
    }
    finish(w)
}

/// One record per claim, followed by a blank line and the report's table
/// when it has one.
pub fn report_csv(report: &ReproReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["report", "description", "relation", "expected", "observed", "tolerance", "pass"])?;
    for c in &report.claims {
        let relation = serde_json::to_value(c.relation)?;
        w.write_record([
            report.name.as_str(),
            c.description.as_str(),
            relation.as_str().unwrap_or_default(),
            &num(c.expected),
            &num(c.observed),
            &num(c.tolerance),
            if c.pass { "true" } else { "false" },
        ])?;
    }
    let mut text = finish(w)?;
    if let Some(table) = &report.table {
        text.push('\n');
        text.push_str(&table_csv(table)?);
    }
    Ok(text)
}

/// A single-record CSV of a flat JSON object.
pub fn object_csv(value: &Value) -> Result<String> {
    let Some(map) = value.as_object() else { bail!("value is not an object") };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(map.keys())?;
    w.write_record(map.values().map(|v| match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }))?;
    finish(w)
}

pub fn emit(output: &Output, config: &RunConfig) -> Result<()> {
    let format = config.format.unwrap_or(output.default_format);
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&output.json)?;
            s.push('\n');
            s
        }
        Format::Csv => match &output.csv {
            Some(csv) => csv.clone(),
            None => bail!("this command has no CSV form; use --format json"),
        },
    };
    match &config.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
