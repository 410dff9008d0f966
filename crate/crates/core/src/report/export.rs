use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{format_f64, VerificationReport};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 7] = [
    "check_id",
    "anchor",
    "expected",
    "measured",
    "tolerance",
    "pass",
    "runtime_ms",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Parameter(format!(
                "format must be json or csv, got {other:?}"
            ))),
        }
    }
}

pub fn to_json_string(report: &VerificationReport) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv_string(report: &VerificationReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    write_csv(report, &mut w)?;
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn write_csv<W: Write>(report: &VerificationReport, w: &mut csv::Writer<W>) -> Result<()> {
    w.write_record(CSV_HEADER)?;
    for c in &report.checks {
        w.write_record([
            c.check_id.as_str(),
            c.anchor.as_str(),
            &c.expected.render(),
            &c.measured.render(),
            &format_f64(c.tolerance),
            if c.pass { "true" } else { "false" },
            &format!("{:.3}", c.runtime_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_report(
    report: &VerificationReport,
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match format {
        ReportFormat::Json => {
            let mut file = file;
            file.write_all(to_json_string(report)?.as_bytes())?;
            file.flush()?;
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(file);
            write_csv(report, &mut w)?;
        }
    }
    Ok(())
}

pub fn read_json_report(path: impl AsRef<Path>) -> Result<VerificationReport> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}
