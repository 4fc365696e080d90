//! Flat-file sweep reports.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{HarnessError, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format '{other}', expected json or csv")),
        }
    }
}

pub const CSV_HEADER: [&str; 11] = [
    "graph_id",
    "n",
    "m",
    "edge_bitmask",
    "oracle_colorable",
    "objective",
    "decision",
    "agree",
    "solver_status",
    "iterations",
    "wall_time",
];

/// Floats rounded to 12 significant digits; non-finite values become null
/// (an empty CSV field) and read back as NaN.
pub(crate) mod sig12 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn round(v: f64) -> f64 {
        format!("{v:.11e}").parse().expect("formatted float parses")
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(&round(*v))
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

pub fn write_rows<W: Write>(rows: &[SweepRow], format: ReportFormat, w: W) -> Result<(), String> {
    match format {
        ReportFormat::Json => {
            let mut w = w;
            serde_json::to_writer_pretty(&mut w, rows).map_err(|e| e.to_string())?;
            writeln!(w).map_err(|e| e.to_string())
        }
        ReportFormat::Csv => {
            let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
            out.write_record(CSV_HEADER).map_err(|e| e.to_string())?;
            for row in rows {
                out.serialize(row).map_err(|e| e.to_string())?;
            }
            out.flush().map_err(|e| e.to_string())
        }
    }
}

pub fn report_write(rows: &[SweepRow], format: ReportFormat, path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
    write_rows(rows, format, BufWriter::new(file))
        .map_err(|message| HarnessError::Format { path: path.display().to_string(), message })
}

pub fn read_rows(format: ReportFormat, path: &Path) -> Result<Vec<SweepRow>, HarnessError> {
    let fail = |message: String| HarnessError::Format { path: path.display().to_string(), message };
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
    match format {
        ReportFormat::Json => serde_json::from_str(&text).map_err(|e| fail(e.to_string())),
        ReportFormat::Csv => csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<Vec<SweepRow>, _>>()
            .map_err(|e| fail(e.to_string())),
    }
}
