use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// One declared tolerance and the measured value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// Passes when `value < upper`; non-finite values fail.
    pub fn below(name: impl Into<String>, value: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower: None,
            upper: Some(upper),
            pass: value.is_finite() && value < upper,
        }
    }

    /// Passes when `lower <= value <= upper`.
    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            value,
            lower: Some(lower),
            upper: Some(upper),
            pass: (lower..=upper).contains(&value),
        }
    }

    /// A boolean condition recorded as 1 (holds) or 0.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            lower: Some(1.0),
            upper: None,
            pass: ok,
        }
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), CliError> {
    let mut f = File::create(dir.join(name))?;
    serde_json::to_writer_pretty(&mut f, value).map_err(|e| CliError::Output(e.to_string()))?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Writes a CSV with the given header; every row must match its length.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(dir.join(name))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn num(v: f64) -> String {
    v.to_string()
}
