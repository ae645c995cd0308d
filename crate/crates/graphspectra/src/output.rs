//! CSV tables and JSON metadata.
//!
//! Floats are written with 17 significant digits so every value reads back
//! bit for bit. Files use `\n` line endings and no locale-dependent formatting.

use std::fs;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{AppError, Result};

/// Shortest `%.17g`-style rendering: fixed notation for exponents in
/// `[-5, 17)`, scientific otherwise, trailing zeros dropped.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if (-5..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, v);
        trim_zeros(&fixed).to_owned()
    } else {
        format!(
            "{}e{}{:02}",
            trim_zeros(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        )
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes a header and rows of floats.
pub fn write_table<H, R>(path: &Path, header: &[H], rows: R) -> Result<()>
where
    H: AsRef<str>,
    R: IntoIterator<Item = Vec<f64>>,
{
    let csv_error = |source| AppError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_error)?;
    w.write_record(header.iter().map(AsRef::as_ref))
        .map_err(csv_error)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt_float(v)))
            .map_err(csv_error)?;
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

/// Reads a table written by [`write_table`].
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let csv_error = |source| AppError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    let header = r
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let row = record
            .iter()
            .map(|f| {
                f.parse().map_err(|_| AppError::Parse {
                    line: k + 2,
                    message: format!("bad value {f:?}"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::Config(format!("cannot serialize metadata: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| AppError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Versions {
    pub graphspectra: &'static str,
    pub graphspectra_core: &'static str,
}

/// Enough to tell whether two output directories came from the same run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    /// SHA-256 of the canonical JSON form of the configuration.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub versions: Versions,
}

impl Provenance {
    pub fn new<C: Serialize>(config: &C, seed: Option<u64>) -> Self {
        let canonical = serde_json::to_vec(config).expect("configs serialize");
        Self {
            config_hash: hex::encode(Sha256::digest(&canonical)),
            seed,
            versions: Versions {
                graphspectra: env!("CARGO_PKG_VERSION"),
                graphspectra_core: graphspectra_core::VERSION,
            },
        }
    }
}
