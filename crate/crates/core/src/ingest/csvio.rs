use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use csv::StringRecord;

use crate::error::{Error, Result};

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parses `text`, checks the header and returns `(line, record)` pairs.
pub(crate) fn records(text: &str, label: &str, header: &[&str]) -> Result<Vec<(u64, StringRecord)>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let got = rdr
        .headers()
        .map_err(|e| Error::Csv {
            path: label.to_string(),
            source: e,
        })?
        .clone();
    let got_line = rdr.position().line();
    for (i, col) in header.iter().enumerate() {
        if got.get(i) != Some(*col) {
            return Err(Error::Schema {
                path: label.to_string(),
                line: got_line.max(1),
                msg: format!("expected header {:?}, found {:?}", header.join(","), got.iter().collect::<Vec<_>>().join(",")),
            });
        }
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv {
            path: label.to_string(),
            source: e,
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != header.len() {
            return Err(Error::Schema {
                path: label.to_string(),
                line,
                msg: format!("expected {} fields, found {}", header.len(), rec.len()),
            });
        }
        out.push((line, rec));
    }
    Ok(out)
}

pub(crate) fn field<T: FromStr>(rec: &StringRecord, idx: usize, name: &str, label: &str, line: u64) -> Result<T> {
    let raw = rec.get(idx).unwrap_or("");
    raw.parse().map_err(|_| Error::Value {
        path: label.to_string(),
        line,
        msg: format!("cannot parse {name} from {raw:?}"),
    })
}

pub(crate) fn date_field(rec: &StringRecord, idx: usize, name: &str, label: &str, line: u64) -> Result<NaiveDate> {
    let raw = rec.get(idx).unwrap_or("");
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|_| Error::Value {
        path: label.to_string(),
        line,
        msg: format!("cannot parse {name} from {raw:?} (expected YYYY-MM-DD)"),
    })
}

pub(crate) fn finite(v: f64, name: &str, label: &str, line: u64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Value {
            path: label.to_string(),
            line,
            msg: format!("{name} must be finite"),
        })
    }
}

/// Quotes a CSV field when needed.
pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
