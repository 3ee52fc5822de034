use std::fmt::Write as _;
use std::path::Path;

use super::RawMatrix;
use crate::error::{Error, Result};

/// Parse comma-separated numbers. A first row containing any non-numeric
/// cell is treated as a header. With `labels`, the last column holds
/// non-negative integer labels.
pub fn parse_csv(text: &str, labels: bool) -> Result<RawMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut label_col = Vec::new();
    let mut width = None;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(idx + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.iter().all(|c| c.is_empty()) {
            continue;
        }
        let numeric: Vec<Option<f64>> = record.iter().map(|c| c.parse::<f64>().ok()).collect();
        if idx == 0 && numeric.iter().any(Option::is_none) {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} fields, found {}", record.len()),
                })
            }
            _ => {}
        }
        let n_values = if labels { record.len() - 1 } else { record.len() };
        if n_values == 0 {
            return Err(Error::Parse {
                line,
                message: "no feature columns".into(),
            });
        }
        let mut row = Vec::with_capacity(n_values);
        for (j, cell) in numeric[..n_values].iter().enumerate() {
            match cell {
                Some(v) if v.is_finite() => row.push(*v),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("column {}: '{}' is not a finite number", j + 1, &record[j]),
                    })
                }
            }
        }
        if labels {
            let cell = &record[n_values];
            let l = cell.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("label '{cell}' is not a non-negative integer"),
            })?;
            label_col.push(l);
        }
        rows.push(row);
    }
    RawMatrix::new(rows, labels.then_some(label_col))
}

/// Last column of every row as a label. A non-integer first row is a header.
pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(idx + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        let Some(cell) = record.iter().last().filter(|c| !c.is_empty()) else {
            continue;
        };
        match cell.parse::<usize>() {
            Ok(l) => out.push(l),
            Err(_) if idx == 0 => {}
            Err(_) => {
                return Err(Error::Parse {
                    line,
                    message: format!("label '{cell}' is not a non-negative integer"),
                })
            }
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidData("no labels found".into()));
    }
    Ok(out)
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    parse_labels(&std::fs::read_to_string(path)?)
}

pub fn read_csv(path: &Path, labels: bool) -> Result<RawMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_csv(&text, labels)
}

/// CSV text with a header line, LF line endings and shortest round-trip floats.
pub fn render_csv(raw: &RawMatrix) -> String {
    let mut out = String::new();
    let names: Vec<String> = if raw.cols() == 2 {
        vec!["x".into(), "y".into()]
    } else {
        (1..=raw.cols()).map(|j| format!("x{j}")).collect()
    };
    out.push_str(&names.join(","));
    if raw.labels().is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for (i, r) in raw.rows().iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:?}").unwrap();
        }
        if let Some(l) = raw.labels() {
            write!(out, ",{}", l[i]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(raw: &RawMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(raw))?;
    Ok(())
}
