//! Reading and writing the `Time,Message` sample format.
//!
//! The header row must be exactly `Time,Message`; both columns are
//! floating point. Lines starting with `#` are comments. Rejections
//! carry the 1-based file line number (the header is line 1).

use crate::error::CsvError;
use crate::series::{DerivativeSeries, TimeSeries};
use std::io::{Read, Write};
use std::path::Path;

pub fn read_series_from_path(path: &Path) -> Result<TimeSeries, CsvError> {
    let file = std::fs::File::open(path)?;
    read_series(file)
}

pub fn read_series<R: Read>(reader: R) -> Result<TimeSeries, CsvError> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    {
        let headers = csv_reader.headers().map_err(|_| CsvError::BadHeader)?;
        if headers.len() != 2 || &headers[0] != "Time" || &headers[1] != "Message" {
            return Err(CsvError::BadHeader);
        }
    }

    let mut rows: Vec<(u64, f64, f64)> = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CsvError::BadRow {
                line,
                reason: "unreadable record".to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != 2 {
            return Err(CsvError::BadRow {
                line,
                reason: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let parse = |field: &str, name: &str| -> Result<f64, CsvError> {
            let value: f64 = field.trim().parse().map_err(|_| CsvError::BadRow {
                line,
                reason: format!("{name} `{field}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(CsvError::BadRow {
                    line,
                    reason: format!("{name} `{field}` is not finite"),
                });
            }
            Ok(value)
        };
        let time = parse(&record[0], "Time")?;
        let message = parse(&record[1], "Message")?;
        rows.push((line, time, message));
    }

    if rows.is_empty() {
        return Err(CsvError::Series(crate::error::SeriesError::Empty));
    }
    for i in 1..rows.len() {
        if rows[i].1 <= rows[i - 1].1 {
            return Err(CsvError::BadRow {
                line: rows[i].0,
                reason: format!(
                    "Time {} does not increase past the previous row's {}",
                    rows[i].1,
                    rows[i - 1].1
                ),
            });
        }
    }
    let times: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let values: Vec<f64> = rows.iter().map(|r| r.2).collect();
    Ok(TimeSeries::new(times, values)?)
}

/// Writes `Time,Message` rows, preceded by optional `# ` comment lines.
/// Floats use shortest round-trip formatting, so what is written reads
/// back bit-identically.
pub fn write_series<W: Write>(
    writer: &mut W,
    times: &[f64],
    values: &[f64],
    comments: &[String],
) -> std::io::Result<()> {
    for comment in comments {
        writeln!(writer, "# {comment}")?;
    }
    writeln!(writer, "Time,Message")?;
    for (t, v) in times.iter().zip(values) {
        writeln!(writer, "{t},{v}")?;
    }
    Ok(())
}

/// Writes a derivative as `Time,Rate` rows.
pub fn write_derivative<W: Write>(
    writer: &mut W,
    derivative: &DerivativeSeries,
) -> std::io::Result<()> {
    writeln!(writer, "Time,Rate")?;
    for (t, r) in derivative.times().iter().zip(derivative.rates()) {
        writeln!(writer, "{t},{r}")?;
    }
    Ok(())
}
