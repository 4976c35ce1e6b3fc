//! CSV log and JSON summary files.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::IoError;
use crate::sim::{LogRow, COLUMNS};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, msg: impl Into<String>) -> IoError {
    IoError::Format {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

/// Writes the header and rows with 17 significant digits.
pub fn write_log<W: Write>(out: W, rows: &[LogRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS).map_err(std::io::Error::other)?;
    let mut fields: Vec<String> = Vec::with_capacity(COLUMNS.len());
    for row in rows {
        fields.clear();
        fields.extend(row.to_array().iter().map(|v| format!("{v:.16e}")));
        w.write_record(&fields).map_err(std::io::Error::other)?;
    }
    w.flush()
}

pub fn write_log_file(path: &Path, rows: &[LogRow]) -> Result<(), IoError> {
    let file = File::create(path).map_err(io_err(path))?;
    write_log(BufWriter::new(file), rows).map_err(io_err(path))
}

/// Parses a log, requiring the exact column set in order.
pub fn read_log<R: Read>(input: R) -> Result<Vec<LogRow>, String> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers().map_err(|e| e.to_string())?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != COLUMNS {
        return Err(format!("unexpected header {names:?}; expected {COLUMNS:?}"));
    }
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let mut vals = [0.0; 24];
        for (slot, field) in vals.iter_mut().zip(record.iter()) {
            *slot = field
                .trim()
                .parse()
                .map_err(|_| format!("row {}: bad number '{field}'", line + 1))?;
        }
        rows.push(LogRow::from_array(&vals));
    }
    Ok(rows)
}

pub fn read_log_file(path: &Path) -> Result<Vec<LogRow>, IoError> {
    let file = File::open(path).map_err(io_err(path))?;
    read_log(file).map_err(|msg| format_err(path, msg))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| format_err(path, e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(io_err(path))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let rows: Vec<LogRow> = (0..5)
            .map(|k| {
                let a: [f64; 24] = std::array::from_fn(|i| (k * 24 + i) as f64 * std::f64::consts::PI / 7.0 - 1e-300);
                LogRow::from_array(&a)
            })
            .collect();
        let mut buf = Vec::new();
        write_log(&mut buf, &rows).unwrap();
        let back = read_log(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn header_is_schema() {
        let mut buf = Vec::new();
        write_log(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), COLUMNS.join(","));
    }

    #[test]
    fn rejects_wrong_header_and_bad_numbers() {
        assert!(read_log("t,x\n0,1\n".as_bytes()).is_err());
        let mut text = COLUMNS.join(",");
        text.push('\n');
        text.push_str(&["1.0"; 23].join(","));
        text.push_str(",oops\n");
        assert!(read_log(text.as_bytes()).unwrap_err().contains("bad number"));
    }
}
