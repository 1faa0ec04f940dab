//! CSV and JSON writers for result rows.

use std::io::Write;

use super::config::OutputFormat;
use super::run::Row;

pub fn write_rows<W: Write>(rows: &[Row], format: OutputFormat, mut out: W) -> std::io::Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows)?;
            writeln!(out)
        }
    }
}
