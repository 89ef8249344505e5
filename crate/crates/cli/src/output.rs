use std::fs;
use std::io::{self, Write};
use std::path::Path;

use renyi_reach::report::to_json_string;
use serde::Serialize;

fn emit(text: &str, output: Option<&Path>) -> Result<(), String> {
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| format!("cannot write report to {}: {e}", path.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write report to stdout: {e}")),
    }
}

pub fn write_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), String> {
    let mut text = to_json_string(value).map_err(|e| format!("cannot serialize report: {e}"))?;
    text.push('\n');
    emit(&text, output)
}

/// Writes rows of preformatted cells as CSV with the given header.
pub fn write_csv(
    header: &[String],
    rows: &[Vec<String>],
    output: Option<&Path>,
) -> Result<(), String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(header)
        .map_err(|e| format!("cannot write CSV header: {e}"))?;
    for row in rows {
        writer
            .write_record(row)
            .map_err(|e| format!("cannot write CSV row: {e}"))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| format!("cannot finish CSV report: {e}"))?;
    let text = String::from_utf8(bytes).map_err(|e| format!("CSV report is not UTF-8: {e}"))?;
    emit(&text, output)
}
