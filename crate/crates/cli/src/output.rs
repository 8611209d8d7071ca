//! Rendering of command results as JSON or CSV.

use serde_json::Value;

use crate::args::Format;

/// A command result: a JSON document, a flat table for CSV, and whether the
/// command succeeded (verification commands may fail without erroring).
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub ok: bool,
}

impl Report {
    pub fn new(json: Value, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        Report { json, header, rows, ok: true }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The table as CSV with a header line.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Pretty JSON with sorted keys, or CSV.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.json).expect("values serialize");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(&report.header, &report.rows),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotes_fields_with_commas() {
        let csv = to_csv(&["class", "d"], &[vec!["(6;3,2^7)".into(), "6".into()]]);
        assert_eq!(csv, "class,d\n\"(6;3,2^7)\",6\n");
    }
}
