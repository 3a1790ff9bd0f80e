//! Rendering of command results as JSON, CSV or plot data.

use std::fmt::Write as _;

use crate::config::Format;

/// A command result in all three renderings.
#[derive(Debug, Clone)]
pub struct Output {
    pub json: serde_json::Value,
    /// CSV header and rows.
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// `(index, value)` pairs for plotting.
    pub series: Vec<(f64, f64)>,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values always serialise");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for r in &self.rows {
                    s.push_str(&r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
                    s.push('\n');
                }
                s
            }
            Format::PlotData => {
                let mut s = String::new();
                for (i, v) in &self.series {
                    writeln!(s, "{i},{v}").unwrap();
                }
                s
            }
        }
    }
}

fn csv_field(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}
