use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::Value;

use crate::args::Format;

/// A command result in both output shapes.
pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Tsv => {
                let mut s = self.header.join("\t");
                s.push('\n');
                for row in &self.rows {
                    s.push_str(&row.join("\t"));
                    s.push('\n');
                }
                s
            }
        }
    }
}

pub fn write(text: &str, path: Option<&Path>) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

pub fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}
