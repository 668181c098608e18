//! Report sinks: deterministic JSON for machines, aligned text for humans.

use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

pub struct Sink {
    pub format: Format,
    pub out: Option<std::path::PathBuf>,
}

impl Sink {
    /// Emits a report: the JSON form when requested, otherwise the
    /// prerendered table text.
    pub fn emit<T: serde::Serialize>(&self, value: &T, table: String) -> std::io::Result<()> {
        let body = match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(value)?;
                s.push('\n');
                s
            }
            Format::Table => table,
        };
        match &self.out {
            Some(path) => std::fs::write(path, body),
            None => std::io::stdout().write_all(body.as_bytes()),
        }
    }
}
