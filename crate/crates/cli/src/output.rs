//! CSV and JSON writers. Numbers are printed in Rust's shortest round-trip
//! form, so identical inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Format;
use crate::error::{CliError, CliResult};

pub enum Cell<'a> {
    Num(f64),
    Int(u64),
    Text(&'a str),
}

impl Cell<'_> {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.to_string(),
        }
    }
}

pub struct Sink {
    dir: PathBuf,
    format: Format,
    pub written: Vec<PathBuf>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Output { context: format!("writing {}", path.display()), message: e.to_string() }
}

impl Sink {
    pub fn new(dir: &Path, format: Format) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), format, written: Vec::new() })
    }

    /// Writes `name.csv` when CSV output is enabled. Every header names its
    /// unit as a suffix (`_us`, `_mhz`, ...); bare names are dimensionless.
    pub fn csv<'a>(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<Cell<'a>>>) -> CliResult<()> {
        if !self.format.csv() {
            return Ok(());
        }
        let path = self.dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(&path, e))?;
        w.write_record(header).map_err(|e| io_err(&path, e))?;
        for row in rows {
            debug_assert_eq!(row.len(), header.len());
            w.write_record(row.iter().map(Cell::render)).map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<S: Serialize>(&mut self, name: &str, value: &S) -> CliResult<()> {
        if !self.format.json() {
            return Ok(());
        }
        let path = self.dir.join(format!("{name}.json"));
        let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(&path, e))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        self.written.push(path);
        Ok(())
    }
}
