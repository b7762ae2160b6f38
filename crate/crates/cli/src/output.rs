//! Artifact writer for one run directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::Emit;
use crate::svg::Plot;

/// A CSV table held in memory until the run finishes.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))
    }
}

/// Shortest round-trip representation, so reruns compare byte for byte.
pub fn num(x: f64) -> String {
    format!("{x}")
}

/// Writes artifacts into the output directory, honoring the emit flags.
/// Artifacts are written in the order they are added, on the calling thread.
pub struct Sink {
    dir: PathBuf,
    emit: Emit,
    written: Vec<String>,
}

impl Sink {
    pub fn new(dir: &Path, emit: &Emit) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Sink {
            dir: dir.to_path_buf(),
            emit: emit.clone(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn write_raw(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        if self.emit.json {
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            self.write_raw(name, text.as_bytes())?;
        }
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> Result<()> {
        if self.emit.csv {
            self.write_raw(name, &table.to_bytes()?)?;
        }
        Ok(())
    }

    /// `stem.svg` together with `stem.csv` holding the plotted data. The CSV
    /// is written whenever the SVG is, even with CSV output switched off.
    pub fn plot(&mut self, stem: &str, plot: &Plot, data: &Table) -> Result<()> {
        if self.emit.csv || self.emit.svg {
            self.write_raw(&format!("{stem}.csv"), &data.to_bytes()?)?;
        }
        if self.emit.svg {
            self.write_raw(&format!("{stem}.svg"), plot.render().as_bytes())?;
        }
        Ok(())
    }
}
