//! Output helpers: every CSV carries a `# config-hash=<hex>` comment line
//! and a header row; floats print with 17 significant digits so runs are
//! reproducible byte for byte.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::CliResult;

pub struct OutDir {
    dir: PathBuf,
    hash: String,
}

impl OutDir {
    pub fn new(dir: &Path, hash: String) -> CliResult<OutDir> {
        std::fs::create_dir_all(dir)?;
        Ok(OutDir { dir: dir.to_path_buf(), hash })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn csv(&self, name: &str, header: &[&str]) -> CliResult<CsvFile> {
        let mut w = BufWriter::new(File::create(self.path(name))?);
        writeln!(w, "# config-hash={}", self.hash)?;
        writeln!(w, "{}", header.join(","))?;
        Ok(CsvFile { w })
    }

    pub fn json(&self, name: &str, value: &serde_json::Value) -> CliResult<()> {
        let mut w = BufWriter::new(File::create(self.path(name))?);
        writeln!(w, "{}", serde_json::to_string_pretty(value)?)?;
        Ok(())
    }
}

impl From<serde_json::Error> for crate::error::CliError {
    fn from(e: serde_json::Error) -> Self {
        crate::error::CliError::Usage(format!("json error: {e}"))
    }
}

pub struct CsvFile {
    w: BufWriter<File>,
}

impl CsvFile {
    pub fn row(&mut self, values: &[f64]) -> CliResult<()> {
        let cells: Vec<String> = values.iter().map(|v| fmt(*v)).collect();
        writeln!(self.w, "{}", cells.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.w.flush()?;
        Ok(())
    }
}

/// 17 significant digits, enough to reproduce any f64 exactly.
pub fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}
