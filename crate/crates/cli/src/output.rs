//! Output files are staged in a hidden directory next to their destination
//! and renamed into place only after the whole command has succeeded.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use gmspec::export::{write_json, Format, Table};
use serde_json::Value;
use tempfile::TempDir;

use crate::error::CliError;

pub struct Staging {
    dir: TempDir,
    out: PathBuf,
    format: Format,
    files: Vec<String>,
}

impl Staging {
    pub fn new(out: &Path, format: Format) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::output(out, e))?;
        let dir = tempfile::Builder::new()
            .prefix(".gmspec-")
            .tempdir_in(out)
            .map_err(|e| CliError::output(out, e))?;
        Ok(Staging {
            dir,
            out: out.to_path_buf(),
            format,
            files: Vec::new(),
        })
    }

    fn create(&mut self, name: String) -> Result<BufWriter<File>, CliError> {
        let path = self.dir.path().join(&name);
        let f = File::create(&path).map_err(|e| CliError::output(&path, e))?;
        self.files.push(name);
        Ok(BufWriter::new(f))
    }

    /// Writes `<stem>.csv` or `<stem>.json` depending on the output format.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        let format = self.format;
        let mut w = self.create(format!("{stem}.{}", format.extension()))?;
        table.write(&mut w, format)?;
        w.flush().map_err(|e| CliError::output(Path::new(stem), e))?;
        Ok(())
    }

    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut w = self.create(name.to_owned())?;
        write_json(&mut w, value)?;
        w.flush().map_err(|e| CliError::output(Path::new(name), e))?;
        Ok(())
    }

    /// Moves every staged file into the output directory, returning the
    /// final paths in creation order.
    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut done = Vec::with_capacity(self.files.len());
        for name in &self.files {
            let from = self.dir.path().join(name);
            let to = self.out.join(name);
            fs::rename(&from, &to).map_err(|e| CliError::output(&to, e))?;
            done.push(to);
        }
        Ok(done)
    }
}
