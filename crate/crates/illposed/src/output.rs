//! Staged output: files are rendered in memory, written under temporary
//! names and only renamed into place once every write has succeeded.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use illposed_core::ImageGrid;

use crate::csvio::Table;
use crate::pgm::encode_pgm;

#[derive(Debug, Default)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_bytes(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn add_csv(&mut self, name: impl Into<String>, table: &Table) -> Result<()> {
        self.add_bytes(name, table.to_bytes()?);
        Ok(())
    }

    pub fn add_pgm(&mut self, name: impl Into<String>, img: &ImageGrid) {
        self.add_bytes(name, encode_pgm(img));
    }

    pub fn add_text(&mut self, name: impl Into<String>, text: String) {
        self.add_bytes(name, text.into_bytes());
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    /// Writes everything into `dir`. On failure no temporary file is left.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::with_capacity(self.files.len());
        let result = (|| -> Result<()> {
            for (name, bytes) in &self.files {
                let target = dir.join(name);
                let tmp = dir.join(format!(".{name}.tmp"));
                staged.push((tmp.clone(), target));
                fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
            }
            for (tmp, target) in &staged {
                fs::rename(tmp, target)
                    .with_context(|| format!("renaming to {}", target.display()))?;
            }
            Ok(())
        })();
        if let Err(e) = result {
            for (tmp, _) in &staged {
                let _ = fs::remove_file(tmp);
            }
            return Err(e);
        }
        Ok(staged.into_iter().map(|(_, t)| t).collect())
    }
}
