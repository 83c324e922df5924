//! Outputs are rendered in memory and written only once all work succeeded,
//! so a failing command leaves no partial files behind.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

#[derive(Default)]
pub struct Outputs {
    pending: Vec<(Option<PathBuf>, Vec<u8>)>,
}

impl Outputs {
    /// `None` targets standard output.
    pub fn add(&mut self, path: Option<&Path>, bytes: Vec<u8>) {
        self.pending.push((path.map(Path::to_path_buf), bytes));
    }

    pub fn commit(self) -> Result<()> {
        for (path, bytes) in self.pending {
            match path {
                Some(path) => fs::write(&path, bytes)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => io::stdout()
                    .lock()
                    .write_all(&bytes)
                    .context("writing standard output")?,
            }
        }
        Ok(())
    }
}

/// Input must be a readable file.
pub fn check_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("input file {} does not exist", path.display());
    }
    Ok(())
}

/// The directory that will hold `path` must exist.
pub fn check_output(path: &Path) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
    }
    Ok(())
}

pub fn render<F>(f: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> zernlets_core::Result<()>,
{
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}
