//! Output directory handling. Files are written to a sibling staging
//! directory and moved into place only after the whole command succeeded,
//! so a failed run leaves no partial outputs behind.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub struct Staging {
    target: PathBuf,
    dir: PathBuf,
    files: Vec<String>,
    committed: bool,
}

#[derive(Serialize)]
pub struct FileRecord {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Staging {
    pub fn new(target: &Path) -> CliResult<Self> {
        if target.exists() && !target.is_dir() {
            return Err(CliError::Io(format!("{} exists and is not a directory", target.display())));
        }
        let name = target
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into());
        let parent = match target.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        fs::create_dir_all(&parent).map_err(|e| io_error(&parent, e))?;
        let dir = parent.join(format!(".{name}.partial-{}", std::process::id()));
        if dir.exists() {
            fs::remove_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        }
        fs::create_dir(&dir).map_err(|e| io_error(&dir, e))?;
        Ok(Staging {
            target: target.to_path_buf(),
            dir,
            files: Vec::new(),
            committed: false,
        })
    }

    /// Writes one output file through `fill`.
    pub fn write<F>(&mut self, name: &str, fill: F) -> CliResult<()>
    where
        F: FnOnce(&mut BufWriter<File>) -> CliResult<()>,
    {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| io_error(&path, e))?;
        let mut w = BufWriter::new(file);
        fill(&mut w)?;
        w.flush().map_err(|e| io_error(&path, e))?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn write_str(&mut self, name: &str, text: &str) -> CliResult<()> {
        self.write(name, |w| Ok(w.write_all(text.as_bytes())?))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write_str(name, &text)
    }

    /// Name, size and digest of every file written so far, sorted by name.
    pub fn records(&self) -> CliResult<Vec<FileRecord>> {
        let mut names = self.files.clone();
        names.sort();
        names
            .into_iter()
            .map(|name| {
                let path = self.dir.join(&name);
                let bytes = fs::read(&path).map_err(|e| io_error(&path, e))?;
                Ok(FileRecord {
                    name,
                    bytes: bytes.len() as u64,
                    sha256: sha256_hex(&bytes),
                })
            })
            .collect()
    }

    /// Moves the staged files into the target directory, replacing files of
    /// the same name. Returns the written paths.
    pub fn commit(mut self) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(&self.target).map_err(|e| io_error(&self.target, e))?;
        let mut names = self.files.clone();
        names.sort();
        // refuse before moving anything so a collision cannot leave half the files behind
        if let Some(clash) = names.iter().map(|n| self.target.join(n)).find(|p| p.is_dir()) {
            return Err(CliError::Io(format!("{} is a directory", clash.display())));
        }
        let mut out = Vec::with_capacity(names.len());
        for name in names {
            let (from, to) = (self.dir.join(&name), self.target.join(&name));
            fs::rename(&from, &to).map_err(|e| io_error(&to, e))?;
            out.push(to);
        }
        fs::remove_dir_all(&self.dir).map_err(|e| io_error(&self.dir, e))?;
        self.committed = true;
        Ok(out)
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.dir);
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}
