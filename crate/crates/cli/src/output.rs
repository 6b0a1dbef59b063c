use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: usize,
}

/// Written last, next to the outputs it lists.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command_line: Vec<String>,
    pub command: &'static str,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub threads: usize,
    pub files: Vec<FileEntry>,
    pub wall_time_s: f64,
}

pub struct OutDir {
    dir: PathBuf,
    files: Vec<FileEntry>,
    started: Instant,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<OutDir, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        Ok(OutDir { dir: dir.to_path_buf(), files: Vec::new(), started: Instant::now() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        self.files.push(FileEntry { name: name.to_string(), bytes: contents.len() });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, &s)
    }

    pub fn finish(self, command: &'static str, params: serde_json::Value, seed: Option<u64>) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command_line: std::env::args().collect(),
            command,
            params,
            seed,
            threads: rayon::current_num_threads(),
            files: self.files,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let path = self.dir.join("manifest.json");
        let mut s = serde_json::to_string_pretty(&manifest)?;
        s.push('\n');
        fs::write(&path, s).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        for f in &manifest.files {
            println!("{}", self.dir.join(&f.name).display());
        }
        Ok(path)
    }
}
