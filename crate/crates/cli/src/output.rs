//! Report files. Every file carries the config hash and toolkit version; the
//! wall-clock timestamp appears only in the manifest.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use swprofile::asymptotics::SampleRow;

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Columns of the sample CSV, in order.
pub const CSV_COLUMNS: [&str; 5] = ["r", "h", "mu2_raw", "mu2_extrapolated", "model"];

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    version: &'a str,
    config_hash: &'a str,
    command: &'a str,
    result: &'a T,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'a str,
    config_hash: &'a str,
    command: &'a str,
    exit_code: i32,
    files: Vec<String>,
    /// Seconds since the Unix epoch.
    timestamp: u64,
}

pub struct Writer {
    dir: PathBuf,
    stem: String,
    command: String,
    hash: String,
    files: Vec<String>,
}

impl Writer {
    pub fn new(dir: &Path, stem: &str, command: &str, hash: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            command: command.to_string(),
            hash: hash.to_string(),
            files: Vec::new(),
        })
    }

    fn path(&mut self, ext: &str) -> PathBuf {
        let name = format!("{}.{ext}", self.stem);
        self.files.push(name.clone());
        self.dir.join(name)
    }

    pub fn json<T: Serialize>(&mut self, result: &T) -> Result<PathBuf, CliError> {
        let path = self.path("json");
        let env = Envelope { version: VERSION, config_hash: &self.hash, command: &self.command, result };
        let mut text = serde_json::to_string_pretty(&env).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    /// Writes the sample rows after a `#` comment line with version and hash.
    pub fn samples(&mut self, rows: &[SampleRow]) -> Result<PathBuf, CliError> {
        let path = self.path("csv");
        let mut buf = format!("# swprofile {VERSION} config {}\n", self.hash).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(CSV_COLUMNS)?;
            for row in rows {
                w.write_record([
                    row.r.to_string(),
                    row.h.map(|h| h.to_string()).unwrap_or_default(),
                    row.mu2_raw.to_string(),
                    row.mu2_extrapolated.to_string(),
                    row.model.clone(),
                ])?;
            }
            w.flush().map_err(|e| CliError::io(&path, e))?;
        }
        std::fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }

    pub fn manifest(mut self, exit_code: i32) -> Result<PathBuf, CliError> {
        let path = self.dir.join(format!("{}.manifest.json", self.stem));
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let files = std::mem::take(&mut self.files);
        let m = Manifest { version: VERSION, config_hash: &self.hash, command: &self.command, exit_code, files, timestamp };
        let text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Config(e.to_string()))?;
        std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
