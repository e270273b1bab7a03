//! Result files and the run manifest.
//!
//! Every result file opens with a reference to the manifest: a JSON header
//! record for JSON-lines files, a `# manifest=...` comment line otherwise.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Result;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.resolved.toml";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub config_file: String,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_s: f64,
    /// `ok`, or `failed: <message>` with whatever finished flushed.
    pub status: String,
    pub files: Vec<FileEntry>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&fs::read(path)?)?)
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// The result files of one run, all inside `dir`.
pub struct OutputSet {
    dir: PathBuf,
    config_hash: String,
    jsonl: bool,
    csv: bool,
    files: Vec<String>,
}

impl OutputSet {
    pub fn create(dir: &Path, config_hash: &str, formats: &[String]) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputSet {
            dir: dir.to_path_buf(),
            config_hash: config_hash.to_string(),
            jsonl: formats.iter().any(|f| f == "jsonl"),
            csv: formats.iter().any(|f| f == "csv"),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    fn open(&mut self, name: &str) -> Result<BufWriter<File>> {
        let f = File::create(self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    fn comment_header(&self) -> String {
        format!("# manifest={MANIFEST_FILE} config_hash={}\n", self.config_hash)
    }

    /// Writes `<stem>.jsonl`: the header record, then one line per record.
    pub fn write_jsonl<T: Serialize>(&mut self, stem: &str, records: &[T]) -> Result<()> {
        if !self.jsonl {
            return Ok(());
        }
        let hash = self.config_hash.clone();
        let mut w = self.open(&format!("{stem}.jsonl"))?;
        serde_json::to_writer(&mut w, &serde_json::json!({ "manifest": MANIFEST_FILE, "config_hash": hash }))?;
        w.write_all(b"\n")?;
        for r in records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `<stem>.csv` after the manifest comment line.
    pub fn write_csv(&mut self, stem: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        if !self.csv {
            return Ok(());
        }
        let head = self.comment_header();
        let mut w = self.open(&format!("{stem}.csv"))?;
        w.write_all(head.as_bytes())?;
        let mut c = csv::Writer::from_writer(w);
        c.write_record(header)?;
        for r in rows {
            c.write_record(r)?;
        }
        c.flush()?;
        Ok(())
    }

    /// A plain text result file with the manifest comment line first.
    pub fn write_text(&mut self, name: &str, body: &[u8]) -> Result<()> {
        let head = self.comment_header();
        let mut w = self.open(name)?;
        w.write_all(head.as_bytes())?;
        w.write_all(body)?;
        w.flush()?;
        Ok(())
    }

    pub fn entries(&self) -> Result<Vec<FileEntry>> {
        self.files
            .iter()
            .map(|f| {
                Ok(FileEntry {
                    path: f.clone(),
                    sha256: sha256_file(&self.dir.join(f))?,
                })
            })
            .collect()
    }
}

/// Formats a float so it parses back to the same value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}
