//! File plumbing: digested reads, atomic writes and the run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a sibling temporary file and a rename, so readers never
/// see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |e: std::io::Error| CliError::Internal(format!("writing {}: {e}", path.display()));
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(fail)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(fail)?;
    std::fs::rename(&tmp, path).map_err(fail)
}

/// Inputs read so far and their digests. Shared across worker threads.
#[derive(Debug, Default)]
pub struct Inputs {
    digests: Mutex<BTreeMap<String, String>>,
}

impl Inputs {
    pub fn read(&self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::input(path.display(), e))?;
        self.record(path, &bytes);
        Ok(bytes)
    }

    pub fn read_text(&self, path: &Path) -> Result<String, CliError> {
        String::from_utf8(self.read(path)?).map_err(|e| CliError::input(path.display(), e))
    }

    pub fn record(&self, path: &Path, bytes: &[u8]) {
        let mut digests = self.digests.lock().expect("input digest lock");
        digests.insert(path.display().to_string(), sha256_hex(bytes));
    }

    fn entries(&self) -> Vec<FileDigest> {
        let digests = self.digests.lock().expect("input digest lock");
        digests.iter().map(|(path, sha)| FileDigest { path: path.clone(), sha256: Some(sha.clone()) }).collect()
    }
}

/// Outputs written so far, keyed by path relative to the output directory.
/// Timing files are listed without a digest.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    files: Mutex<BTreeMap<String, Option<String>>>,
}

impl Outputs {
    pub fn new(dir: PathBuf) -> Self {
        Outputs { dir, files: Mutex::new(BTreeMap::new()) }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&self, relative: &str, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
        let bytes = bytes.as_ref();
        write_atomic(&self.dir.join(relative), bytes)?;
        self.files.lock().expect("output lock").insert(relative.to_string(), Some(sha256_hex(bytes)));
        Ok(())
    }

    pub fn write_timing(&self, relative: &str, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
        write_atomic(&self.dir.join(relative), bytes.as_ref())?;
        self.files.lock().expect("output lock").insert(relative.to_string(), None);
        Ok(())
    }

    fn entries(&self) -> Vec<FileDigest> {
        let files = self.files.lock().expect("output lock");
        files.iter().map(|(path, sha)| FileDigest { path: path.clone(), sha256: sha.clone() }).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    /// `null` for timing outputs, which are not reproducible.
    pub sha256: Option<String>,
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Command-line arguments without `--out`; replayed by `topcap rerun`.
    pub args: Vec<String>,
    pub seed: u64,
    pub params: Value,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

impl RunManifest {
    pub(crate) fn assemble(command: &str, args: Vec<String>, seed: u64, params: Value, inputs: &Inputs, outputs: &Outputs) -> Self {
        RunManifest {
            tool: "topcap".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args,
            seed,
            params,
            inputs: inputs.entries(),
            outputs: outputs.entries(),
        }
    }

    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }
}
