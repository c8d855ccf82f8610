//! Defaults for every tunable, overridable by a JSON file passed with
//! `--config`. Missing keys keep their defaults; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use topcap_core::embedding::{DEFAULT_DIMENSION, DEFAULT_MIN_POINTS, DEFAULT_SKIP, DEFAULT_WINDOWS};
use topcap_core::signal::{DEFAULT_AMP_THRESHOLD, DEFAULT_MIN_LEN};
use topcap_core::PhoneClassTable;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub clean: CleanConfig,
    pub embedding: EmbeddingConfig,
    pub persistence: PersistenceConfig,
    pub density: DensityConfig,
    pub learn: LearnConfig,
    pub phone_classes: PhoneClassTable,
    pub corpus: CorpusConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleanConfig {
    pub amp_threshold: f64,
    pub min_len: usize,
}

impl Default for CleanConfig {
    fn default() -> Self {
        CleanConfig { amp_threshold: DEFAULT_AMP_THRESHOLD, min_len: DEFAULT_MIN_LEN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub d: usize,
    pub n_windows: usize,
    pub skip: usize,
    pub min_points: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig { d: DEFAULT_DIMENSION, n_windows: DEFAULT_WINDOWS, skip: DEFAULT_SKIP, min_points: DEFAULT_MIN_POINTS }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PersistenceConfig {
    /// Rips truncation; `null` uses the enclosing radius.
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    pub bins_x: usize,
    pub bins_y: usize,
    pub cutoff_fraction: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        DensityConfig { bins_x: 16, bins_y: 16, cutoff_fraction: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnConfig {
    pub test_fraction: f64,
    pub folds: usize,
    pub knn_k: usize,
    pub standardize: bool,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig { test_fraction: 0.3, folds: 5, knn_k: 5, standardize: true }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    /// Directory of `<stem>.wav` + `<stem>.TextGrid` pairs that `pipeline`
    /// reads when no `--input` is given.
    pub audio_dir: Option<PathBuf>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::input(path.display(), e))?;
        let text = std::str::from_utf8(&bytes).map_err(|e| CliError::input(path.display(), e))?;
        let config = Config::from_json(text).map_err(|e| CliError::input(path.display(), e))?;
        Ok((config, bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_files_hold_the_defaults() {
        let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config");
        let defaults = std::fs::read_to_string(root.join("defaults.json")).unwrap();
        assert_eq!(Config::from_json(&defaults).unwrap(), Config::default());
        let table = std::fs::read_to_string(root.join("phone_classes.json")).unwrap();
        assert_eq!(PhoneClassTable::from_json(&table).unwrap(), PhoneClassTable::default());
    }

    #[test]
    fn partial_files_keep_other_defaults() {
        let config = Config::from_json(r#"{"embedding": {"skip": 2}}"#).unwrap();
        assert_eq!(config.embedding.skip, 2);
        assert_eq!(config.embedding.d, 100);
        assert_eq!(config.learn, LearnConfig::default());
        assert!(Config::from_json(r#"{"embeding": {}}"#).is_err());
    }
}
