//! Artifact writers. Every CSV starts with a `#` comment carrying the config
//! hash and master seed; every JSON object carries them as fields.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::CliError;

/// JSON Schema of the 2D plot-data file.
pub const PLOT2D_SCHEMA: &str = include_str!("../schema/plot2d.schema.json");
pub const PLOT2D_SCHEMA_ID: &str = "neuropde/plot2d/1";

/// Identity of the run that produced a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stamp {
    pub config_hash: String,
    pub master_seed: u64,
}

impl Stamp {
    pub fn csv_comment(&self) -> String {
        format!("# config_hash={} master_seed={}\n", self.config_hash, self.master_seed)
    }
}

pub struct OutDir {
    dir: PathBuf,
    stamp: Stamp,
}

impl OutDir {
    pub fn create(dir: &Path, stamp: Stamp) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stamp,
        })
    }

    pub fn stamp(&self) -> &Stamp {
        &self.stamp
    }

    /// Writes `name` as the stamp comment followed by whatever `body` emits.
    pub fn csv<F>(&self, name: &str, body: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
    {
        let mut buf = self.stamp.csv_comment().into_bytes();
        body(&mut buf)?;
        self.put(name, &buf)
    }

    /// Writes `value` (an object) with the stamp fields merged in.
    pub fn json(&self, name: &str, value: Value) -> Result<PathBuf, CliError> {
        let mut obj = Map::new();
        obj.insert("config_hash".into(), self.stamp.config_hash.clone().into());
        obj.insert("master_seed".into(), self.stamp.master_seed.into());
        match value {
            Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("data".into(), other);
            }
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(obj))
            .map_err(|e| CliError::Internal(e.to_string()))?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    fn put(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path)?;
        f.write_all(bytes)?;
        Ok(path)
    }
}
