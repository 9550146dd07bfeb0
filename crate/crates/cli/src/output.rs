//! Artifact directory, atomic writes and the metadata sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use tempfile::NamedTempFile;

use crate::error::RunError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "FOCKFIELD_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "fockfield-out";

/// Key of the only metadata line that varies between identical runs.
pub const TIMESTAMP_KEY: &str = "timestamp_unix";

#[derive(Clone, Debug)]
pub struct OutputDir {
    path: PathBuf,
}

impl OutputDir {
    /// Flag, then config file, then [`OUT_DIR_ENV`], then [`DEFAULT_OUT_DIR`].
    pub fn resolve(flag: Option<&Path>, config: Option<&str>) -> Self {
        let path = flag
            .map(Path::to_path_buf)
            .or_else(|| config.map(PathBuf::from))
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        Self { path }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Write `contents` to `name` via a temporary file in the same directory
    /// and a rename, so readers never see a partial file.
    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, RunError> {
        let io = |path: &Path| {
            let path = path.to_owned();
            move |source| RunError::Io { path, source }
        };
        std::fs::create_dir_all(&self.path).map_err(io(&self.path))?;
        let target = self.path.join(name);
        let mut tmp = NamedTempFile::new_in(&self.path).map_err(io(&self.path))?;
        tmp.write_all(contents.as_bytes()).map_err(io(&target))?;
        tmp.as_file().sync_all().map_err(io(&target))?;
        tmp.persist(&target).map_err(|e| RunError::Io { path: target.clone(), source: e.error })?;
        Ok(target)
    }
}

/// Ordered `key = value` sidecar describing one run.
#[derive(Clone, Debug, Default)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(scenario: &str) -> Self {
        let mut m = Self::default();
        m.push("tool", env!("CARGO_PKG_NAME"));
        m.push("version", env!("CARGO_PKG_VERSION"));
        m.push("core_version", fockfield::VERSION);
        m.push("scenario", scenario);
        m
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    /// Rendered text, ending with the timestamp line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        out.push_str(&format!("{TIMESTAMP_KEY} = {now}\n"));
        out
    }
}

/// Metadata text with the timestamp line removed, for determinism checks.
pub fn strip_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with(TIMESTAMP_KEY)).map(|l| format!("{l}\n")).collect()
}
