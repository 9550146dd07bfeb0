//! Scenario configuration files.
//!
//! The format is flat `key = value` text:
//!
//! ```text
//! # comments start with '#' or ';'
//! scenario = wavepacket      # keys before any section are global
//! seed = 7
//!
//! [wavepacket]
//! M = 256
//! sigma0 = 8
//! times = 0:5:0.01
//! ```
//!
//! Keys are case-sensitive and match the long flag names of the
//! corresponding subcommand, with `_` in place of `-` (`spot_dt`). The global
//! keys `scenario` and `out_dir` pick the scenario for `run` and the artifact
//! directory. A value is looked up on the command line
//! first, then in the scenario's section, then among the global keys, and
//! finally falls back to the built-in default. Unknown keys inside a
//! scenario section are rejected.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::RunError;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    global: BTreeMap<String, String>,
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let mut config = Self::default();
        let mut current: Option<String> = None;
        for (number, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let at = |message: String| RunError::Validation(format!("config line {}: {message}", number + 1));
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| at("section header is missing ']'".into()))?.trim();
                if name.is_empty() {
                    return Err(at("empty section name".into()));
                }
                config.sections.entry(name.to_owned()).or_default();
                current = Some(name.to_owned());
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| at(format!("expected 'key = value', got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(at("empty key".into()));
            }
            let table = match &current {
                Some(name) => config.sections.get_mut(name).expect("section registered"),
                None => &mut config.global,
            };
            if table.insert(key.to_owned(), value.to_owned()).is_some() {
                return Err(at(format!("duplicate key '{key}'")));
            }
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_owned(), source })?;
        Self::parse(&text)
    }

    pub fn global(&self, key: &str) -> Option<&str> {
        self.global.get(key).map(String::as_str)
    }

    pub fn section(&self, name: &str) -> Option<&BTreeMap<String, String>> {
        self.sections.get(name)
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Layered parameter lookup for one scenario; records every resolved value
/// for the metadata sidecar.
#[derive(Debug)]
pub struct Settings {
    scenario: &'static str,
    section: BTreeMap<String, String>,
    global: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    pub fn new(scenario: &'static str, file: Option<&ConfigFile>) -> Self {
        Self {
            scenario,
            section: file.and_then(|f| f.section(scenario)).cloned().unwrap_or_default(),
            global: file.map(|f| f.global.clone()).unwrap_or_default(),
            resolved: BTreeMap::new(),
        }
    }

    pub fn scenario(&self) -> &'static str {
        self.scenario
    }

    /// Flag, then section, then global value, then `default`.
    pub fn raw(&mut self, key: &str, flag: &Option<String>, default: &str) -> String {
        let value = flag
            .clone()
            .or_else(|| self.section.get(key).cloned())
            .or_else(|| self.global.get(key).cloned())
            .unwrap_or_else(|| default.to_owned());
        self.resolved.insert(key.to_owned(), value.clone());
        value
    }

    /// Like [`Settings::raw`] but with no default: `None` when unset.
    pub fn optional(&mut self, key: &str, flag: &Option<String>) -> Option<String> {
        let value =
            flag.clone().or_else(|| self.section.get(key).cloned()).or_else(|| self.global.get(key).cloned())?;
        self.resolved.insert(key.to_owned(), value.clone());
        Some(value)
    }

    pub fn get<T>(&mut self, key: &str, flag: &Option<String>, default: &str) -> Result<T, RunError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.raw(key, flag, default);
        parse_value(key, &raw)
    }

    /// Fail on section keys that no parameter lookup asked for.
    pub fn finish(&self) -> Result<(), RunError> {
        let unknown: Vec<&str> =
            self.section.keys().filter(|k| !self.resolved.contains_key(*k)).map(String::as_str).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(RunError::Validation(format!("unknown key(s) in [{}]: {}", self.scenario, unknown.join(", "))))
        }
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

pub fn parse_value<T>(key: &str, raw: &str) -> Result<T, RunError>
where
    T: FromStr,
    T::Err: Display,
{
    raw.trim().parse().map_err(|e| RunError::Validation(format!("{key} = '{raw}': {e}")))
}

/// Comma-separated list.
pub fn parse_list<T>(key: &str, raw: &str) -> Result<Vec<T>, RunError>
where
    T: FromStr,
    T::Err: Display,
{
    if raw.trim().is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',').map(|item| parse_value(key, item)).collect()
}

/// `start:stop:step` (inclusive of `stop` when it lies on the grid) or a
/// comma-separated list of values.
pub fn parse_times(key: &str, raw: &str) -> Result<Vec<f64>, RunError> {
    let parts: Vec<&str> = raw.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let (start, stop, step): (f64, f64, f64) =
                (parse_value(key, start)?, parse_value(key, stop)?, parse_value(key, step)?);
            if !(step > 0.0) || !step.is_finite() {
                return Err(RunError::Validation(format!("{key}: step must be positive, got {step}")));
            }
            if !(stop >= start) {
                return Err(RunError::Validation(format!("{key}: stop {stop} precedes start {start}")));
            }
            let intervals = ((stop - start) / step * (1.0 + 1e-12)).floor();
            if intervals > 1e6 {
                return Err(RunError::Validation(format!("{key}: more than a million samples requested")));
            }
            Ok((0..=intervals as usize).map(|i| start + step * i as f64).collect())
        }
        [_] => parse_list(key, raw),
        _ => Err(RunError::Validation(format!("{key}: expected start:stop:step or a list, got '{raw}'"))),
    }
}
