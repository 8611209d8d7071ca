//! Optional `key = value` configuration of default search bounds.
//!
//! Recognised keys (all optional):
//!
//! ```text
//! capacity.d_max = 104      # point-search bound inside `capacity` and `classes --at`
//! point_bound.<k> = <D>     # D(z_k) for the z_k point searches, k = 1..8
//! interval_bound.<k> = <D>  # D_k for the interval searches, k = 1..8
//! ```
//!
//! Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use capcalc_core::capacity::DEFAULT_SEARCH_DEGREE;
use capcalc_core::tables;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{value}` is not a positive integer")]
    Value { line: usize, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub d_max: i64,
    pub point_bounds: BTreeMap<i64, i64>,
    pub interval_bounds: BTreeMap<i64, i64>,
}

impl Default for Config {
    fn default() -> Self {
        let mut point_bounds = BTreeMap::new();
        let mut interval_bounds = BTreeMap::new();
        for k in 1..=8 {
            let (p, i) = tables::default_bounds(k).expect("k in 1..=8");
            point_bounds.insert(k, p);
            interval_bounds.insert(k, i);
        }
        Config { d_max: DEFAULT_SEARCH_DEGREE, point_bounds, interval_bounds }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Config::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| ConfigError::Syntax { line, text: body.to_string() })?;
            let (key, value) = (key.trim(), value.trim());
            let n = match value.parse::<i64>() {
                Ok(n) if n > 0 => n,
                _ => return Err(ConfigError::Value { line, value: value.to_string() }),
            };
            let unknown = || ConfigError::UnknownKey { line, key: key.to_string() };
            let indexed = |prefix: &str| -> Option<i64> {
                key.strip_prefix(prefix)?.parse::<i64>().ok().filter(|k| (1..=8).contains(k))
            };
            if key == "capacity.d_max" {
                cfg.d_max = n;
            } else if let Some(k) = indexed("point_bound.") {
                cfg.point_bounds.insert(k, n);
            } else if let Some(k) = indexed("interval_bound.") {
                cfg.interval_bounds.insert(k, n);
            } else {
                return Err(unknown());
            }
        }
        Ok(cfg)
    }

    pub fn point_bound(&self, k: i64) -> Option<i64> {
        self.point_bounds.get(&k).copied()
    }

    pub fn interval_bound(&self, k: i64) -> Option<i64> {
        self.interval_bounds.get(&k).copied()
    }
}
