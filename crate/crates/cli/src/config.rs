//! Plain-text configuration files and flag layering.
//!
//! Files hold `key = value` lines with `#` comments. Values resolve with
//! flag > config file > default precedence, and any key the subcommand
//! does not consume is an error rather than silently ignored.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use qphase_core::Error;

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    consumed: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl ConfigFile {
    /// Empty layer used when no `--config` was given.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::FileFormat {
                    path: path.display().to_string(),
                    msg: format!("line {}: expected `key = value`, found {raw:?}", lineno + 1),
                });
            };
            let key = key.trim().to_string();
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::FileFormat {
                    path: path.display().to_string(),
                    msg: format!("line {}: duplicate key {key:?}", lineno + 1),
                });
            }
        }
        Ok(Self { values, consumed: Default::default() })
    }

    /// Raw string lookup; marks the key as consumed.
    pub fn raw(&self, key: &str) -> Option<String> {
        let hit = self.values.get(key).cloned();
        if hit.is_some() {
            self.consumed.borrow_mut().insert(key.to_string());
        }
        hit
    }

    /// Typed lookup; marks the key as consumed.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        match self.raw(key) {
            None => Ok(None),
            Some(text) => text.parse::<T>().map(Some).map_err(|_| {
                Error::InvalidConfig(format!("config key {key}: cannot parse {text:?}"))
            }),
        }
    }

    /// Rejects keys that no parameter consumed.
    pub fn reject_unknown(&self) -> Result<(), Error> {
        let consumed = self.consumed.borrow();
        let unknown: Vec<&String> = self.values.keys().filter(|k| !consumed.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "unknown config keys: {}",
                unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )))
        }
    }
}

/// Flag > config > default for one parameter.
pub fn resolve<T: FromStr>(
    flag: Option<T>,
    cfg: &ConfigFile,
    key: &str,
    default: T,
) -> Result<T, Error> {
    if let Some(v) = flag {
        // Still mark the key consumed so a config override that loses to
        // an explicit flag is not reported as unknown.
        let _ = cfg.raw(key);
        return Ok(v);
    }
    Ok(cfg.get(key)?.unwrap_or(default))
}

/// Flag > config with no default; error when absent.
pub fn resolve_required<T: FromStr>(
    flag: Option<T>,
    cfg: &ConfigFile,
    key: &str,
) -> Result<T, Error> {
    if let Some(v) = flag {
        let _ = cfg.raw(key);
        return Ok(v);
    }
    cfg.get(key)?.ok_or_else(|| Error::InvalidConfig(format!("missing required parameter --{key}")))
}
