//! Flat `key = value` config files that seed flag defaults.

use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Default)]
pub struct Config {
    values: HashMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!(
                    "config {} line {}: expected key = value",
                    path.display(),
                    lineno + 1
                ));
            };
            // hyphens and underscores are interchangeable in keys
            values.insert(
                key.trim().replace('-', "_"),
                value.trim().to_string(),
            );
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| format!("config key {key}: cannot parse {raw:?}")),
        }
    }
}

/// Flag wins, then config, then the built-in default.
pub fn resolve<T: Copy + std::str::FromStr>(
    flag: Option<T>,
    config: &Config,
    key: &str,
    default: T,
) -> Result<T, String> {
    if let Some(v) = flag {
        return Ok(v);
    }
    Ok(config.parse::<T>(key)?.unwrap_or(default))
}
