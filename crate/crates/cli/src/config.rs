//! Flat `key = value` config files mirroring the long flags. Explicit
//! flags win over config entries, which win over built-in defaults.

use std::collections::HashMap;
use std::path::Path;

use crate::{CliError, CliResult, Format, ProtocolArg};

#[derive(Debug, Default, Clone)]
pub struct ConfigMap {
    entries: HashMap<String, String>,
}

pub fn load(path: Option<&Path>) -> CliResult<ConfigMap> {
    let mut entries = HashMap::new();
    if let Some(path) = path {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Validation(format!(
                    "config {}:{}: expected `key = value`, got `{raw}`",
                    path.display(),
                    lineno + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
    }
    Ok(ConfigMap { entries })
}

impl ConfigMap {
    pub fn get_raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Validation(format!("config key `{key}`: cannot parse `{raw}`"))
            }),
        }
    }

    /// Layered lookup: explicit CLI value, then config entry, then default.
    pub fn resolve<T: std::str::FromStr + Copy>(
        &self,
        cli: Option<T>,
        key: &str,
        default: T,
    ) -> CliResult<T> {
        if let Some(v) = cli {
            return Ok(v);
        }
        Ok(self.parsed(key)?.unwrap_or(default))
    }

    pub fn resolve_format(&self, cli: Option<Format>, default: Format) -> CliResult<Format> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.entries.get("format").map(String::as_str) {
            None => Ok(default),
            Some("csv") => Ok(Format::Csv),
            Some("json") => Ok(Format::Json),
            Some(other) => {
                Err(CliError::Validation(format!("config key `format`: unknown value `{other}`")))
            }
        }
    }

    pub fn resolve_protocol(
        &self,
        cli: Option<ProtocolArg>,
        default: ProtocolArg,
    ) -> CliResult<ProtocolArg> {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.entries.get("protocol").map(String::as_str) {
            None => Ok(default),
            Some("a") | Some("A") => Ok(ProtocolArg::A),
            Some("b") | Some("B") => Ok(ProtocolArg::B),
            Some(other) => Err(CliError::Validation(format!(
                "config key `protocol`: unknown value `{other}`"
            ))),
        }
    }
}
