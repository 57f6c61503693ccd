//! Resolution of run parameters from flags, an optional `key=value` config
//! file and built-in defaults, in that order of precedence.

use std::collections::BTreeSet;
use std::fmt::{self, Display};
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use contagion::io::Metadata;

/// Comma-separated list value, e.g. `0,40,80`.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<T>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

pub struct Settings {
    config: Metadata,
    used: BTreeSet<String>,
    resolved: Metadata,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let config = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                Metadata::parse(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => Metadata::default(),
        };
        let mut resolved = Metadata::new();
        if let Some(p) = path {
            resolved.set("config", p.display());
        }
        Ok(Self { config, used: BTreeSet::new(), resolved })
    }

    /// Flag value, else config value, else `default`; recorded for the
    /// metadata sidecar.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.get_opt(key, flag)?.unwrap_or(default);
        self.resolved.set(key, &v);
        Ok(v)
    }

    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.used.insert(key.to_string());
        let v = match flag {
            Some(v) => Some(v),
            None => match self.config.get(key) {
                Some(raw) => Some(raw.parse::<T>().map_err(|e| anyhow::anyhow!("config key `{key}`: {e}"))?),
                None => None,
            },
        };
        if let Some(v) = &v {
            self.resolved.set(key, v);
        }
        Ok(v)
    }

    /// Like [`Settings::get_opt`] but the value must be present.
    pub fn require<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.get_opt(key, flag)? {
            Some(v) => Ok(v),
            None => bail!("missing required parameter `{key}` (flag --{} or config key)", key.replace('_', "-")),
        }
    }

    /// Records a derived value without reading it from anywhere.
    pub fn note(&mut self, key: &str, value: impl Display) {
        self.resolved.set(key, value);
    }

    /// Rejects config keys that the command never asked for.
    pub fn finish(self) -> Result<Metadata> {
        let unknown: Vec<&str> =
            self.config.entries().iter().map(|(k, _)| k.as_str()).filter(|k| !self.used.contains(*k)).collect();
        if !unknown.is_empty() {
            bail!("unknown config key(s): {}", unknown.join(", "));
        }
        Ok(self.resolved)
    }
}
