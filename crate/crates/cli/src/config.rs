//! Plain-text `key = value` configuration files. Precedence is flag, then
//! file, then built-in default; the worker count also reads an environment
//! variable between flag and file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "INEQCERT_WORKERS";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<ConfigFile> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("config line {}: expected `key = value`", i + 1);
            };
            let key = k.trim().replace('_', "-");
            if key.is_empty() {
                bail!("config line {}: empty key", i + 1);
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn load(path: &Path) -> Result<ConfigFile> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: ConfigValue>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => T::from_config(v).map(Some).with_context(|| format!("config key `{key}`: cannot parse `{v}`")),
        }
    }

    /// Flag value if given, else the file value, else `default`.
    pub fn pick<T: ConfigValue>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

/// Values readable from a config file.
pub trait ConfigValue: Sized {
    fn from_config(s: &str) -> Result<Self>;
}

macro_rules! via_fromstr {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn from_config(s: &str) -> Result<Self> {
                Ok(<$t>::from_str(s)?)
            }
        }
    )*};
}

via_fromstr!(f64, String, bool);

impl ConfigValue for u64 {
    fn from_config(s: &str) -> Result<Self> {
        parse_count(s)
    }
}

impl ConfigValue for u32 {
    fn from_config(s: &str) -> Result<Self> {
        Ok(u32::try_from(parse_count(s)?)?)
    }
}

impl ConfigValue for usize {
    fn from_config(s: &str) -> Result<Self> {
        Ok(usize::try_from(parse_count(s)?)?)
    }
}

/// Nonnegative integer, also accepting scientific notation such as `2e6`.
pub fn parse_count(s: &str) -> Result<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().with_context(|| format!("`{s}` is not a number"))?;
    if !(f.is_finite() && f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64) {
        bail!("`{s}` is not a nonnegative integer");
    }
    Ok(f as u64)
}

/// Worker count: flag, then environment, then file, then all cores.
pub fn workers(flag: Option<usize>, file: &ConfigFile) -> Result<usize> {
    let n = if let Some(n) = flag {
        n
    } else if let Ok(v) = std::env::var(WORKERS_ENV) {
        usize::from_config(v.trim()).with_context(|| format!("{WORKERS_ENV}={v}"))?
    } else if let Some(n) = file.get::<usize>("workers")? {
        n
    } else {
        std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
    };
    if n == 0 {
        bail!("worker count must be at least 1");
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_prefers_flags() {
        let f = ConfigFile::parse("# comment\nrho = 0.05\nbudget=2e6\nslice_width = 0.02 # trailing\n").unwrap();
        assert_eq!(f.get::<f64>("rho").unwrap(), Some(0.05));
        assert_eq!(f.get::<u64>("budget").unwrap(), Some(2_000_000));
        assert_eq!(f.get::<f64>("slice-width").unwrap(), Some(0.02));
        assert_eq!(f.pick(Some(0.3), "rho", 0.1).unwrap(), 0.3);
        assert_eq!(f.pick(None, "rho", 0.1).unwrap(), 0.05);
        assert_eq!(f.pick(None, "seed", 9u64).unwrap(), 9);
    }

    #[test]
    fn rejects_garbage() {
        assert!(ConfigFile::parse("no equals sign").is_err());
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        let f = ConfigFile::parse("budget = lots").unwrap();
        assert!(f.get::<u64>("budget").is_err());
    }
}
