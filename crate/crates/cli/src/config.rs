//! Experiment configuration: r0 grids and `key = value` config files.
//!
//! Every command accepts `--config <file>` with flat `key = value` lines
//! (UTF-8, `#` comments). Explicit command-line flags win over file values,
//! which win over defaults.

use anyhow::{anyhow, bail, Context, Result};
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

/// An r0 sweep: `start:stop:count:{log|lin}` or a single value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct R0Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl R0Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let n = self.count;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

impl FromStr for R0Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            [one] => {
                let v: f64 = one.parse().context("bad r0 value")?;
                R0Grid {
                    start: v,
                    stop: v,
                    count: 1,
                    log: false,
                }
            }
            [start, stop, count, scale] => {
                let log = match *scale {
                    "log" => true,
                    "lin" | "linear" => false,
                    other => bail!("r0 scale must be log or lin, got '{other}'"),
                };
                R0Grid {
                    start: start.parse().context("bad r0 start")?,
                    stop: stop.parse().context("bad r0 stop")?,
                    count: count.parse().context("bad r0 count")?,
                    log,
                }
            }
            _ => bail!("r0 grid must be '<value>' or 'start:stop:count:log|lin', got '{s}'"),
        };
        if !(grid.start > 0.0 && grid.stop > 0.0) {
            bail!("r0 grid must be strictly positive");
        }
        if grid.count < 1 {
            bail!("r0 grid count must be >= 1");
        }
        Ok(grid)
    }
}

impl std::fmt::Display for R0Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.count == 1 {
            write!(f, "{}", self.start)
        } else {
            write!(
                f,
                "{}:{}:{}:{}",
                self.start,
                self.stop,
                self.count,
                if self.log { "log" } else { "lin" }
            )
        }
    }
}

/// Flat `key = value` file.
#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {} is not 'key = value': '{raw}'", lineno + 1))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    /// Flag value beats config value beats default.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|e| anyhow!("config key '{key}': {e}")),
            None => Ok(default),
        }
    }

    /// Like [`resolve`](Self::resolve) but with no default (required).
    pub fn resolve_required<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|e| anyhow!("config key '{key}': {e}")),
            None => Err(anyhow!("missing required option '{key}' (flag or config)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: R0Grid = "0.01:1:50:log".parse().unwrap();
        assert_eq!(g.count, 50);
        assert!(g.log);
        let vs = g.values();
        assert_eq!(vs.len(), 50);
        assert!((vs[0] - 0.01).abs() < 1e-15);
        assert!((vs[49] - 1.0).abs() < 1e-12);

        let single: R0Grid = "0.05".parse().unwrap();
        assert_eq!(single.values(), vec![0.05]);

        assert!("0:1:10:log".parse::<R0Grid>().is_err());
        assert!("1:2:0:lin".parse::<R0Grid>().is_err());
        assert!("1:2:3:banana".parse::<R0Grid>().is_err());
    }
}
