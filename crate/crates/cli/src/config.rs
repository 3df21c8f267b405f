//! Run configuration: defaults, then an optional `key = value` file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use qmask_core::tol::Tolerances;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Overrides the primary tolerance of whichever check a command runs.
    pub tol: Option<f64>,
    pub tolerances: Tolerances,
    pub n_samples: usize,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub max_dim: usize,
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            tol: None,
            tolerances: Tolerances::default(),
            n_samples: 1000,
            format: None,
            out: None,
            max_dim: qmask_core::matrix::max_dimension(),
            timing: false,
        }
    }
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let x: f64 = value.parse().with_context(|| format!("`{key}` expects a number, got `{value}`"))?;
    if !(x.is_finite() && x > 0.0) {
        bail!("`{key}` must be positive, got {x}");
    }
    Ok(x)
}

impl RunConfig {
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "seed" => self.seed = value.parse().with_context(|| format!("bad seed `{value}`"))?,
            "tol" => self.tol = Some(positive(key, value)?),
            "n" | "n_samples" => {
                let n: usize = value.parse().with_context(|| format!("bad sample count `{value}`"))?;
                if n == 0 {
                    bail!("`{key}` must be at least 1");
                }
                self.n_samples = n;
            }
            "format" => {
                self.format = Some(Format::from_str(value, true).map_err(|e| anyhow::anyhow!("bad format: {e}"))?)
            }
            "out" => self.out = Some(PathBuf::from(value)),
            "max_dim" => self.max_dim = value.parse().with_context(|| format!("bad max_dim `{value}`"))?,
            "timing" => self.timing = value.parse().with_context(|| format!("bad timing flag `{value}`"))?,
            _ => match key.strip_prefix("tol.") {
                Some(name) => {
                    let x = positive(key, value)?;
                    if !self.tolerances.set(name, x) {
                        bail!("unknown tolerance `{name}`");
                    }
                }
                None => bail!("unknown configuration key `{key}`"),
            },
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for (number, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected `key = value`", path.display(), number + 1))?;
            self.apply(key.trim(), value)
                .with_context(|| format!("{}:{}", path.display(), number + 1))?;
        }
        Ok(())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "# comment\nseed = 7\ntol.hr = 1e-8\nformat = csv\nn = 12 # trailing\n").unwrap();
        let mut c = RunConfig::default();
        c.apply_file(&path).unwrap();
        assert_eq!((c.seed, c.n_samples, c.format), (7, 12, Some(Format::Csv)));
        assert_eq!(c.tolerances.hr, 1e-8);
        c.apply("seed", "9").unwrap();
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn rejects_bad_entries() {
        let mut c = RunConfig::default();
        assert!(c.apply("n", "0").is_err());
        assert!(c.apply("tol", "-1").is_err());
        assert!(c.apply("tol.nope", "1e-3").is_err());
        assert!(c.apply("colour", "red").is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.cfg");
        std::fs::write(&path, "seed 3\n").unwrap();
        assert!(c.apply_file(&path).is_err());
    }
}
