//! Run settings assembled from built-in defaults, the precision environment
//! variable, an optional key/value file and command-line flags (in
//! increasing priority).

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use transference::harness::SuiteConfig;
use transference::problem::DEFAULT_PRECISION_BITS;

pub const PRECISION_ENV: &str = "TRANSFERENCE_PRECISION_BITS";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub precision_bits: u32,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    /// First flow time of `flow`; defaults to `s_step`.
    pub s_min: Option<f64>,
    pub s_max: f64,
    pub s_step: f64,
    /// Largest u of the exact grid u = 2, 3, …; replaces the s-grid in `flow`.
    pub exact_grid: Option<u64>,
    /// Largest threshold of the classical search (default depends on m).
    pub t_max: Option<u64>,
    pub t_points: usize,
    pub height: i64,
    pub tolerance: f64,
    pub epsilon: f64,
    pub tail: f64,
    pub digits: usize,
    pub transposed: bool,
    pub only: Vec<String>,
    pub out: Option<PathBuf>,
    /// Adds a `generated_at` field (Unix seconds) to JSON reports.
    pub timestamp: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let suite = SuiteConfig::default();
        Self {
            precision_bits: DEFAULT_PRECISION_BITS,
            n: 2,
            m: 1,
            seed: 1,
            s_min: None,
            s_max: suite.s_max,
            s_step: suite.s_step,
            exact_grid: None,
            t_max: None,
            t_points: suite.classical_points,
            height: suite.height,
            tolerance: suite.tolerance,
            epsilon: suite.epsilon,
            tail: suite.tail,
            digits: 15,
            transposed: false,
            only: Vec::new(),
            out: None,
            timestamp: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| anyhow::anyhow!("invalid value {value:?} for {key}: {e}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => bail!("invalid value {value:?} for {key}: expected true or false"),
    }
}

pub fn parse_list(value: &str) -> Vec<String> {
    value.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect()
}

impl RunConfig {
    /// Defaults with the precision taken from the environment when set.
    pub fn from_env() -> Result<Self> {
        let mut cfg = Self::default();
        if let Ok(v) = std::env::var(PRECISION_ENV) {
            cfg.precision_bits = parse(PRECISION_ENV, v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "precision_bits" => self.precision_bits = parse(key, value)?,
            "n" => self.n = parse(key, value)?,
            "m" => self.m = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "s_min" => self.s_min = Some(parse(key, value)?),
            "s_max" => self.s_max = parse(key, value)?,
            "s_step" => self.s_step = parse(key, value)?,
            "exact_grid" => self.exact_grid = Some(parse(key, value)?),
            "t_max" => self.t_max = Some(parse(key, value)?),
            "t_points" => self.t_points = parse(key, value)?,
            "height" => self.height = parse(key, value)?,
            "tolerance" => self.tolerance = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "tail" => self.tail = parse(key, value)?,
            "digits" => self.digits = parse(key, value)?,
            "transposed" => self.transposed = parse_bool(key, value)?,
            "only" => self.only = parse_list(value),
            "out" => self.out = Some(PathBuf::from(value)),
            "timestamp" => self.timestamp = parse_bool(key, value)?,
            _ => bail!("unknown configuration key {key:?}"),
        }
        Ok(())
    }

    /// Applies a file of `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .with_context(|| format!("{origin}:{}: expected key = value", i + 1))?;
            self.set(key.trim(), value.trim())
                .with_context(|| format!("{origin}:{}", i + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        self.apply_text(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < 64 {
            bail!("precision_bits must be at least 64, got {}", self.precision_bits);
        }
        if self.n == 0 || self.m == 0 {
            bail!("n and m must be positive");
        }
        if !(self.s_step > 0.0) || !(self.s_max > self.s_min.unwrap_or(self.s_step)) {
            bail!("s-grid must be nonempty and increasing (0 < s_min < s_max, s_step > 0)");
        }
        if self.s_min.is_some_and(|s| !(s > 0.0)) {
            bail!("s_min must be positive");
        }
        if self.exact_grid.is_some_and(|u| u < 2) {
            bail!("exact_grid must be at least 2");
        }
        if self.t_max.is_some_and(|t| t < 10) || self.t_points < 2 {
            bail!("t-grid must be nonempty and increasing (t_max ≥ 10, t_points ≥ 2)");
        }
        if self.height < 1 {
            bail!("height must be at least 1");
        }
        if !(self.tolerance >= 0.0) || !(self.epsilon >= 0.0) {
            bail!("tolerances must be nonnegative");
        }
        if !(self.tail > 0.0 && self.tail <= 1.0) {
            bail!("tail must lie in (0, 1]");
        }
        if self.digits == 0 || self.digits > 17 {
            bail!("digits must lie in 1..=17");
        }
        Ok(())
    }

    /// Flow times of `flow`: s_min, s_min + step, … up to s_max.
    pub fn s_grid(&self) -> Vec<f64> {
        let start = self.s_min.unwrap_or(self.s_step);
        let count = ((self.s_max - start) / self.s_step + 1e-9).floor() as usize;
        (0..=count).map(|k| start + k as f64 * self.s_step).collect()
    }

    pub fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            s_max: self.s_max,
            s_step: self.s_step,
            tail: self.tail,
            tolerance: self.tolerance,
            epsilon: self.epsilon,
            t_max: self.t_max,
            classical_points: self.t_points,
            height: self.height,
            only: (!self.only.is_empty()).then(|| self.only.clone()),
            ..SuiteConfig::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\ns_max = 12.5\nonly = dyson, jarnik_eq  # trailing\n\ntransposed = yes\n", "x")
            .unwrap();
        assert_eq!(c.s_max, 12.5);
        assert_eq!(c.only, vec!["dyson", "jarnik_eq"]);
        assert!(c.transposed);
        assert_eq!(c.s_step, 0.05);
    }

    #[test]
    fn bad_lines_are_reported_with_position() {
        let mut c = RunConfig::default();
        let e = c.apply_text("s_max = 3\nbogus = 1\n", "cfg").unwrap_err();
        assert!(format!("{e:#}").contains("cfg:2"));
        assert!(c.apply_text("s_max 3", "cfg").is_err());
        assert!(c.apply_text("s_max = abc", "cfg").is_err());
    }

    #[test]
    fn validation_rejects_low_precision_and_empty_grids() {
        let mut c = RunConfig { precision_bits: 32, ..Default::default() };
        assert!(c.validate().is_err());
        c.precision_bits = 64;
        c.validate().unwrap();
        c.s_min = Some(30.0);
        assert!(c.validate().is_err());
    }

    #[test]
    fn s_grid_starts_at_s_min() {
        let c = RunConfig { s_min: Some(0.5), s_max: 1.0, s_step: 0.25, ..Default::default() };
        assert_eq!(c.s_grid(), vec![0.5, 0.75, 1.0]);
        let c = RunConfig { s_max: 0.2, s_step: 0.1, ..Default::default() };
        assert_eq!(c.s_grid().len(), 2);
    }
}
