//! Run configuration: built-in defaults, then an optional `key = value` file,
//! then command-line flags.

use crate::error::CliError;
use clap::Args;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Flags shared by every subcommand; unset flags fall back to the config file
/// and then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Plain-text `key = value` file supplying defaults.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Tree branching: every vertex has d+1 neighbours.
    #[arg(long, global = true)]
    pub d: Option<u32>,
    /// Nyström node count (multiple of the panel order).
    #[arg(long, global = true)]
    pub node_count: Option<usize>,
    /// Truncation of the Gaussian window, in units of σ.
    #[arg(long, global = true)]
    pub m: Option<f64>,
    /// Exploration depth.
    #[arg(long, short = 'n', global = true)]
    pub n: Option<u32>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Half-width of the critical band.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Interlacement level.
    #[arg(long, short = 'u', global = true)]
    pub u: Option<f64>,
    /// Field height.
    #[arg(long, short = 'a', global = true, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Height increment for the eigenvalue gap reported by `lambda`.
    #[arg(long, global = true)]
    pub rho: Option<f64>,
    /// Extra parabola height scanned by `verify-spectral`.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Samples per arc in the `verify-mc` monotonicity check.
    #[arg(long, short = 'k', global = true)]
    pub k: Option<u32>,
    /// Extra depth materialized around B_n in the domination check.
    #[arg(long, global = true)]
    pub buffer: Option<u32>,
    /// Diagram u grid as `start:end:count`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u_grid: Option<String>,
    /// Diagram a grid as `start:end:count`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a_grid: Option<String>,
    /// Directory for CSV and JSON artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Also write eigenpair diagnostics (grid, λ, residual) as JSON.
    #[arg(long, global = true)]
    pub dump_spectral: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub d: u32,
    pub node_count: usize,
    pub m: f64,
    pub n: u32,
    pub trials: u64,
    pub eps: f64,
    pub seed: u64,
    pub workers: usize,
    pub u: f64,
    pub a: f64,
    pub rho: f64,
    pub h: Option<f64>,
    pub k: u32,
    pub buffer: u32,
    pub u_grid: String,
    pub a_grid: String,
    pub out: Option<PathBuf>,
    pub dump_spectral: bool,
    pub config_file: Option<PathBuf>,
    /// Entries read from the config file, verbatim.
    pub file_values: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            d: 2,
            node_count: 400,
            m: 8.0,
            n: 10,
            trials: 100_000,
            eps: 1e-3,
            seed: 0,
            workers: 0,
            u: 0.0,
            a: 0.0,
            rho: 0.5,
            h: None,
            k: 6,
            buffer: 3,
            u_grid: "0:1.5:16".into(),
            a_grid: "-1:2:13".into(),
            out: None,
            dump_spectral: false,
            config_file: None,
            file_values: BTreeMap::new(),
        }
    }
}

const KEYS: &[&str] = &[
    "d", "node_count", "m", "n", "trials", "eps", "seed", "workers", "u", "a", "rho", "h", "k", "buffer",
    "u_grid", "a_grid", "out", "dump_spectral",
];

/// Parses `key = value` lines; `#` starts a comment, `-` in keys reads as `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key `{key}`", i + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

fn pick<T: FromStr>(flag: Option<T>, file: &BTreeMap<String, String>, key: &str, default: T) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    match file.get(key) {
        Some(s) => s
            .parse()
            .map_err(|_| CliError::Usage(format!("config key `{key}`: cannot parse `{s}`"))),
        None => Ok(default),
    }
}

impl RunConfig {
    pub fn resolve(flags: &Overrides) -> Result<Self, CliError> {
        let file_values = match &flags.config {
            Some(path) => read_config(path)?,
            None => BTreeMap::new(),
        };
        let f = &file_values;
        let def = RunConfig::default();
        let h = match flags.h {
            Some(h) => Some(h),
            None => f
                .get("h")
                .map(|s| s.parse().map_err(|_| CliError::Usage(format!("config key `h`: cannot parse `{s}`"))))
                .transpose()?,
        };
        let out = flags.out.clone().or_else(|| f.get("out").map(PathBuf::from));
        let cfg = RunConfig {
            d: pick(flags.d, f, "d", def.d)?,
            node_count: pick(flags.node_count, f, "node_count", def.node_count)?,
            m: pick(flags.m, f, "m", def.m)?,
            n: pick(flags.n, f, "n", def.n)?,
            trials: pick(flags.trials, f, "trials", def.trials)?,
            eps: pick(flags.eps, f, "eps", def.eps)?,
            seed: pick(flags.seed, f, "seed", def.seed)?,
            workers: pick(flags.workers, f, "workers", def.workers)?,
            u: pick(flags.u, f, "u", def.u)?,
            a: pick(flags.a, f, "a", def.a)?,
            rho: pick(flags.rho, f, "rho", def.rho)?,
            h,
            k: pick(flags.k, f, "k", def.k)?,
            buffer: pick(flags.buffer, f, "buffer", def.buffer)?,
            u_grid: pick(flags.u_grid.clone(), f, "u_grid", def.u_grid)?,
            a_grid: pick(flags.a_grid.clone(), f, "a_grid", def.a_grid)?,
            out,
            dump_spectral: flags.dump_spectral || pick(None, f, "dump_spectral", false)?,
            config_file: flags.config.clone(),
            file_values,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.d < 2 {
            return bad(format!("d must be at least 2, got {}", self.d));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if !(self.u >= 0.0) {
            return bad(format!("u must be non-negative, got {}", self.u));
        }
        if !self.a.is_finite() {
            return bad(format!("a must be finite, got {}", self.a));
        }
        parse_grid(&self.u_grid)?;
        parse_grid(&self.a_grid)?;
        Ok(())
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// `start:end:count` as `count` evenly spaced values including both ends.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("grid `{spec}`: expected start:end:count"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [s, e, c] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = s.trim().parse().map_err(|_| bad())?;
    let end: f64 = e.trim().parse().map_err(|_| bad())?;
    let count: usize = c.trim().parse().map_err(|_| bad())?;
    if count == 0 || !start.is_finite() || !end.is_finite() {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    Ok((0..count)
        .map(|i| start + (end - start) * i as f64 / (count - 1) as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let dir = std::env::temp_dir().join(format!("vsperc-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# demo\nd = 3\ntrials=500\nnode-count = 800 # finer\n").unwrap();
        let flags = Overrides {
            config: Some(path.clone()),
            trials: Some(42),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&flags).unwrap();
        assert_eq!((cfg.d, cfg.trials, cfg.node_count, cfg.seed), (3, 42, 800, 0));
        assert_eq!(cfg.file_values.get("trials").map(String::as_str), Some("500"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn rejects_unknown_keys_and_bad_grids() {
        assert!(parse_config("colour = red").is_err());
        assert!(parse_config("d 3").is_err());
        assert!(parse_grid("0:1").is_err());
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("-1:-1:1").unwrap(), vec![-1.0]);
    }
}
