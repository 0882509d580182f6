//! Run configuration and its flat `key = value` file format.
//!
//! ```text
//! # two brands, a hundred customers
//! N = 2
//! K = 100
//! M = 10
//! mode = hierarchy
//! seed = 42
//! shop_counts = 2, 3
//! ```
//!
//! Keys are exactly the field names listed in [`KEYS`]. `N`, `K`, `M`,
//! `mode` and `seed` are required; everything else falls back to the
//! values in [`SimConfig::new`].

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::dynamics::{KernelParams, Mode};
use crate::error::{Result, SimError};

/// Every key the config file accepts.
pub const KEYS: &[&str] = &[
    "N",
    "K",
    "M",
    "mode",
    "p_copy",
    "p_unknown",
    "leader_count",
    "leader_pupils",
    "aligned_leader_brand",
    "shop_counts",
    "shop_teach_rate",
    "epsilon",
    "max_sweeps",
    "record_every",
    "seed",
];

const REQUIRED: &[&str] = &["N", "K", "M", "mode", "seed"];

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// `N`
    pub brands: usize,
    /// `K`
    pub customers: usize,
    /// `M`
    pub needs: usize,
    pub mode: Mode,
    pub p_copy: f64,
    pub p_unknown: f64,
    pub leader_count: usize,
    pub leader_pupils: usize,
    pub aligned_leader_brand: Option<usize>,
    pub shop_counts: Vec<u32>,
    pub shop_teach_rate: f64,
    pub epsilon: f64,
    pub max_sweeps: u64,
    pub record_every: u64,
    pub seed: u64,
}

impl SimConfig {
    /// A configuration with every optional key at its default.
    pub fn new(brands: usize, customers: usize, needs: usize) -> Self {
        SimConfig {
            brands,
            customers,
            needs,
            mode: Mode::Equality,
            p_copy: 0.5,
            p_unknown: 0.25,
            leader_count: 0,
            leader_pupils: 0,
            aligned_leader_brand: None,
            shop_counts: vec![1; brands],
            shop_teach_rate: 0.0,
            epsilon: 1e-12,
            max_sweeps: 10_000,
            record_every: 1,
            seed: 0,
        }
    }

    pub fn kernel_params(&self) -> KernelParams {
        KernelParams {
            p_copy: self.p_copy,
            leader_pupils: self.leader_pupils,
            shop_teach_rate: self.shop_teach_rate,
        }
    }

    /// Checks every invariant, naming the first offending key.
    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, key: &str, msg: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(SimError::config_key(key, msg))
            }
        }
        check(self.brands >= 1, "N", "must be >= 1")?;
        check(self.customers >= 2, "K", "must be >= 2")?;
        check(self.needs >= 1, "M", "must be >= 1")?;
        check(is_probability(self.p_copy), "p_copy", "must lie in [0, 1]")?;
        check(
            is_probability(self.p_unknown),
            "p_unknown",
            "must lie in [0, 1]",
        )?;
        check(
            self.leader_count < self.customers,
            "leader_count",
            "must be smaller than K",
        )?;
        check(
            self.leader_pupils < self.customers,
            "leader_pupils",
            "must be at most K - 1",
        )?;
        if let Some(b) = self.aligned_leader_brand {
            check(
                b < self.brands,
                "aligned_leader_brand",
                "must be a brand index below N",
            )?;
        }
        check(
            self.shop_counts.len() == self.brands,
            "shop_counts",
            "must list exactly N shop counts",
        )?;
        check(
            self.shop_counts.iter().all(|&s| s >= 1),
            "shop_counts",
            "every shop count must be >= 1",
        )?;
        check(
            self.shop_teach_rate.is_finite() && self.shop_teach_rate >= 0.0,
            "shop_teach_rate",
            "must be a finite non-negative number",
        )?;
        check(
            self.epsilon.is_finite() && self.epsilon > 0.0,
            "epsilon",
            "must be positive",
        )?;
        check(self.max_sweeps >= 1, "max_sweeps", "must be >= 1")?;
        check(self.record_every >= 1, "record_every", "must be >= 1")?;
        Ok(())
    }

    /// Sets one key from its textual value, without validating the whole
    /// config.
    ///
    /// Changing `N` resizes `shop_counts` (new brands get one shop).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "N" => {
                self.brands = parse(key, value)?;
                self.shop_counts.resize(self.brands, 1);
            }
            "K" => self.customers = parse(key, value)?,
            "M" => self.needs = parse(key, value)?,
            "mode" => self.mode = parse(key, value)?,
            "p_copy" => self.p_copy = parse(key, value)?,
            "p_unknown" => self.p_unknown = parse(key, value)?,
            "leader_count" => self.leader_count = parse(key, value)?,
            "leader_pupils" => self.leader_pupils = parse(key, value)?,
            "aligned_leader_brand" => {
                self.aligned_leader_brand = match value.to_ascii_lowercase().as_str() {
                    "" | "none" => None,
                    _ => Some(parse(key, value)?),
                }
            }
            "shop_counts" => {
                self.shop_counts = value
                    .split(',')
                    .map(|s| parse(key, s.trim()))
                    .collect::<Result<_>>()?
            }
            "shop_teach_rate" => self.shop_teach_rate = parse(key, value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "max_sweeps" => self.max_sweeps = parse(key, value)?,
            "record_every" => self.record_every = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            _ => return Err(SimError::config_key(key, "unknown key")),
        }
        Ok(())
    }
}

fn is_probability(p: f64) -> bool {
    (0.0..=1.0).contains(&p)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| SimError::config_key(key, format!("cannot parse `{value}`")))
}

/// Parses and validates config text.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let mut seen: Vec<&str> = Vec::new();
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            SimError::config(format!("line {}: expected `key = value`", lineno + 1))
        })?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(SimError::config_key(key, "unknown key"));
        }
        if seen.contains(&key) {
            return Err(SimError::config_key(key, "duplicate key"));
        }
        seen.push(key);
        pairs.push((key, value.trim()));
    }
    if let Some(missing) = REQUIRED.iter().find(|k| !seen.contains(k)) {
        return Err(SimError::config_key(missing, "required key is missing"));
    }

    // N first so that the default shop_counts has the right length before
    // an explicit list (if any) replaces it.
    let mut cfg = SimConfig::new(0, 0, 0);
    pairs.sort_by_key(|(k, _)| *k != "N");
    for (key, value) in pairs {
        cfg.set(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<SimConfig> {
    let text = fs::read_to_string(path)?;
    parse_config(&text)
}
