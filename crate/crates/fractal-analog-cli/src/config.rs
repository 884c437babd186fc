//! Flat `key = value` run configuration with strict key checking.
//!
//! Unknown keys are rejected with their line number; command-line flags
//! override file values; every lookup records the final value so the output
//! header can echo the fully-resolved configuration.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;

use crate::CliError;

/// Every key any subcommand understands.
const KNOWN_KEYS: &[&str] = &[
    "w",
    "depth",
    "planes_per_level",
    "stages",
    "block_length",
    "code",
    "trials",
    "seed",
    "genie",
    "snr_db_min",
    "snr_db_max",
    "snr_db_step",
    "snr_grid_db",
    "repeat",
    "grouping",
    "iterations",
    "interleaver_seed",
    "info_length",
    "decode_snr_db",
    "channel",
    "amplitude",
    "gu_halfwidth",
    "staircase_gamma",
    "staircase_k_max",
    "x2",
    "x3",
    "stretch_depth",
    "stretch_sweep_points",
    "stretch_mc_points",
    "stretch_deltas",
];

#[derive(Debug, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::new(format!(
                    "config line {}: expected `key = value`, got {raw:?}",
                    idx + 1
                )));
            };
            let key = key.trim().to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::new(format!(
                    "config line {}: unknown key {key:?}",
                    idx + 1
                )));
            }
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::new(format!(
                    "config line {}: duplicate key {key:?}",
                    idx + 1
                )));
            }
        }
        Ok(Self {
            values,
            resolved: BTreeMap::new(),
        })
    }

    /// Force a value (command-line flag override).
    pub fn set(&mut self, key: &str, value: impl Display) {
        debug_assert!(KNOWN_KEYS.contains(&key));
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn record(&mut self, key: &str, value: impl Display) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    fn raw(&self, key: &str) -> Option<String> {
        self.values.get(key).cloned()
    }

    pub fn get_str(&mut self, key: &str, default: &str) -> String {
        let v = self.raw(key).unwrap_or_else(|| default.to_string());
        self.record(key, &v);
        v
    }

    pub fn get_f64(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = match self.raw(key) {
            Some(s) => s
                .parse::<f64>()
                .map_err(|_| CliError::new(format!("config key {key}: {s:?} is not a number")))?,
            None => default,
        };
        self.record(key, v);
        Ok(v)
    }

    pub fn get_usize(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        let v = match self.raw(key) {
            Some(s) => s.parse::<usize>().map_err(|_| {
                CliError::new(format!("config key {key}: {s:?} is not a nonnegative integer"))
            })?,
            None => default,
        };
        self.record(key, v);
        Ok(v)
    }

    pub fn get_u64(&mut self, key: &str, default: u64) -> Result<u64, CliError> {
        let v = match self.raw(key) {
            Some(s) => s.parse::<u64>().map_err(|_| {
                CliError::new(format!("config key {key}: {s:?} is not a nonnegative integer"))
            })?,
            None => default,
        };
        self.record(key, v);
        Ok(v)
    }

    pub fn get_bool(&mut self, key: &str, default: bool) -> Result<bool, CliError> {
        let v = match self.raw(key) {
            Some(s) => match s.as_str() {
                "true" | "1" | "yes" => true,
                "false" | "0" | "no" => false,
                other => {
                    return Err(CliError::new(format!(
                        "config key {key}: {other:?} is not a boolean"
                    )))
                }
            },
            None => default,
        };
        self.record(key, v);
        Ok(v)
    }

    /// Comma-separated list of reals.
    pub fn get_f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let v = match self.raw(key) {
            Some(s) => s
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|_| {
                        CliError::new(format!("config key {key}: {tok:?} is not a number"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => default.to_vec(),
        };
        self.record(
            key,
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","),
        );
        Ok(v)
    }

    /// The SNR grid in dB: an explicit `snr_grid_db` list wins over the
    /// min/max/step triple.
    pub fn snr_grid_db(&mut self, defaults: (f64, f64, f64)) -> Result<Vec<f64>, CliError> {
        if self.contains("snr_grid_db") {
            let grid = self.get_f64_list("snr_grid_db", &[])?;
            if grid.is_empty() {
                return Err(CliError::new("snr_grid_db is empty"));
            }
            return Ok(grid);
        }
        let min = self.get_f64("snr_db_min", defaults.0)?;
        let max = self.get_f64("snr_db_max", defaults.1)?;
        let step = self.get_f64("snr_db_step", defaults.2)?;
        if !(step > 0.0) || max < min {
            return Err(CliError::new(
                "need snr_db_step > 0 and snr_db_max >= snr_db_min",
            ));
        }
        let mut grid = Vec::new();
        let mut v = min;
        while v <= max + 1e-9 {
            grid.push(v);
            v += step;
        }
        Ok(grid)
    }

    /// Fully-resolved `key = value` lines for the output header, plus a hash
    /// over them.
    pub fn echo(&self) -> (Vec<String>, u64) {
        let lines: Vec<String> = self
            .resolved
            .iter()
            .map(|(k, v)| format!("{k} = {v}"))
            .collect();
        let mut hash = 0xcbf2_9ce4_8422_2325u64;
        for line in &lines {
            for &b in line.as_bytes() {
                hash ^= b as u64;
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
            hash ^= b'\n' as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
        (lines, hash)
    }
}
