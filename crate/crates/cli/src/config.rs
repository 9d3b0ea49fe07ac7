//! JSON configuration. Keys mirror the long flag names; a flag given on the
//! command line wins over the same key in the file.

use anyhow::{anyhow, Context, Result};
use clap::ValueEnum;
use delaylog::sweep::SweepTarget;
use delaylog::{parse_complex, Complex64};
use serde::{Deserialize, Deserializer};
use std::path::{Path, PathBuf};

/// Complex number given as `"a+bi"`, a bare real number, or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl std::str::FromStr for ComplexArg {
    type Err = delaylog::parse::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_complex(s).map(ComplexArg)
    }
}

impl<'de> Deserialize<'de> for ComplexArg {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Real(f64),
            Pair([f64; 2]),
        }
        let z = match Raw::deserialize(d)? {
            Raw::Text(s) => parse_complex(&s).map_err(serde::de::Error::custom)?,
            Raw::Real(x) => Complex64::new(x, 0.0),
            Raw::Pair([re, im]) => Complex64::new(re, im),
        };
        if !z.is_finite() {
            return Err(serde::de::Error::custom("complex value must be finite"));
        }
        Ok(ComplexArg(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Alpha,
    Beta,
}

impl From<Target> for SweepTarget {
    fn from(t: Target) -> Self {
        match t {
            Target::Alpha => SweepTarget::Alpha,
            Target::Beta => SweepTarget::Beta,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub alpha: Option<ComplexArg>,
    pub beta: Option<ComplexArg>,
    pub z0: Option<ComplexArg>,
    #[serde(rename = "z-1")]
    pub z_minus1: Option<ComplexArg>,
    pub iters: Option<usize>,
    pub transient: Option<usize>,
    pub guard: Option<f64>,
    pub tol_hyp: Option<f64>,
    pub p_max: Option<usize>,
    pub window: Option<usize>,
    pub match_tol: Option<f64>,
    pub seeds: Option<usize>,
    pub seed: Option<u64>,
    pub quick: Option<bool>,
    pub lyapunov_steps: Option<usize>,
    pub chaos_tol: Option<f64>,
    pub renorm: Option<usize>,
    pub trace: Option<PathBuf>,
    pub target: Option<Target>,
    pub fixed: Option<ComplexArg>,
    pub re_min: Option<f64>,
    pub re_max: Option<f64>,
    pub re_steps: Option<usize>,
    pub im_min: Option<f64>,
    pub im_max: Option<f64>,
    pub im_steps: Option<usize>,
    pub workers: Option<usize>,
    pub max_cells: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid config file")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_json(&text)
    }
}

pub fn require<T: Clone>(value: &Option<T>, flag: &str) -> Result<T> {
    value.clone().ok_or_else(|| anyhow!("missing --{flag} (flag or config key)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_values_in_three_spellings() {
        let c = Config::from_json(r#"{"alpha": "1+2i", "beta": 0.5, "z0": [0.1, -0.2], "z-1": "-i"}"#).unwrap();
        assert_eq!(c.alpha.unwrap().0, Complex64::new(1.0, 2.0));
        assert_eq!(c.beta.unwrap().0, Complex64::new(0.5, 0.0));
        assert_eq!(c.z0.unwrap().0, Complex64::new(0.1, -0.2));
        assert_eq!(c.z_minus1.unwrap().0, Complex64::new(0.0, -1.0));
    }

    #[test]
    fn kebab_case_keys_and_unknown_keys() {
        let c = Config::from_json(r#"{"p-max": 8, "match-tol": 1e-9, "format": "csv", "target": "beta"}"#).unwrap();
        assert_eq!(c.p_max, Some(8));
        assert_eq!(c.match_tol, Some(1e-9));
        assert_eq!(c.format, Some(Format::Csv));
        assert_eq!(c.target, Some(Target::Beta));
        assert!(Config::from_json(r#"{"p_max": 8}"#).is_err());
        assert!(Config::from_json(r#"{"alpha": "1+"}"#).is_err());
    }
}
