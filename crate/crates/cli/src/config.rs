//! Flat `key = value` run configuration.
//!
//! Values are resolved as command-line flag, then config file, then built-in
//! default.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rls_refine::rollout::FeedbackMode;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "anchors",
    "beta",
    "dt",
    "eps",
    "feedback",
    "forgetting",
    "goal_cov_scale",
    "horizon",
    "lag",
    "n",
    "noise",
    "predictor",
    "predictors",
    "refine",
    "ridge",
    "rotate",
    "scenario",
    "seed",
    "solver",
    "split",
    "stride",
    "tau",
    "window",
];

#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
    origin: String,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        FileConfig::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Invalid(format!(
                    "{origin}:{}: expected `key = value`",
                    i + 1
                )));
            };
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::Invalid(format!(
                    "{origin}:{}: unknown key `{key}` (known: {})",
                    i + 1,
                    KEYS.join(", ")
                )));
            }
            let value = value.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), value).is_some() {
                return Err(CliError::Invalid(format!("{origin}:{}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(FileConfig {
            values,
            origin: origin.to_string(),
        })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        debug_assert!(KEYS.contains(&key), "unregistered key {key}");
        self.values
            .get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Invalid(format!("{}: key `{key}`: {e}", self.origin)))
            })
            .transpose()
    }

    /// Flag, else file value, else `default`.
    pub fn resolve<T>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    pub fn resolve_opt<T>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

/// Comma-separated list, e.g. `5,10,15`.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T> FromStr for List<T>
where
    T: FromStr,
    T::Err: fmt::Display,
{
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let items = s
            .split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(|p| p.parse::<T>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<Vec<T>, String>>()?;
        if items.is_empty() {
            return Err("empty list".into());
        }
        Ok(List(items))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Switch(pub bool);

impl FromStr for Switch {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "on" | "true" | "yes" | "1" => Ok(Switch(true)),
            "off" | "false" | "no" | "0" => Ok(Switch(false)),
            other => Err(format!("expected on or off, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Feedback(pub FeedbackMode);

impl FromStr for Feedback {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fused" => Ok(Feedback(FeedbackMode::Fused)),
            "raw" => Ok(Feedback(FeedbackMode::Raw)),
            other => Err(format!("expected fused or raw, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverName {
    Batch,
    Rls,
}

impl FromStr for SolverName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "batch" => Ok(SolverName::Batch),
            "rls" => Ok(SolverName::Rls),
            other => Err(format!("expected batch or rls, got `{other}`")),
        }
    }
}
