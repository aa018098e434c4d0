//! Scenario configuration: a small key/value text format with sections.
//!
//! Scalars are written as decimal strings or as expressions `exp(k)`,
//! `arcsinh(k)`, `sqrt(k)`, parsed directly at the target precision so that
//! decimal literals never round through binary64.
//!
//! ```text
//! scenario = fish
//! precision_bits = 1456
//! q_max = 20
//! word_max_len = 14
//! out_dir = out/fish
//!
//! [fish]
//! a = 6
//! b = 8
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("missing required key `{0}`")]
    Missing(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown scenario `{0}` (expected pants, hexagon, ngon, fish, custom)")]
    UnknownScenario(String),
    #[error("precision_bits must be at least 256 (got {0})")]
    PrecisionTooLow(usize),
    #[error("parameter `{0}` must be positive")]
    NonPositive(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Pants,
    Hexagon,
    Ngon,
    Fish,
    Custom,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Pants => "pants",
            ScenarioKind::Hexagon => "hexagon",
            ScenarioKind::Ngon => "ngon",
            ScenarioKind::Fish => "fish",
            ScenarioKind::Custom => "custom",
        }
    }
}

/// Raw parsed config: sectioned key -> value strings, evaluated lazily at
/// the target precision.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<RawConfig, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = name.trim().to_string();
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax(lineno + 1));
            };
            let key = if section.is_empty() {
                k.trim().to_string()
            } else {
                format!("{section}.{}", k.trim())
            };
            entries.insert(key, v.trim().to_string());
        }
        Ok(RawConfig { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|s| s.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    pub fn set(&mut self, key: &str, value: String) {
        self.entries.insert(key.to_string(), value);
    }

    /// Deterministic echo of the effective configuration.
    pub fn echo(&self) -> Vec<(String, String)> {
        self.entries.iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

/// Evaluates a scalar expression at the target precision:
/// decimal literal | exp(expr) | arcsinh(expr) | sqrt(expr) | -expr.
pub fn eval_scalar(expr: &str, prec: usize) -> Result<Scalar, ConfigError> {
    let e = expr.trim();
    let fail = |reason: &str| ConfigError::Invalid { key: e.to_string(), reason: reason.into() };
    if let Some(inner) = e.strip_prefix('-') {
        return Ok(-&eval_scalar(inner, prec)?);
    }
    for (name, f) in [
        ("exp", Scalar::exp as fn(&Scalar) -> Scalar),
        ("arcsinh", Scalar::asinh),
        ("asinh", Scalar::asinh),
        ("sqrt", Scalar::sqrt),
    ] {
        if let Some(rest) = e.strip_prefix(name) {
            let rest = rest.trim();
            if let Some(inner) = rest.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
                let v = eval_scalar(inner, prec)?;
                return Ok(f(&v));
            }
            return Err(fail("expected parenthesized argument"));
        }
    }
    if !e.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-')) {
        return Err(fail("not a decimal literal or known expression"));
    }
    Scalar::from_decimal(e, prec).map_err(|err| fail(&err.to_string()))
}

/// Fully resolved scenario configuration.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub precision_bits: usize,
    pub q_max: i64,
    pub word_max_len: usize,
    pub out_dir: PathBuf,
    pub raw: RawConfig,
}

impl ScenarioConfig {
    pub fn from_raw(raw: RawConfig) -> Result<ScenarioConfig, ConfigError> {
        let scenario = match raw.require("scenario")? {
            "pants" => ScenarioKind::Pants,
            "hexagon" => ScenarioKind::Hexagon,
            "ngon" => ScenarioKind::Ngon,
            "fish" => ScenarioKind::Fish,
            "custom" => ScenarioKind::Custom,
            other => return Err(ConfigError::UnknownScenario(other.to_string())),
        };
        let parse_usize = |key: &str, default: usize| -> Result<usize, ConfigError> {
            match raw.get(key) {
                None => Ok(default),
                Some(v) => v.parse().map_err(|_| ConfigError::Invalid {
                    key: key.into(),
                    reason: "expected an integer".into(),
                }),
            }
        };
        let parse_i64 = |key: &str, default: i64| -> Result<i64, ConfigError> {
            match raw.get(key) {
                None => Ok(default),
                Some(v) => v.parse().map_err(|_| ConfigError::Invalid {
                    key: key.into(),
                    reason: "expected an integer".into(),
                }),
            }
        };
        let env_default = std::env::var("LIMITCONE_PRECISION_BITS")
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(256);
        let precision_bits = parse_usize("precision_bits", env_default)?;
        if precision_bits < 256 {
            return Err(ConfigError::PrecisionTooLow(precision_bits));
        }
        let q_max = parse_i64("q_max", 20)?;
        if q_max < 1 {
            return Err(ConfigError::NonPositive("q_max".into()));
        }
        let word_max_len = parse_usize(
            "word_max_len",
            match scenario {
                ScenarioKind::Hexagon => 10,
                ScenarioKind::Ngon => 6,
                _ => 14,
            },
        )?;
        if word_max_len < 1 {
            return Err(ConfigError::NonPositive("word_max_len".into()));
        }
        let out_dir = PathBuf::from(raw.get("out_dir").unwrap_or("out"));
        Ok(ScenarioConfig { scenario, precision_bits, q_max, word_max_len, out_dir, raw })
    }

    pub fn parse(text: &str) -> Result<ScenarioConfig, ConfigError> {
        ScenarioConfig::from_raw(RawConfig::parse(text)?)
    }

    /// A positive scalar parameter from the scenario's section.
    pub fn scalar_param(&self, key: &str, prec: usize) -> Result<Scalar, ConfigError> {
        let full = format!("{}.{key}", self.scenario.name());
        let v = eval_scalar(self.raw.require(&full)?, prec)?;
        if !v.is_positive() {
            return Err(ConfigError::NonPositive(full));
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_sections_and_values() {
        let cfg = ScenarioConfig::parse(
            "scenario = fish\nprecision_bits = 512\nq_max = 7\n# comment\n[fish]\na = 6\nb = exp(2)\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario, ScenarioKind::Fish);
        assert_eq!(cfg.precision_bits, 512);
        assert_eq!(cfg.q_max, 7);
        let a = cfg.scalar_param("a", 256).unwrap();
        assert!((&a - &Scalar::from_u64(6, 256)).is_zero());
        let b = cfg.scalar_param("b", 256).unwrap();
        let want = Scalar::from_u64(2, 256).exp();
        assert!((&b - &want).abs() < Scalar::two_pow(-240, 256));
    }

    #[test]
    fn scalar_expressions() {
        let v = eval_scalar("arcsinh(1)", 256).unwrap();
        assert!((&v - &Scalar::one(256).asinh()).is_zero());
        let w = eval_scalar("1e-4", 320).unwrap();
        assert_eq!(w.precision(), 320);
        assert!(eval_scalar("nope", 256).is_err());
        let neg = eval_scalar("-2.5", 256).unwrap();
        assert!(neg.is_negative());
    }

    #[test]
    fn rejects_low_precision_and_bad_scenario() {
        assert!(matches!(
            ScenarioConfig::parse("scenario = fish\nprecision_bits = 128\n"),
            Err(ConfigError::PrecisionTooLow(128))
        ));
        assert!(matches!(
            ScenarioConfig::parse("scenario = torus\n"),
            Err(ConfigError::UnknownScenario(_))
        ));
        assert!(matches!(ScenarioConfig::parse("bad line\n"), Err(ConfigError::Syntax(1))));
    }
}
