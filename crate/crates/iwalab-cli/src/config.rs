//! Run configuration: a plain `key = value` file, overridden by flags.

use std::fmt;
use std::str::FromStr;

use iwalab::cmlattice::Mode;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

/// Every suite, in report order.
pub const SUITES: [&str; 11] = [
    "epsilon",
    "sigma-delta",
    "ratio",
    "weight",
    "l-omega",
    "lattice",
    "measure",
    "idempotent",
    "katz",
    "descent",
    "reps",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Additive {
    #[serde(rename = "psi(-x)")]
    PsiNeg,
    #[serde(rename = "psi(x)")]
    Psi,
}

impl FromStr for Additive {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "psi(-x)" => Ok(Additive::PsiNeg),
            "psi(x)" => Ok(Additive::Psi),
            _ => Err(format!("additive convention must be psi(-x) or psi(x), got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FrobDirection {
    Arithmetic,
    Geometric,
}

impl FromStr for FrobDirection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "arithmetic" => Ok(FrobDirection::Arithmetic),
            "geometric" => Ok(FrobDirection::Geometric),
            _ => Err(format!("frobenius must be arithmetic or geometric, got `{s}`")),
        }
    }
}

fn mode_name<S: serde::Serializer>(m: &Mode, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(m.name())
}

/// The resolved configuration, embedded verbatim in every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    /// Working prime for tower-based suites.
    pub p: u64,
    /// Primes for the local-constant suites.
    pub local_primes: Vec<u64>,
    pub d_k: u64,
    /// p-adic precision; `None` lets each suite use its own default.
    pub precision: Option<u32>,
    pub tower: Option<String>,
    pub tower_sha256: Option<String>,
    pub suites: Vec<String>,
    pub additive: Additive,
    pub frobenius: FrobDirection,
    #[serde(serialize_with = "mode_name")]
    pub lattice_mode: Mode,
    pub seed: u64,
    pub out: Option<String>,
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 5,
            local_primes: vec![5, 7],
            d_k: 4,
            precision: None,
            tower: None,
            tower_sha256: None,
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            additive: Additive::PsiNeg,
            frobenius: FrobDirection::Arithmetic,
            lattice_mode: Mode::Maximal,
            seed: 0,
            out: None,
            trace: false,
        }
    }
}

impl RunConfig {
    /// Applies one key. Errors are plain messages; the caller adds positions.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let num = |v: &str| v.parse::<u64>().map_err(|_| format!("`{v}` is not a nonnegative integer"));
        let list = |v: &str| v.split([' ', ',']).filter(|s| !s.is_empty()).map(str::to_string).collect::<Vec<_>>();
        match key {
            "p" => self.p = num(value)?,
            "local_primes" => self.local_primes = list(value).iter().map(|s| num(s)).collect::<Result<_, _>>()?,
            "d_K" | "d_k" => self.d_k = num(value)?,
            "precision" => self.precision = Some(num(value)? as u32),
            "tower" => self.tower = Some(value.to_string()),
            "suites" => self.set_suites(&list(value))?,
            "additive" => self.additive = value.parse()?,
            "frobenius" => self.frobenius = value.parse()?,
            "lattice_mode" | "mode" => self.lattice_mode = value.parse()?,
            "seed" => self.seed = num(value)?,
            "out" => self.out = Some(value.to_string()),
            "trace" => {
                self.trace = match value {
                    "true" | "1" | "yes" => true,
                    "false" | "0" | "no" => false,
                    _ => return Err(format!("trace must be true or false, got `{value}`")),
                }
            }
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn set_suites(&mut self, names: &[String]) -> Result<(), String> {
        let mut out = Vec::new();
        for n in names {
            if n == "all" {
                out.extend(SUITES.iter().map(|s| s.to_string()));
            } else if SUITES.contains(&n.as_str()) {
                out.push(n.clone());
            } else {
                return Err(format!("unknown suite `{n}` (known: {})", SUITES.join(", ")));
            }
        }
        // report order is fixed, duplicates dropped
        self.suites = SUITES.iter().filter(|s| out.iter().any(|o| o == *s)).map(|s| s.to_string()).collect();
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let prime = |q: u64| q >= 5 && iwalab::nt::is_prime(q);
        if !prime(self.p) {
            return Err(ConfigError::Invalid(format!("p = {} must be a prime >= 5", self.p)));
        }
        if let Some(q) = self.local_primes.iter().find(|&&q| !prime(q)) {
            return Err(ConfigError::Invalid(format!("local prime {q} must be a prime >= 5")));
        }
        if matches!(self.precision, Some(0)) {
            return Err(ConfigError::Invalid("precision must be positive".into()));
        }
        Ok(())
    }

    pub fn precision_or(&self, default: u32) -> u32 {
        self.precision.unwrap_or(default)
    }
}

/// Parses a config file on top of the defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            let col = line.len() - line.trim_start().len() + 1;
            return Err(ConfigError::Parse { line: i + 1, col, msg: "expected `key = value`".into() });
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        let key_col = line.len() - line.trim_start().len() + 1;
        if key.is_empty() {
            return Err(ConfigError::Parse { line: i + 1, col: key_col, msg: "empty key".into() });
        }
        let value_col = eq + 2 + (line[eq + 1..].len() - line[eq + 1..].trim_start().len());
        cfg.set(key, value).map_err(|msg| {
            let col = if msg.starts_with("unknown key") { key_col } else { value_col };
            ConfigError::Parse { line: i + 1, col, msg }
        })?;
    }
    Ok(cfg)
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = parse_config("# comment\np = 7\nsuites = ratio, epsilon\n\nmode = paper-literal\n").unwrap();
        assert_eq!(cfg.p, 7);
        assert_eq!(cfg.suites, vec!["epsilon", "ratio"]);
        assert_eq!(cfg.lattice_mode, Mode::PaperLiteral);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let err = parse_config("p = 5\n  colour = blue\n").unwrap_err();
        assert_eq!(err, ConfigError::Parse { line: 2, col: 3, msg: "unknown key `colour`".into() });
        let err = parse_config("p = five").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, col: 5, .. }), "{err}");
        assert!(parse_config("just words").is_err());
        assert!(parse_config("suites = everything").is_err());
    }

    #[test]
    fn empty_suite_list() {
        let cfg = parse_config("suites =").unwrap();
        assert!(cfg.suites.is_empty());
    }
}
