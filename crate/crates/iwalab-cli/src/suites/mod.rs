//! The identity suites. Each one is a pure function of the environment and
//! returns its checks in a fixed order.

mod descent;
mod lattice;
mod local;
mod measure;
mod reps;
mod symbolic;

use std::time::Instant;

use iwalab::tower::{standard_split_tower, TowerSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config::{ConfigError, RunConfig};
use crate::report::{hex_digest, Check, Report, SuiteResult};

pub use descent::{descent_case, DescentCase};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("tower file {path}: {msg}")]
    Tower { path: String, msg: String },
    #[error("{0}")]
    Usage(String),
}

/// Everything a suite may read.
pub struct Env {
    pub cfg: RunConfig,
    pub tower: TowerSpec,
}

impl Env {
    /// Loads the tower file if any (recording its digest in the config), or
    /// builds the standard split tower with two levels.
    pub fn load(mut cfg: RunConfig) -> Result<Env, CliError> {
        cfg.validate()?;
        let tower = match &cfg.tower {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                let t = TowerSpec::parse(&text).map_err(|e| CliError::Tower { path: path.clone(), msg: e.to_string() })?;
                if t.p != cfg.p {
                    return Err(CliError::Tower { path: path.clone(), msg: format!("tower is for p = {}, the run uses p = {}", t.p, cfg.p) });
                }
                if let Some(d) = t.d_k {
                    cfg.d_k = d;
                }
                cfg.tower_sha256 = Some(hex_digest(text.as_bytes()));
                t
            }
            None => standard_split_tower(cfg.p, Some(cfg.d_k), 2),
        };
        Ok(Env { cfg, tower })
    }

    /// Deterministic per-suite generator.
    pub fn rng(&self, suite: &str) -> ChaCha8Rng {
        // FNV-1a of the suite name, mixed with the configured seed
        let h = suite.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
        ChaCha8Rng::seed_from_u64(h ^ self.cfg.seed)
    }
}

pub fn run_suite(name: &str, env: &Env) -> SuiteResult {
    match name {
        "epsilon" => local::epsilon(env),
        "sigma-delta" => local::sigma_delta(env),
        "ratio" => symbolic::ratio(env),
        "weight" => symbolic::weight(env),
        "l-omega" => symbolic::l_omega(env),
        "lattice" => lattice::lattice(env),
        "measure" => measure::extension(env),
        "idempotent" => measure::idempotent(env),
        "katz" => measure::katz(env),
        "descent" => descent::descent(env),
        "reps" => reps::reps(env),
        other => {
            let mut s = SuiteResult::new(other);
            s.push(Check::error("dispatch", format!("unknown suite `{other}`")));
            s
        }
    }
}

/// Runs the selected suites concurrently and merges them in configuration order.
pub fn run_selected(env: &Env, names: &[String]) -> Vec<(SuiteResult, u128)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|n| {
                scope.spawn(move || {
                    let t = Instant::now();
                    let r = run_suite(n, env);
                    (r, t.elapsed().as_millis())
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(names)
            .map(|(h, n)| {
                h.join().unwrap_or_else(|_| {
                    let mut s = SuiteResult::new(n);
                    s.push(Check::error("suite", "panicked"));
                    (s, 0)
                })
            })
            .collect()
    })
}

pub fn verify(cfg: RunConfig) -> Result<Report, CliError> {
    let env = Env::load(cfg)?;
    let names = env.cfg.suites.clone();
    let results = run_selected(&env, &names);
    Ok(Report::new("verify", env.cfg, results))
}

/// Error check naming the suite that needs a missing piece of tower data.
fn missing(suite: &str, what: &str) -> Check {
    Check::error("tower", format!("the tower lacks {what}, required by suite `{suite}`"))
}

/// Folds many samples into one check: the first failure keeps both sides.
struct Sampler {
    name: String,
    count: usize,
    failure: Option<Check>,
}

impl Sampler {
    fn new(name: impl Into<String>) -> Self {
        Sampler { name: name.into(), count: 0, failure: None }
    }

    fn record(&mut self, ok: bool, lhs: impl FnOnce() -> String, rhs: impl FnOnce() -> String, at: impl FnOnce() -> String) {
        self.count += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(Check::fail(self.name.clone(), lhs(), rhs()).with_detail(format!("sample {}: {}", self.count, at())));
        }
    }

    fn error(&mut self, e: impl std::fmt::Display) {
        self.count += 1;
        if self.failure.is_none() {
            self.failure = Some(Check::error(self.name.clone(), format!("sample {}: {e}", self.count)));
        }
    }

    fn finish(self) -> Check {
        let n = self.count;
        self.failure.unwrap_or_else(|| Check::pass(self.name).with_detail(format!("{n} samples")))
    }
}
