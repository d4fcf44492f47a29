//! Reports: a versioned, deterministic JSON body plus a timing sidecar that
//! is kept out of the checksum.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const SCHEMA: &str = "iwalab-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Error,
    /// Experimental data; never affects the exit status.
    Info,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<String>>,
}

impl Check {
    fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        Check { name: name.into(), verdict, lhs: None, rhs: None, detail: None, trace: None }
    }

    pub fn pass(name: impl Into<String>) -> Self {
        Check::new(name, Verdict::Pass)
    }

    /// A failed identity, with both sides printed exactly.
    pub fn fail(name: impl Into<String>, lhs: impl Into<String>, rhs: impl Into<String>) -> Self {
        Check { lhs: Some(lhs.into()), rhs: Some(rhs.into()), ..Check::new(name, Verdict::Fail) }
    }

    pub fn error(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Check { detail: Some(err.to_string()), ..Check::new(name, Verdict::Error) }
    }

    pub fn info(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check { detail: Some(detail.into()), ..Check::new(name, Verdict::Info) }
    }

    /// Compares two values; both sides are kept only when they differ.
    pub fn compare<T: PartialEq + std::fmt::Display>(name: impl Into<String>, lhs: &T, rhs: &T) -> Self {
        if lhs == rhs {
            Check::pass(name)
        } else {
            Check::fail(name, lhs.to_string(), rhs.to_string())
        }
    }

    pub fn with_detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn with_trace(mut self, t: Vec<String>) -> Self {
        self.trace = Some(t);
        self
    }

    pub fn ok(&self) -> bool {
        matches!(self.verdict, Verdict::Pass | Verdict::Info)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checks: usize,
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
    pub info: usize,
}

impl Tally {
    fn add(&mut self, c: &Check) {
        self.checks += 1;
        match c.verdict {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::Error => self.error += 1,
            Verdict::Info => self.info += 1,
        }
    }

    fn merge(&mut self, o: &Tally) {
        self.checks += o.checks;
        self.pass += o.pass;
        self.fail += o.fail;
        self.error += o.error;
        self.info += o.info;
    }

    pub fn ok(&self) -> bool {
        self.fail == 0 && self.error == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    /// Parameters the suite actually ran with (precision, primes, levels).
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub tally: Tally,
}

impl SuiteResult {
    pub fn new(name: &str) -> Self {
        SuiteResult { name: name.into(), params: BTreeMap::new(), checks: Vec::new(), tally: Tally::default() }
    }

    pub fn param(&mut self, k: &str, v: impl ToString) {
        self.params.insert(k.into(), v.to_string());
    }

    pub fn push(&mut self, c: Check) {
        self.tally.add(&c);
        self.checks.push(c);
    }

    /// Checks whose name starts with `prefix`.
    pub fn matching<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.name.starts_with(prefix))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Body {
    pub schema: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub suites: Vec<SuiteResult>,
    pub summary: Tally,
    pub verdict: &'static str,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub body: Body,
    /// Wall-clock milliseconds per suite; not part of the body.
    pub timing: BTreeMap<String, u128>,
}

impl Report {
    pub fn new(command: &str, config: RunConfig, results: Vec<(SuiteResult, u128)>) -> Self {
        let mut summary = Tally::default();
        let mut timing = BTreeMap::new();
        let mut suites = Vec::new();
        for (s, ms) in results {
            summary.merge(&s.tally);
            timing.insert(s.name.clone(), ms);
            suites.push(s);
        }
        let verdict = if summary.ok() { "pass" } else { "fail" };
        Report { body: Body { schema: SCHEMA, command: command.into(), config, suites, summary, verdict }, timing }
    }

    pub fn ok(&self) -> bool {
        self.body.summary.ok()
    }

    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report body serializes")
    }

    pub fn checksum(&self) -> String {
        hex_digest(self.body_json().as_bytes())
    }

    pub fn sidecar_json(&self) -> String {
        #[derive(Serialize)]
        struct Sidecar<'a> {
            schema: &'static str,
            body_sha256: String,
            wall_ms: &'a BTreeMap<String, u128>,
        }
        let s = Sidecar { schema: SCHEMA, body_sha256: self.checksum(), wall_ms: &self.timing };
        serde_json::to_string_pretty(&s).expect("sidecar serializes")
    }

    /// Body and sidecar in one document, for stdout.
    pub fn combined_json(&self) -> String {
        format!(
            "{{\n\"body\": {},\n\"body_sha256\": \"{}\",\n\"sidecar\": {}\n}}\n",
            self.body_json(),
            self.checksum(),
            self.sidecar_json()
        )
    }
}

pub fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Extracts the body from a document written by [`Report::combined_json`].
pub fn body_of(doc: &str) -> Option<&str> {
    let start = doc.find("\"body\": ")? + "\"body\": ".len();
    let end = doc.find(",\n\"body_sha256\"")?;
    Some(&doc[start..end])
}
