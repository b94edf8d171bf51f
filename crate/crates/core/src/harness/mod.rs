//! Seeded verification suites, check reports and JSON file formats.

pub mod io;
pub mod oracle;
mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Version tag written into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Default tolerance of every named check.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("errors", 0.0),
    ("rep.relator", 1e-8),
    ("fox.identity", 0.0),
    ("pairing.h1_dim", 0.0),
    ("pairing.pants_rank", 0.0),
    ("pairing.torus_rank", 0.0),
    ("pairing.separating_kernel", 0.0),
    // Gaps are reported as 1/gap, so this demands a gap of at least 1e4.
    ("pairing.gap", 1e-4),
    ("pairing.invariance", 1e-8),
    ("pairing.coboundary", 1e-8),
    ("pairing.antisymmetry", 1e-9),
    ("pairing.oracle", 1e-10),
    ("decomposition.defect", 1e-7),
    ("decomposition.drift", 1e-9),
    ("decomposition.additivity", 1e-9),
    ("moment.defect", 1e-5),
    // |ratio − 4|, i.e. the ratio must lie in [3.5, 4.5].
    ("moment.ratio", 0.5),
    ("bd.rotation", 1e-9),
    ("bd.fuchsian", 1e-8),
    ("bd.swap", 1e-9),
    ("aa.darboux", 1e-5),
    ("aa.verify", 1e-5),
    ("aa.commutativity", 1e-6),
    ("aa.preservation", 1e-6),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Overrides the per-suite default trial counts.
    pub trials: Option<usize>,
    pub tolerances: BTreeMap<String, f64>,
    pub n: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            trials: None,
            tolerances: DEFAULT_TOLERANCES
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
            n: 3,
        }
    }
}

impl SuiteConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    /// Sets a tolerance from `name=value`; the name must be in the default table.
    pub fn set_tolerance(&mut self, assignment: &str) -> Result<()> {
        let (name, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected name=value, got {assignment:?}")))?;
        let name = name.trim();
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("tolerance {name}: {value:?} is not a number")))?;
        if !(value >= 0.0) {
            return Err(Error::Config(format!("tolerance {name} must be non-negative")));
        }
        match self.tolerances.get_mut(name) {
            Some(slot) => {
                *slot = value;
                Ok(())
            }
            None => Err(Error::Config(format!("unknown tolerance {name:?}"))),
        }
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(0.0)
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.trials == Some(0) {
            return Err(Error::Config("trials must be positive".into()));
        }
        Ok(())
    }
}

/// ChaCha8 stream for one labelled part of a suite. All randomness derives from the
/// seed; the label picks the stream, so suites do not perturb each other.
pub fn child_rng(seed: u64, label: &str) -> ChaCha8Rng {
    // FNV-1a, fixed so that streams are stable across builds.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, defect: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            defect,
            tolerance,
            pass: defect <= tolerance,
        }
    }

    /// Whether `pass` agrees with `defect ≤ tolerance`.
    pub fn consistent(&self) -> bool {
        self.pass == (self.defect <= self.tolerance)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub config: SuiteConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    /// Sorted by name.
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
    pub environment: Environment,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<40} defect {:.3e}  tol {:.1e}  (lhs {:.6e}, rhs {:.6e})",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.defect,
                c.tolerance,
                c.lhs,
                c.rhs
            )?;
        }
        for e in &self.errors {
            writeln!(f, "error: {e}")?;
        }
        Ok(())
    }
}

/// Accumulates the worst case of each named check.
pub struct Collector<'a> {
    cfg: &'a SuiteConfig,
    checks: BTreeMap<String, CheckRecord>,
    errors: Vec<String>,
}

impl<'a> Collector<'a> {
    pub fn new(cfg: &'a SuiteConfig) -> Self {
        Self {
            cfg,
            checks: BTreeMap::new(),
            errors: Vec::new(),
        }
    }

    /// Records a trial of check `name`; the tolerance is looked up under `tol_key`.
    pub fn record(&mut self, name: &str, tol_key: &str, lhs: f64, rhs: f64, defect: f64) {
        let rec = CheckRecord::new(name, lhs, rhs, defect, self.cfg.tolerance(tol_key));
        match self.checks.get(name) {
            // NaN defects always win so they cannot hide behind a finite one.
            Some(old) if !(defect.is_nan() || defect > old.defect) => {}
            _ => {
                self.checks.insert(name.to_string(), rec);
            }
        }
    }

    pub fn check(&mut self, name: &str, lhs: f64, rhs: f64, defect: f64) {
        self.record(name, name, lhs, rhs, defect);
    }

    /// Records a trial that could not be evaluated.
    pub fn error(&mut self, suite: &str, context: &str, err: Error) {
        self.errors.push(format!("{suite}: {context}: {err}"));
    }

    pub fn finish(mut self, suite: &str) -> Report {
        let count = self.errors.len() as f64;
        self.record("errors", "errors", count, 0.0, count);
        Report {
            schema: SCHEMA_VERSION,
            suite: suite.to_string(),
            checks: self.checks.into_values().collect(),
            errors: self.errors,
            environment: Environment {
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: self.cfg.clone(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Fox,
    Pairing,
    Decomposition,
    Moment,
    Bd,
    ActionAngle,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] = ["fox", "pairing", "decomposition", "moment", "bd", "action-angle", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fox => "fox",
            Suite::Pairing => "pairing",
            Suite::Decomposition => "decomposition",
            Suite::Moment => "moment",
            Suite::Bd => "bd",
            Suite::ActionAngle => "action-angle",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "fox" => Suite::Fox,
            "pairing" => Suite::Pairing,
            "decomposition" => Suite::Decomposition,
            "moment" => Suite::Moment,
            "bd" => Suite::Bd,
            "action-angle" => Suite::ActionAngle,
            "all" => Suite::All,
            other => {
                return Err(Error::Unsupported {
                    what: "suite",
                    name: other.to_string(),
                })
            }
        })
    }
}

/// Runs one suite, or all of them into a single report.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Report> {
    cfg.validate()?;
    let mut col = Collector::new(cfg);
    let parts: &[Suite] = match suite {
        Suite::All => &[
            Suite::Fox,
            Suite::Pairing,
            Suite::Decomposition,
            Suite::Moment,
            Suite::Bd,
            Suite::ActionAngle,
        ],
        _ => std::slice::from_ref(&suite),
    };
    for &s in parts {
        match s {
            Suite::Fox => suites::fox(cfg, &mut col),
            Suite::Pairing => suites::pairing(cfg, &mut col),
            Suite::Decomposition => suites::decomposition(cfg, &mut col),
            Suite::Moment => suites::moment(cfg, &mut col),
            Suite::Bd => suites::bd(cfg, &mut col),
            Suite::ActionAngle => suites::action_angle(cfg, &mut col),
            Suite::All => unreachable!(),
        }
    }
    Ok(col.finish(suite.name()))
}
