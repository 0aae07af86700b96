//! Reproducible randomized property suites. Every suite draws from its own generator,
//! seeded from the run seed and the suite name, so filtering suites does not change
//! the outcome of the others.

mod algebra;
mod diag;
mod models;

pub use models::extension_case;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::field::Field;
use crate::json::field_to_json;

/// Inputs of a verification run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub seed: u64,
    /// Per-field case count applied to every suite; `None` keeps each suite's default.
    pub trials: Option<usize>,
    pub fields: Vec<Field>,
    /// Cap on the dimension of generated models.
    pub max_dim: usize,
    /// Suites to run; empty means all.
    pub suites: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 0, trials: None, fields: vec![Field::Q, Field::Fp(5)], max_dim: 24, suites: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub seed: u64,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }

    pub fn to_json(&self) -> Value {
        let suites: Vec<Value> = self
            .suites
            .iter()
            .map(|s| json!({ "name": s.name, "cases": s.cases, "passed": s.passed(), "failures": s.failures }))
            .collect();
        json!({ "seed": self.seed, "passed": self.passed(), "suites": suites })
    }
}

/// Shared state of one suite: generator, settings and the running tally.
pub(crate) struct Ctx {
    pub rng: ChaCha8Rng,
    pub fields: Vec<Field>,
    pub trials: usize,
    pub max_dim: usize,
    cases: usize,
    failures: Vec<String>,
}

/// Failure lists are truncated so a broken suite cannot flood the report.
const MAX_FAILURES: usize = 20;

impl Ctx {
    pub fn case(&mut self) {
        self.cases += 1;
    }

    pub fn fail(&mut self, msg: String) {
        if self.failures.len() < MAX_FAILURES {
            self.failures.push(msg);
        }
    }

    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    /// Unwraps a result, recording the error as a failure.
    pub fn ok<T>(&mut self, r: crate::Result<T>, what: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(format!("{}: {e}", what()));
                None
            }
        }
    }
}

type SuiteFn = fn(&mut Ctx);

/// Name, per-field default case count, and body of every suite, in report order.
const SUITES: &[(&str, usize, SuiteFn)] = &[
    ("normalization", 20, models::normalization),
    ("operator-identities", 30, models::operator_identities),
    ("projection-decomposition", 50, models::projection_decomposition),
    ("ring-identities", 25, algebra::ring_identities),
    ("ring-axioms", 30, algebra::ring_axioms),
    ("quotient-ring", 200, algebra::quotient_ring),
    ("constructions", 15, models::constructions),
    ("image-completion", 15, models::image_completion),
    ("rcf", 100, diag::rcf_suite),
    ("block-diagonalization", 50, diag::block_diagonalization),
    ("kernel-block-diagonalization", 25, diag::kernel_block_diagonalization),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(n, _, _)| *n).collect()
}

fn suite_seed(seed: u64, name: &str) -> u64 {
    // FNV-1a of the name, mixed into the run seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h
}

pub fn run_suite(name: &str, cfg: &RunConfig) -> Option<SuiteReport> {
    let &(name, default_trials, body) = SUITES.iter().find(|(n, _, _)| *n == name)?;
    let mut ctx = Ctx {
        rng: ChaCha8Rng::seed_from_u64(suite_seed(cfg.seed, name)),
        fields: cfg.fields.clone(),
        trials: cfg.trials.unwrap_or(default_trials),
        max_dim: cfg.max_dim,
        cases: 0,
        failures: Vec::new(),
    };
    body(&mut ctx);
    Some(SuiteReport { name, cases: ctx.cases, failures: ctx.failures })
}

/// Runs the selected suites. Unknown suite names are an error.
pub fn run_verify(cfg: &RunConfig) -> crate::Result<Report> {
    for s in &cfg.suites {
        if !SUITES.iter().any(|(n, _, _)| n == s) {
            return Err(crate::Error::Parse(format!("unknown suite \"{s}\"; known: {}", suite_names().join(", "))));
        }
    }
    let suites = SUITES
        .iter()
        .filter(|(n, _, _)| cfg.suites.is_empty() || cfg.suites.iter().any(|s| s == n))
        .map(|(n, _, _)| run_suite(n, cfg).expect("listed suite"))
        .collect();
    Ok(Report { seed: cfg.seed, suites })
}

/// Header describing a run, for reports that want the settings alongside the results.
pub fn config_to_json(cfg: &RunConfig) -> Value {
    json!({
        "seed": cfg.seed,
        "trials": cfg.trials,
        "fields": cfg.fields.iter().map(|f| field_to_json(*f)).collect::<Vec<_>>(),
        "max_dim": cfg.max_dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        let cfg = RunConfig { suites: vec!["nope".into()], ..RunConfig::default() };
        assert!(run_verify(&cfg).is_err());
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let cfg = RunConfig { seed: 7, trials: Some(2), suites: vec!["rcf".into(), "ring-axioms".into()], ..RunConfig::default() };
        let a = run_verify(&cfg).unwrap().to_json().to_string();
        let b = run_verify(&cfg).unwrap().to_json().to_string();
        assert_eq!(a, b);
    }

    #[test]
    fn every_suite_passes_small_runs() {
        let cfg = RunConfig { seed: 3, trials: Some(2), max_dim: 12, ..RunConfig::default() };
        let r = run_verify(&cfg).unwrap();
        for s in &r.suites {
            assert!(s.passed(), "{}: {:?}", s.name, s.failures);
            assert!(s.cases > 0, "{} ran no cases", s.name);
        }
    }
}
