//! `kerconf`: batch front-end over JSON files.
//!
//! Exit codes: 0 success, 1 input error, 2 domain-level rejection.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use serde_json::{json, Value};

use kerconf::constructions::{build_companion_model, image_complete_driver, standard_extend, DriverOutcome};
use kerconf::diagonalize::{diagonalize_system, rcf, verify_block_on_model, Diagonalization};
use kerconf::json::{self as kj};
use kerconf::kernel_config::{normalize, Normalized};
use kerconf::ring::canonicalize;
use kerconf::verify::{run_verify, suite_names, RunConfig};
use kerconf::{EndoModel, Error, Field};

#[derive(Parser, Debug)]
#[command(name = "kerconf", version, about = "Kernel configurations, definable operators and sequence systems")]
struct Cli {
    /// Field for inputs that do not name one: Q, GF(p) or a prime.
    #[arg(long, global = true, env = "KERCONF_FIELD", default_value = "Q")]
    field: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normalize a constraint system to a kernel configuration.
    Normalize { file: PathBuf },
    /// Build, check or extend finite models.
    Model {
        #[command(subcommand)]
        op: ModelOp,
    },
    /// Canonical forms, equality and evaluation of operator expressions.
    Ring {
        #[command(subcommand)]
        op: RingOp,
    },
    /// Invariant factors and transformation matrix of a square matrix.
    Rcf { file: PathBuf },
    /// Diagonalize a triangular sequence system.
    Diagonalize {
        file: PathBuf,
        /// Run numeric roundtrips of every transformed block before printing.
        #[arg(long)]
        self_check: bool,
    },
    /// Run the randomized property suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cases per field for every suite (default: each suite's own count).
        #[arg(long)]
        trials: Option<usize>,
        /// Restrict to a suite; repeatable.
        #[arg(long = "suite")]
        suites: Vec<String>,
        /// Comma-separated fields, e.g. "Q,GF(5)".
        #[arg(long, default_value = "Q,GF(5)")]
        fields: String,
        #[arg(long, default_value_t = 24)]
        max_dim: usize,
        /// List the suite names and exit.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ModelOp {
    /// Companion model of a polynomial, repeated `copies` times.
    Build {
        poly: PathBuf,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Report C-endomorphism and image-completeness of a model.
    Check {
        model: PathBuf,
        #[arg(long)]
        config: PathBuf,
    },
    /// Extend a model: `standard` adds companion blocks, `image-complete` runs the completion driver.
    Extend {
        model: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = ["standard", "image-complete"], default_value = "standard")]
        mode: String,
        #[arg(long, default_value_t = 1)]
        blocks: usize,
    },
}

#[derive(Subcommand, Debug)]
enum RingOp {
    /// `{"config", "expr"}` to the canonical element.
    Canon { file: PathBuf },
    /// `{"config", "lhs", "rhs"}` to `{"equal": bool}`.
    Eq { file: PathBuf },
    /// `{"config", "expr", "model"}` to the matrix on the model.
    Eval { file: PathBuf },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSystem(_)
            | Error::NotImageComplete
            | Error::NotCEndomorphism
            | Error::NoFiniteWitness
            | Error::Precondition(_)
            | Error::IllegalGenerator(_)
            | Error::NotDirect(_)
            | Error::NotInvariant
            | Error::UnboundConstant(_)
            | Error::InfiniteValue(_)
            | Error::Internal(_) => 2,
            _ => 1,
        };
        Failure { code, msg: e.to_string() }
    }
}

type Outcome = Result<Value, Failure>;

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure { code: 1, msg: format!("cannot read {}: {e}", path.display()) })?;
    Ok(kj::parse_str(&text)?)
}

fn key<'a>(v: &'a Value, k: &str) -> Result<&'a Value, Failure> {
    v.get(k).ok_or_else(|| Failure { code: 1, msg: format!("missing key \"{k}\"") })
}

fn run_normalize(file: &Path, field: Field) -> Outcome {
    let sys = kj::constraint_system_from_json(&read_json(file)?, field)?;
    match normalize(&sys)? {
        Normalized::Inconsistent => Err(Failure { code: 2, msg: "inconsistent".into() }),
        n => Ok(kj::normalized_to_json(&n)),
    }
}

fn run_model(op: &ModelOp, field: Field) -> Outcome {
    match op {
        ModelOp::Build { poly, copies } => {
            let p = kj::poly_from_json(&read_json(poly)?, Some(field))?;
            Ok(kj::model_to_json(&build_companion_model(&p, *copies)?))
        }
        ModelOp::Check { model, config } => {
            let m = kj::model_from_json(&read_json(model)?, Some(field))?;
            let c = kj::config_from_json(&read_json(config)?, Some(field))?;
            let endo = m.is_c_endomorphism(&c)?;
            let complete = if endo { Value::Bool(m.is_image_complete(&c)?) } else { Value::Null };
            Ok(json!({
                "c_endomorphism": endo,
                "image_complete": complete,
                "minimal_polynomial": kj::poly_to_json(&m.minimal_polynomial()),
            }))
        }
        ModelOp::Extend { model, config, mode, blocks } => {
            let m = kj::model_from_json(&read_json(model)?, Some(field))?;
            let c = kj::config_from_json(&read_json(config)?, Some(field))?;
            if mode == "standard" {
                return Ok(kj::model_to_json(&standard_extend(&m, &c, *blocks, None)?));
            }
            match image_complete_driver(&m, &c)? {
                DriverOutcome::Completed { model, steps } => Ok(json!({ "model": kj::model_to_json(&model), "steps": steps })),
                DriverOutcome::GaveUp { steps, .. } => {
                    Err(Failure { code: 2, msg: format!("no image-complete extension after {steps} steps") })
                }
            }
        }
    }
}

fn run_ring(op: &RingOp, field: Field) -> Outcome {
    let (file, keys): (&Path, &[&str]) = match op {
        RingOp::Canon { file } => (file, &["expr"]),
        RingOp::Eq { file } => (file, &["lhs", "rhs"]),
        RingOp::Eval { file } => (file, &["expr"]),
    };
    let v = read_json(file)?;
    let c = kj::config_from_json(key(&v, "config")?, Some(field))?;
    let mut elems = Vec::new();
    for k in keys {
        let e = kj::expr_from_json(key(&v, k)?, c.field())?;
        elems.push(canonicalize(&c, &e)?);
    }
    match op {
        RingOp::Canon { .. } => Ok(kj::ring_elem_to_json(&elems[0])),
        RingOp::Eq { .. } => Ok(json!({ "equal": elems[0] == elems[1] })),
        RingOp::Eval { .. } => {
            let m = kj::model_from_json(key(&v, "model")?, Some(c.field()))?;
            let mat = elems[0].eval_on_model(&m)?;
            Ok(json!({ "field": kj::field_to_json(c.field()), "matrix": kj::matrix_to_json(&mat) }))
        }
    }
}

/// Accepts a model file or `{"field", "matrix"}`.
fn run_rcf(file: &Path, field: Field) -> Outcome {
    let v = read_json(file)?;
    let b = if v.get("theta").is_some() {
        kj::model_from_json(&v, Some(field))?.theta().clone()
    } else {
        let f = match v.get("field") {
            Some(f) => kj::field_from_json(f)?,
            None => field,
        };
        kj::matrix_from_json(f, key(&v, "matrix")?)?
    };
    Ok(kj::rcf_to_json(&rcf(&b)?))
}

/// Numeric roundtrips of every transformed block, on the bound model or a seeded random one.
fn self_check(d: &Diagonalization, model: Option<&EndoModel>, field: Field) -> Result<(), Failure> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let fallback;
    let m = match model {
        Some(m) if m.dim() > 0 => m,
        _ => {
            fallback = kerconf::random::any_model(&mut rng, field, 6);
            &fallback
        }
    };
    let mut failures = Vec::new();
    for blk in d.ld_block.iter().chain(&d.kernel_blocks) {
        let check = verify_block_on_model(blk, m, 5, &mut rng)?;
        failures.extend(check.failures);
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure { code: 2, msg: format!("self-check failed: {}", failures.join("; ")) })
    }
}

fn run_diagonalize(file: &Path, check: bool, field: Field) -> Outcome {
    let sys = kj::triangular_from_json(&read_json(file)?, Some(field))?;
    let d = diagonalize_system(&sys)?;
    if check {
        self_check(&d, sys.binding.as_ref().map(|b| &b.model), sys.config.field())?;
    }
    Ok(kj::diagonalization_to_json(&d))
}

fn run_verify_cmd(seed: u64, trials: Option<usize>, suites: &[String], fields: &str, max_dim: usize) -> Outcome {
    let fields = fields.split(',').map(kj::field_from_name).collect::<kerconf::Result<Vec<_>>>()?;
    let cfg = RunConfig { seed, trials, fields, max_dim, suites: suites.to_vec() };
    let report = run_verify(&cfg)?;
    let out = report.to_json();
    if report.passed() {
        Ok(out)
    } else {
        emit(&kj::to_string(&out));
        Err(Failure { code: 2, msg: "verification failed".into() })
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let field = kj::field_from_name(&cli.field)?;
    match &cli.command {
        Command::Normalize { file } => run_normalize(file, field),
        Command::Model { op } => run_model(op, field),
        Command::Ring { op } => run_ring(op, field),
        Command::Rcf { file } => run_rcf(file, field),
        Command::Diagonalize { file, self_check } => run_diagonalize(file, *self_check, field),
        Command::Verify { list: true, .. } => {
            Ok(Value::Array(suite_names().into_iter().map(|s| Value::String(s.into())).collect()))
        }
        Command::Verify { seed, trials, suites, fields, max_dim, .. } => {
            run_verify_cmd(*seed, *trials, suites, fields, *max_dim)
        }
    }
}

// A closed pipe (e.g. `| head`) is not an error worth a panic.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{s}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(v) => {
            emit(&kj::to_string(&v));
            ExitCode::SUCCESS
        }
        Err(f) => {
            if f.msg == "inconsistent" {
                emit("\"inconsistent\"");
            }
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

