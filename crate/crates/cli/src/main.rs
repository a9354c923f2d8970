//! Command-line front end for spherical preferences.
//!
//! Reports are JSON documents on standard output; logs go to standard
//! error. Exit status is 0 on success, 1 on a negative verdict and 2 on
//! input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};
use serde_json::{json, Value};

use spherical::axioms::{check_necessity, ByUtility, CheckOptions};
use spherical::cardinal::{check_status_quo_independence, decompose_with, Builtin, DecomposeOptions, QuadraticUtility};
use spherical::lp::SolveOptions;
use spherical::rationalize::{generate_dataset, rationalize_with, RationalizeOptions};
use spherical::sampling::{random_vector, rng_from_seed};
use spherical::{Error, ObservationSet, Rational, Restriction, Scalar, SphericalParams, Vector};

#[derive(Parser, Debug)]
#[command(name = "spherical", version, about = "Spherical preferences: classification, rationalization and axiom checks")]
struct Cli {
    /// Exact rational arithmetic (default).
    #[arg(long, global = true, conflicts_with = "float")]
    exact: bool,
    /// Floating-point arithmetic with tolerances.
    #[arg(long, global = true)]
    float: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance for float mode.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prints the class of a parameter file.
    Classify { params: PathBuf },
    /// Decides whether a dataset is rationalizable.
    Rationalize {
        dataset: PathBuf,
        #[arg(long, value_parser = parse_restriction)]
        restrict: Option<Restriction>,
        /// Prints every simplex tableau to standard error.
        #[arg(long)]
        dump_tableaus: bool,
    },
    /// Runs the axiom checkers on parameters, a coefficient oracle or a
    /// built-in oracle.
    CheckAxioms {
        #[arg(required_unless_present = "oracle")]
        input: Option<PathBuf>,
        #[arg(long, conflicts_with = "input")]
        oracle: Option<String>,
        /// Dimension of built-in oracles.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
    /// Splits a utility into quadratic and linear parts.
    Decompose {
        /// Oracle file or built-in oracle name.
        oracle: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// Samples a dataset rationalized by the given parameters.
    Generate {
        params: PathBuf,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_restriction(s: &str) -> Result<Restriction, String> {
    Restriction::from_name(s).map_err(|e| e.to_string())
}

/// Input problem reported with exit status 2.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = if cli.float {
        run::<f64>(&cli)
    } else if cli.tol.is_some() {
        Err(Failure("--tol only applies in float mode".into()))
    } else {
        run::<Rational>(&cli)
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run<T: Scalar>(cli: &Cli) -> Outcome {
    info!("arithmetic mode: {}", T::MODE);
    match &cli.command {
        Command::Classify { params } => {
            let p = SphericalParams::<T>::from_json(&read_json(params)?)?;
            emit(&p.classify())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Rationalize { dataset, restrict, dump_tableaus } => {
            let data = ObservationSet::<T>::from_json(&read_json(dataset)?)?;
            if data.dim() < 3 {
                warn!("dimension {} is below 3; the axiomatic characterization does not cover it", data.dim());
            }
            let opts = RationalizeOptions {
                restriction: *restrict,
                lp: SolveOptions { dump_tableaus: *dump_tableaus, ..Default::default() },
            };
            let verdict = rationalize_with(&data, &opts)?;
            emit(&verdict)?;
            Ok(verdict_code(verdict.rationalizable))
        }
        Command::CheckAxioms { input, oracle, dim, trials } => {
            let mut opts = CheckOptions::new(*trials as usize, cli.seed);
            if let Some(tol) = cli.tol {
                opts.margin = tol;
            }
            let source = match (input, oracle) {
                (_, Some(name)) => Value::String(name.clone()),
                (Some(path), None) => read_json(path)?,
                (None, None) => unreachable!("clap requires an input"),
            };
            let reports = if source.get("c").is_some() {
                check_necessity(&SphericalParams::<T>::from_json(&source)?, &opts)?
            } else {
                let sq_tol = cli.tol.unwrap_or(1e-9);
                match load_oracle::<T>(&source, *dim)? {
                    Oracle::Quadratic(u) => {
                        let mut r = check_necessity(&ByUtility(&u), &opts)?;
                        r.push(status_quo(&u, &opts, sq_tol)?);
                        r
                    }
                    Oracle::Builtin(b) => {
                        let mut r = check_necessity(&ByUtility(b), &opts)?;
                        r.push(status_quo(&b, &opts, sq_tol)?);
                        r
                    }
                }
            };
            for r in reports.iter().filter(|r| !r.passed()) {
                info!("{}: {} of {} trials violated", r.axiom, r.violations, r.trials);
            }
            emit(&reports)?;
            Ok(verdict_code(reports.iter().all(|r| r.passed())))
        }
        Command::Decompose { oracle, dim } => {
            let path = Path::new(oracle);
            let source = if path.exists() { read_json(path)? } else { Value::String(oracle.clone()) };
            let mut opts = DecomposeOptions { seed: cli.seed, ..Default::default() };
            if let Some(tol) = cli.tol {
                opts.rel_threshold = tol;
            }
            let result = match load_oracle::<T>(&source, *dim)? {
                Oracle::Quadratic(u) => decompose_with(&u, &probes::<T>(u.matrix().len(), cli.seed), &opts),
                Oracle::Builtin(b) => decompose_with(&b, &probes::<T>(*dim, cli.seed), &opts),
            };
            match result {
                Ok(dec) => {
                    emit(&dec)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::NotQuadLin { residual, threshold }) => {
                    warn!("utility is not quadratic plus linear");
                    emit(&json!({ "error": "NotQuadLin", "residual": residual, "threshold": threshold }))?;
                    Ok(verdict_code(false))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Generate { params, count, radius, output } => {
            let p = SphericalParams::<T>::from_json(&read_json(params)?)?;
            let data = generate_dataset(&p, *count as usize, cli.seed, *radius)?;
            let text = to_pretty(&data)?;
            match output {
                Some(path) => fs::write(path, text + "\n")
                    .map_err(|e| Failure(format!("cannot write {}: {e}", path.display())))?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

enum Oracle<T> {
    Quadratic(QuadraticUtility<T>),
    Builtin(Builtin),
}

fn load_oracle<T: Scalar>(source: &Value, dim: usize) -> Result<Oracle<T>, Failure> {
    match source {
        Value::String(name) => Ok(Oracle::Builtin(Builtin::from_name(name, dim)?)),
        Value::Object(_) => Ok(Oracle::Quadratic(QuadraticUtility::from_json(source)?)),
        _ => Err(Failure(format!(
            "expected a coefficient oracle or one of {:?}",
            Builtin::NAMES
        ))),
    }
}

fn status_quo<T: Scalar, O: spherical::cardinal::UtilityOracle<T>>(
    u: &O,
    opts: &CheckOptions,
    tol: f64,
) -> Result<spherical::axioms::AxiomReport<T>, Failure> {
    let mut opts = opts.clone();
    opts.trials = opts.trials.max(2);
    Ok(check_status_quo_independence(u, &opts, tol)?)
}

/// The origin and one random status quo.
fn probes<T: Scalar>(n: usize, seed: u64) -> Vec<Vector<T>> {
    let mut rng = rng_from_seed(seed);
    vec![Vector::zeros(n), random_vector(&mut rng, n, 3.0)]
}

fn verdict_code(positive: bool) -> ExitCode {
    if positive {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn to_pretty<S: serde::Serialize + ?Sized>(value: &S) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure(e.to_string()))
}

fn emit<S: serde::Serialize + ?Sized>(value: &S) -> Result<(), Failure> {
    println!("{}", to_pretty(value)?);
    Ok(())
}
