//! Command-line front end. [`run`] does all the work and returns the exit code
//! with the text destined for stdout and stderr, so it can be tested in-process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generator::{log_grid, Generator};
use crate::repfn::{rep_eval, DEFAULT_TOL};
use crate::solver::{relative_entropy, solve_gke, tsallis_entropy, GkeProblem, SolverConfig, WeightVector};
use crate::spd::{Matrix, SpdMatrix};
use crate::verify::{
    check_ando_hiai_1, check_ando_hiai_2, check_bounds, check_pointwise_order, check_sign_lemma,
    conjecture_search, run_property_suite, CheckOutcome, SuiteReport, TrialPlan, DEFAULT_P_LIST,
};

/// Tolerance on the sum of `--weights` before renormalization.
pub const WEIGHT_INPUT_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "gkemean", version, about = "Generalized Karcher Equation means of SPD matrices")]
pub struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Residual tolerance for `mean`, Löwner tolerance for `verify`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntropyKind {
    Relative,
    Tsallis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Sign,
    Bounds,
    Order,
    Ah1,
    Ah2,
    Conjecture,
}

#[derive(Debug, clap::Args)]
pub struct PlanArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 5])]
    pub dims: Vec<usize>,
    #[arg(long = "n", value_delimiter = ',', default_values_t = [2usize, 3, 5])]
    pub n_operators: Vec<usize>,
    #[arg(long = "log-cond", default_value_t = 2.0)]
    pub log_condition: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the generalized Karcher equation for a weighted family.
    Mean {
        #[arg(long, default_value = "log")]
        g: Generator,
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long = "max-iter", default_value_t = 500)]
        max_iter: usize,
    },
    /// Tabulate the representing function on a log grid.
    Repfn {
        #[arg(long)]
        g: Generator,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        xmin: f64,
        #[arg(long)]
        xmax: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Relative or Tsallis operator entropy of the two matrices in `--inputs`.
    Entropy {
        #[arg(long, value_enum, default_value = "relative")]
        kind: EntropyKind,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        inputs: PathBuf,
    },
    /// Randomized theorem checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value = "log")]
        g: Generator,
        /// Upper generator for `--suite order`.
        #[arg(long)]
        f: Option<Generator>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_P_LIST)]
        p: Vec<f64>,
        #[command(flatten)]
        plan: PlanArgs,
    },
    /// Norm-ratio search between the mean and the quasi-arithmetic mean.
    Conjecture {
        #[arg(long, default_value = "log")]
        g: Generator,
        #[command(flatten)]
        plan: PlanArgs,
    },
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

/// Parse `argv` (including the program name) and execute it.
pub fn run<I, T>(argv: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    match execute(&cli) {
        Ok((code, text)) => match &cli.output {
            Some(path) => match std::fs::write(path, &text) {
                Ok(()) => CliOutcome {
                    code,
                    stdout: String::new(),
                    stderr: String::new(),
                },
                Err(e) => failure(Failure::Compute(Error::Io(format!("{}: {e}", path.display())))),
            },
            None => CliOutcome {
                code,
                stdout: text,
                stderr: String::new(),
            },
        },
        Err(f) => failure(f),
    }
}

fn failure(f: Failure) -> CliOutcome {
    match f {
        Failure::Usage(msg) => CliOutcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("usage error: {msg}\n"),
        },
        Failure::Compute(e) => CliOutcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {}: {e}\n", e.name()),
        },
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn plan_from(cli: &Cli, args: &PlanArgs) -> std::result::Result<TrialPlan, Failure> {
    let plan = TrialPlan {
        seed: cli.seed,
        trials: args.trials,
        dims: args.dims.clone(),
        n_operators: args.n_operators.clone(),
        log_condition: args.log_condition,
        tolerance: cli.tol.unwrap_or(1e-8),
    };
    plan.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(plan)
}

fn json_only(cli: &Cli, what: &str) -> std::result::Result<(), Failure> {
    if cli.format == Some(Format::Csv) {
        return Err(Failure::Usage(format!("{what} output is JSON only")));
    }
    Ok(())
}

#[derive(Serialize)]
struct MeanOutput<'a> {
    solution: &'a SpdMatrix,
    residual: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct EntropyOutput<'a> {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    entropy: &'a Matrix,
}

#[derive(Serialize)]
struct RepPoint {
    x: f64,
    y: f64,
}

fn execute(cli: &Cli) -> std::result::Result<(i32, String), Failure> {
    match &cli.command {
        Command::Mean {
            g,
            weights,
            inputs,
            max_iter,
        } => {
            json_only(cli, "mean")?;
            let weights = WeightVector::normalized(weights.clone(), WEIGHT_INPUT_TOL)
                .map_err(|e| Failure::Usage(e.to_string()))?;
            let matrices = load_matrices(inputs)?;
            if weights.len() != matrices.len() {
                return Err(Failure::Usage(format!(
                    "{} weights for {} matrices",
                    weights.len(),
                    matrices.len()
                )));
            }
            let problem = GkeProblem::new(weights, matrices, g.clone())?;
            let config = SolverConfig {
                residual_tol: cli.tol.unwrap_or(1e-10),
                max_iterations: *max_iter,
                ..SolverConfig::default()
            };
            let report = solve_gke(&problem, &config)?;
            Ok((
                0,
                to_json(&MeanOutput {
                    solution: &report.solution,
                    residual: report.residual,
                    iterations: report.iterations,
                }),
            ))
        }
        Command::Repfn {
            g,
            lambda,
            xmin,
            xmax,
            points,
        } => {
            if !(*xmin > 0.0 && xmin <= xmax) || *points == 0 {
                return Err(Failure::Usage(
                    "need 0 < xmin <= xmax and points >= 1".into(),
                ));
            }
            let grid = if *points == 1 {
                vec![*xmin]
            } else {
                log_grid(*xmin, *xmax, *points)
            };
            let rows = grid
                .into_iter()
                .map(|x| Ok(RepPoint { x, y: rep_eval(g, *lambda, x, DEFAULT_TOL)? }))
                .collect::<Result<Vec<_>>>()?;
            match cli.format.unwrap_or(Format::Csv) {
                Format::Json => Ok((0, to_json(&rows))),
                Format::Csv => {
                    let mut out = String::from("x,y\n");
                    for r in &rows {
                        writeln!(out, "{},{}", r.x, r.y).expect("writing to a String");
                    }
                    Ok((0, out))
                }
            }
        }
        Command::Entropy { kind, t, inputs } => {
            json_only(cli, "entropy")?;
            let mats = load_matrices(inputs)?;
            if mats.len() != 2 {
                return Err(Failure::Compute(Error::BadParameter(format!(
                    "entropy needs exactly two matrices, found {}",
                    mats.len()
                ))));
            }
            let (value, name, t) = match kind {
                EntropyKind::Relative => (relative_entropy(&mats[0], &mats[1])?, "relative", None),
                EntropyKind::Tsallis => {
                    let t = t.ok_or_else(|| Failure::Usage("--kind tsallis needs --t".into()))?;
                    (tsallis_entropy(&mats[0], &mats[1], t)?, "tsallis", Some(t))
                }
            };
            Ok((
                0,
                to_json(&EntropyOutput {
                    kind: name,
                    t,
                    entropy: &value,
                }),
            ))
        }
        Command::Verify {
            suite,
            g,
            f,
            p,
            plan,
        } => {
            json_only(cli, "verify")?;
            let plan = plan_from(cli, plan)?;
            let report = match suite {
                Suite::All => run_property_suite(&plan)?,
                _ => {
                    let outcome: CheckOutcome = match suite {
                        Suite::Sign => check_sign_lemma(g, &plan)?,
                        Suite::Bounds => check_bounds(g, &plan)?,
                        Suite::Order => {
                            let f = f
                                .clone()
                                .ok_or_else(|| Failure::Usage("--suite order needs --f".into()))?;
                            check_pointwise_order(g, &f, &plan)?
                        }
                        Suite::Ah1 => check_ando_hiai_1(g, &plan, p)?,
                        Suite::Ah2 => check_ando_hiai_2(g, &plan, p)?,
                        Suite::Conjecture => conjecture_search(g, &plan)?,
                        Suite::All => unreachable!(),
                    };
                    let passed = !outcome.failed();
                    SuiteReport {
                        plan,
                        outcomes: vec![outcome],
                        passed,
                    }
                }
            };
            Ok((if report.passed { 0 } else { 1 }, to_json(&report)))
        }
        Command::Conjecture { g, plan } => {
            json_only(cli, "conjecture")?;
            let plan = plan_from(cli, plan)?;
            Ok((0, to_json(&conjecture_search(g, &plan)?)))
        }
    }
}

/// Read a JSON array of matrix objects and validate each as SPD.
pub fn load_matrices(path: &Path) -> Result<Vec<SpdMatrix>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let raw: Vec<Matrix> = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if raw.is_empty() {
        return Err(Error::Parse(format!("{}: no matrices", path.display())));
    }
    raw.into_iter()
        .enumerate()
        .map(|(index, m)| {
            SpdMatrix::new(m).map_err(|e| Error::NotSpdAt {
                index,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn save_matrices(path: &Path, matrices: &[SpdMatrix]) -> Result<()> {
    let text = serde_json::to_string_pretty(matrices).expect("matrices serialize");
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
