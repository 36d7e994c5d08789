use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qms_core::io::{parse_model, parse_rates, parse_vector, write_trajectory_csv, EnsembleSummary};
use qms_core::matkit::{basis_vector, CVec, Tolerance};
use qms_core::report::{analyze, AnalysisOptions};
use qms_core::sse::{estimate_density, mean_square_norm, simulate_ito, verify_representation, Scheme, TrajectoryConfig};
use qms_core::structure::{larc_check, support_projection, LarcOptions};
use qms_core::gksl::LindbladModel;
use qms_core::{acceptance, catalog, generic, Error};

/// Structural analysis of finite-dimensional quantum Markov semigroups.
#[derive(Parser, Debug)]
#[command(name = "qmsirr", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Relative rank tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of random probe vectors added to the structural ones.
    #[arg(long, global = true, default_value_t = 20)]
    probes: usize,
    #[arg(long, global = true, value_enum, default_value_t = SchemeArg::ExponentialEuler)]
    scheme: SchemeArg,
    /// Write JSON output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    EulerMaruyama,
    ExponentialEuler,
    Milstein,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::EulerMaruyama => Scheme::EulerMaruyama,
            SchemeArg::ExponentialEuler => Scheme::ExponentialEuler,
            SchemeArg::Milstein => Scheme::Milstein,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full analysis report of a model file or catalog name.
    Analyze {
        model: String,
        /// Skip the Monte Carlo irreducibility route.
        #[arg(long)]
        no_monte_carlo: bool,
    },
    /// Monte Carlo check of the second-moment identity, with optional CSV.
    Simulate {
        model: String,
        /// Initial vector, e.g. `1,0` or `0.6+0.8i,0`; defaults to e_1.
        #[arg(long)]
        xi: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 10_000)]
        traj: usize,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Trajectory CSV destination.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Keep every k-th step in the CSV; defaults to about 100 rows per path.
        #[arg(long)]
        record_every: Option<usize>,
    },
    /// Support projection of the evolved pure state.
    Support {
        model: String,
        #[arg(long)]
        xi: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Lie algebra rank condition report.
    Larc {
        model: String,
        /// Use only the noise operators as generators.
        #[arg(long)]
        without_drift: bool,
    },
    /// Equivalence report for a rate-graph JSON file.
    Generic { rates: PathBuf },
    /// List the built-in models.
    Examples,
    /// Run the acceptance suite.
    Selftest {
        /// Comma-separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

/// Exit statuses: usage and I/O problems versus violated consequences.
enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(_) => Failure::Violation(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load_model(spec: &str) -> Result<LindbladModel, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {spec}: {e}")))?;
        Ok(parse_model(&text)?)
    } else {
        catalog::lookup(spec).map_err(|_| {
            Failure::Usage(format!(
                "`{spec}` is neither a file nor a catalog model ({})",
                catalog::names().join(", ")
            ))
        })
    }
}

fn initial_vector(xi: &Option<String>, d: usize) -> Result<CVec, Failure> {
    let v = match xi {
        Some(s) => parse_vector(s)?,
        None => basis_vector(d, 0),
    };
    if v.len() != d {
        return Err(Failure::Usage(format!("--xi has {} components, model dimension is {d}", v.len())));
    }
    Ok(v)
}

fn emit<T: Serialize>(value: &T, out: &Option<PathBuf>) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        // A closed pipe (e.g. `| head`) is a normal end of output.
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                Err(Failure::Usage(format!("cannot write to stdout: {e}")))
            }
            _ => Ok(()),
        },
    }
}

fn tolerance(c: &Common) -> Result<Tolerance, Failure> {
    Ok(Tolerance::new(c.tol, Tolerance::default().abs_floor)?)
}

/// Smallest divisor of `steps` that leaves at most about 100 recorded steps.
fn default_record_every(steps: usize) -> usize {
    let target = steps.div_ceil(100).max(1);
    (target..=steps).find(|k| steps.is_multiple_of(*k)).unwrap_or(steps)
}

fn run(cli: Cli) -> Outcome {
    let c = &cli.common;
    let tol = tolerance(c)?;
    match &cli.command {
        Command::Analyze { model, no_monte_carlo } => {
            let m = load_model(model)?;
            let report = analyze(
                &m,
                &AnalysisOptions {
                    tol,
                    seed: c.seed,
                    probes: c.probes,
                    monte_carlo: !no_monte_carlo,
                    sse: Vec::new(),
                },
            )?;
            emit(&report, &c.out)?;
            if !report.inconsistencies.is_empty() {
                return Err(Failure::Violation(report.inconsistencies.join("; ")));
            }
            Ok(())
        }
        Command::Simulate { model, xi, t, traj, steps, csv, record_every } => {
            let m = load_model(model)?;
            let x = initial_vector(xi, m.dim())?;
            let cfg = TrajectoryConfig::new(*t, *steps, *traj, c.seed)?.with_scheme(c.scheme.into());
            let rep = verify_representation(&m, &x, *t, &cfg)?;
            let mut summary = None;
            if let Some(path) = csv {
                let every = record_every.unwrap_or_else(|| default_record_every(*steps));
                let ens = simulate_ito(&m, &x, &cfg.with_record_every(every))?;
                let file = File::create(path)
                    .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", path.display())))?;
                write_trajectory_csv(&ens, BufWriter::new(file))?;
                let last = ens.n_times() - 1;
                summary = Some(EnsembleSummary::new(
                    *t,
                    *steps,
                    mean_square_norm(&ens, last),
                    &estimate_density(&ens, last),
                ));
            }
            eprintln!(
                "{} representation identity: distance {:.3e} <= {:.3e} (5 x {:.3e} + bias {:.3e})",
                if rep.pass { "PASS" } else { "FAIL" },
                rep.distance,
                rep.threshold,
                rep.aggregate_std_error,
                rep.bias_budget
            );
            emit(&serde_json::json!({ "representation": rep, "ensemble": summary }), &c.out)?;
            if rep.pass {
                Ok(())
            } else {
                Err(Failure::Violation("Monte Carlo second moment disagrees with the semigroup".into()))
            }
        }
        Command::Support { model, xi, t } => {
            let m = load_model(model)?;
            let x = initial_vector(xi, m.dim())?;
            let rep = support_projection(&m, &x, *t, &tol)?;
            let p = &rep.projection;
            let rows: Vec<Vec<[f64; 2]>> = p
                .row_iter()
                .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
                .collect();
            emit(
                &serde_json::json!({
                    "projection": rows,
                    "rank": rep.rank,
                    "state_rank": rep.state_rank,
                    "agree": rep.agree,
                }),
                &c.out,
            )?;
            if rep.agree {
                Ok(())
            } else {
                Err(Failure::Violation(format!(
                    "support rank {} differs from evolved-state rank {}",
                    rep.rank, rep.state_rank
                )))
            }
        }
        Command::Larc { model, without_drift } => {
            let m = load_model(model)?;
            let opts = LarcOptions {
                random_probes: c.probes,
                seed: c.seed,
                with_drift: !without_drift,
            };
            emit(&larc_check(&m, &opts, &tol)?, &c.out)
        }
        Command::Generic { rates } => {
            let text = std::fs::read_to_string(rates)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", rates.display())))?;
            let (gamma, h) = parse_rates(&text)?;
            let opts = LarcOptions {
                random_probes: c.probes,
                seed: c.seed,
                with_drift: true,
            };
            emit(&generic::verify_equivalences(&gamma, &h, &opts, &tol)?, &c.out)
        }
        Command::Examples => {
            for e in catalog::ENTRIES {
                println!("{:<26} {}", e.name, e.summary);
            }
            Ok(())
        }
        Command::Selftest { only } => {
            let ids: Vec<usize> = if only.is_empty() {
                (1..=acceptance::CRITERIA.len()).collect()
            } else {
                only.clone()
            };
            if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > acceptance::CRITERIA.len()) {
                return Err(Failure::Usage(format!("no criterion {bad}")));
            }
            let mut failed = Vec::new();
            for id in ids {
                let r = acceptance::run(id);
                println!("{r}");
                let _ = std::io::stdout().flush();
                if !r.pass {
                    failed.push(id);
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Violation(format!("criteria {failed:?} failed")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("inconsistency: {msg}");
            ExitCode::from(2)
        }
    }
}
