//! `tripid`: trivariate information decompositions from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input or I/O
//! error, 3 solver failure or a report that failed its consistency check.

mod error;
mod grid;
mod output;
mod report;
mod systems;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use trivariate_pid::format::parse_pmf;
use trivariate_pid::{GaussianCov, JointDist3, Role, SolverConfig};

use crate::error::{CliError, CliResult, EXIT_VERIFY_FAILED};
use crate::output::{round_json, DEFAULT_PRECISION, MAX_PRECISION};
use crate::report::{analyse, GaussianReport, InputDescriptor, Report};
use crate::systems::SystemArgs;

#[derive(Parser, Debug)]
#[command(name = "tripid", version, about = "Partial information decompositions of three-variable systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose one distribution (a pmf file or a catalog system).
    Decompose(DecomposeArgs),
    /// Decompose a catalog system over a parameter grid.
    Sweep(SweepArgs),
    /// Closed-form decomposition of a jointly Gaussian system.
    Gaussian(GaussianArgs),
    /// Check the solver against brute force and all identities.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Objective tolerance in bits.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
}

impl SolverArgs {
    fn config(&self) -> CliResult<SolverConfig> {
        let mut cfg = SolverConfig::default();
        if let Some(t) = self.tol {
            cfg.tol_bits = t;
        }
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Significant digits in printed numbers (1 to 15).
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
}

impl OutputArgs {
    fn digits(&self) -> CliResult<usize> {
        if (1..=MAX_PRECISION).contains(&self.precision) {
            Ok(self.precision)
        } else {
            Err(CliError::invalid(format!("--precision must be between 1 and {MAX_PRECISION}")))
        }
    }
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    system: SystemArgs,
    /// Distribution file, text (`x y z p` lines) or JSON.
    #[arg(long, conflicts_with = "system")]
    pmf: Option<PathBuf>,
    /// X, Y, Z or all.
    #[arg(long, default_value = "all")]
    target: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    system: SystemArgs,
    #[arg(long, default_value = "X")]
    target: String,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct GaussianArgs {
    /// JSON file `{"cov": [[..],[..],[..]]}`.
    #[arg(long)]
    cov: PathBuf,
    #[arg(long, default_value = "all")]
    target: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random systems on top of the catalog.
    #[arg(long, default_value_t = 20)]
    random: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

fn targets(sel: &str) -> CliResult<Vec<Role>> {
    if sel.eq_ignore_ascii_case("all") {
        return Ok(Role::ALL.to_vec());
    }
    sel.parse::<Role>()
        .map(|r| vec![r])
        .map_err(|_| CliError::invalid(format!("--target must be X, Y, Z or all, got '{sel}'")))
}

fn read(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))
}

fn json_text<S: Serialize>(value: &S, digits: usize) -> String {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    round_json(&mut v, digits);
    serde_json::to_string_pretty(&v).expect("json prints") + "\n"
}

fn decompose(args: &DecomposeArgs) -> CliResult<String> {
    let cfg = args.solver.config()?;
    let digits = args.output.digits()?;
    let targets = targets(&args.target)?;
    let (input, dist, kind): (InputDescriptor, JointDist3, String) = match (&args.pmf, &args.system.system) {
        (Some(path), None) => {
            let dist: JointDist3 = parse_pmf(&read(path)?).map_err(|e| {
                CliError { message: format!("{}: {e}", path.display()), ..e.into() }
            })?;
            let input = InputDescriptor {
                source: "pmf",
                system: None,
                file: Some(path.display().to_string()),
                alphabet_sizes: dist.shape(),
            };
            (input, dist, "pmf".into())
        }
        (None, Some(_)) => {
            let spec = args.system.specs(false)?.remove(0);
            let dist: JointDist3 = spec.build()?;
            let kind = spec.kind.to_string();
            let input =
                InputDescriptor { source: "system", system: Some(spec), file: None, alphabet_sizes: dist.shape() };
            (input, dist, kind)
        }
        _ => return Err(CliError::invalid("give exactly one of --pmf or --system")),
    };
    let a = analyse(&dist, &cfg)?;
    Ok(match args.output.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&Report::build(input, &a, &targets), digits),
        Format::Table => Report::build(input, &a, &targets).to_table(digits),
        Format::Csv => systems::csv(&systems::rows(&kind, input.system.as_ref(), &a, &targets, digits)),
    })
}

fn sweep(args: &SweepArgs) -> CliResult<String> {
    let cfg = args.solver.config()?;
    let digits = args.output.digits()?;
    let targets = targets(&args.target)?;
    let specs = args.system.specs(true)?;
    // Each point is independent; collect keeps grid order.
    let rows: Vec<Vec<Vec<String>>> = specs
        .par_iter()
        .map(|spec| {
            let at = || serde_json::to_string(&spec.params).expect("params serialize");
            let dist: JointDist3 =
                spec.build().map_err(|e| CliError { message: format!("at {}: {e}", at()), ..e.into() })?;
            let a = analyse(&dist, &cfg).map_err(|e| CliError { message: format!("at {}: {}", at(), e.message), ..e })?;
            Ok(systems::rows(spec.kind.name(), Some(spec), &a, &targets, digits))
        })
        .collect::<CliResult<_>>()?;
    let rows: Vec<Vec<String>> = rows.into_iter().flatten().collect();
    Ok(match args.output.format.unwrap_or(Format::Csv) {
        Format::Csv => systems::csv(&rows),
        Format::Json => serde_json::to_string_pretty(&systems::rows_json(&rows)).expect("json prints") + "\n",
        Format::Table => {
            let mut all = vec![systems::CSV_COLUMNS.map(String::from).to_vec()];
            all.extend(rows);
            output::table(&all)
        }
    })
}

fn gaussian(args: &GaussianArgs) -> CliResult<String> {
    let digits = args.output.digits()?;
    let targets = targets(&args.target)?;
    let g = GaussianCov::from_json(&read(&args.cov)?)?;
    let report = GaussianReport::build(args.cov.display().to_string(), &g, &targets)?;
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => Ok(json_text(&report, digits)),
        Format::Table => Ok(report.to_table(digits)),
        Format::Csv => Err(CliError::invalid("gaussian reports are json or table")),
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Decompose(a) => decompose(a),
        Command::Sweep(a) => sweep(a),
        Command::Gaussian(a) => gaussian(a),
        Command::Verify(a) => {
            let cfg = a.solver.config()?;
            let (n, outcome) = verify::run(a.seed, a.random, &cfg);
            let text = verify::summary(n, &outcome);
            if outcome.failures.is_empty() {
                Ok(text)
            } else {
                print!("{text}");
                Err(CliError { code: EXIT_VERIFY_FAILED, message: format!("{} check(s) failed", outcome.failures.len()) })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
