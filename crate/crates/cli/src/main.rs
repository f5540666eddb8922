//! `wlab`: run reduction checks, Ramsey pipelines and adversary probes, and
//! write the results as JSON.
//!
//! Exit status is 0 on success, 1 when a run finds a counterexample or a
//! failure, and 2 on a usage error.

mod commands;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

/// Directory used for reports when `--out` is not given.
const OUT_DIR_VAR: &str = "WLAB_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "wlab", version, about = "Uniform reductions, Ramsey pipelines and use-bounded adversaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify or decompose formulas.
    #[command(subcommand)]
    Formula(FormulaCommand),
    /// Check reductions.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Solve colorings and run the Ramsey pipelines.
    #[command(subcommand)]
    Ramsey(RamseyCommand),
    /// Probe backward maps against trees.
    #[command(subcommand)]
    Adversary(AdversaryCommand),
    /// Exhaustive enumerations.
    #[command(subcommand)]
    Enumerate(EnumerateCommand),
}

#[derive(Subcommand, Debug)]
enum FormulaCommand {
    /// Report whether a closed formula is in Gamma1 and whether its matrix is exists-free.
    Classify(FormulaArgs),
    /// Split `forall x . (p1 -> exists y . p2)` into its parts.
    ProblemShape(FormulaArgs),
}

#[derive(Subcommand, Debug)]
enum ReduceCommand {
    /// Check both clauses of a built-in reduction.
    Verify(VerifyArgs),
}

#[derive(Subcommand, Debug)]
enum RamseyCommand {
    /// Find a homogeneous set.
    Solve(SolveArgs),
    /// Four colors from two calls on two-colorings.
    TwoStep(PipelineArgs),
    /// Four colors from one call on a two-coloring, steered by advice.
    OneUse(PipelineArgs),
    /// Any number of colors from one call, via the halving hierarchy.
    General(PipelineArgs),
}

#[derive(Subcommand, Debug)]
enum AdversaryCommand {
    /// Look for a counterexample forced by the finite use of a backward map.
    Probe(ProbeArgs),
}

#[derive(Subcommand, Debug)]
enum EnumerateCommand {
    /// Check every pair coloring of N vertices for a homogeneous set of size m.
    RamseyOracle(OracleArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FormulaArgs {
    /// File holding one formula.
    #[arg(long)]
    file: PathBuf,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReductionName {
    /// Identity on a small problem with every answer correct.
    IdentityTrivial,
    /// Four colors on pairs via two sequential two-color calls.
    Rt24TwoStep,
    /// Path problem with a backward map ignoring its inputs.
    PathConstant,
    /// Path problem with the escape-or-path backward map.
    PathCaseTwo,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    reduction: ReductionName,
    /// Vertices of the enumerated colorings.
    #[arg(long = "N", default_value_t = 4)]
    vertices: usize,
    /// Least accepted homogeneous set size.
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Tree depth for the path reductions.
    #[arg(long = "D", default_value_t = 4)]
    depth: usize,
    /// Check this many sampled instances instead of all of them.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Step budget per evaluation.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ColoringSource {
    /// Coloring file `{"n":2,"N":..,"k":..,"table":[..]}`.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Vertices of a random coloring, used without `--in`.
    #[arg(long = "N", default_value_t = 12)]
    vertices: usize,
    /// Colors of a random coloring.
    #[arg(long)]
    k: Option<u32>,
    /// Exponent of a random coloring.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    source: ColoringSource,
    /// Ask for the least set of exactly this size instead of a largest set.
    #[arg(long)]
    m: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolverName {
    /// A largest homogeneous set.
    Max,
    /// The least homogeneous set of size m.
    Least,
}

#[derive(Args, Debug)]
struct PipelineArgs {
    #[command(flatten)]
    source: ColoringSource,
    #[arg(long, default_value_t = 2)]
    m: usize,
    /// Size of the set the advice search looks for.
    #[arg(long = "s-advice", default_value_t = 2)]
    s_advice: usize,
    #[arg(long, value_enum, default_value_t = SolverName::Max)]
    solver: SolverName,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PsiName {
    /// Reads the first k bits and copies them into its path claim.
    Guess,
    /// Always claims the all-zeros path.
    Constant,
    /// Searches for an escape, otherwise copies the input.
    CaseTwo,
}

#[derive(Args, Debug)]
struct ProbeArgs {
    /// Secret bits such as `10110`; random when absent.
    #[arg(long)]
    secret: Option<String>,
    /// Length of a random secret.
    #[arg(long, default_value_t = 8)]
    bits: usize,
    #[arg(long = "D", default_value_t = 32)]
    depth: usize,
    /// Positions read by the `guess` map.
    #[arg(long, default_value_t = 4)]
    k: usize,
    #[arg(long, value_enum, default_value_t = PsiName::Guess)]
    psi: PsiName,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long = "N")]
    vertices: usize,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    output: Output,
}

/// A command failure that is the caller's fault.
#[derive(Debug)]
pub struct UsageError(pub String);

impl UsageError {
    pub fn flag(flag: &str, msg: impl std::fmt::Display) -> UsageError {
        UsageError(format!("{flag}: {msg}"))
    }
}

/// A finished command: the report and whether it found a failure.
pub struct Finished {
    pub name: &'static str,
    pub report: Value,
    pub failed: bool,
    pub summary: String,
}

fn run(cli: Cli) -> Result<(Finished, Output), UsageError> {
    use commands::*;
    Ok(match cli.command {
        Command::Formula(FormulaCommand::Classify(a)) => (classify(&a.file)?, a.output),
        Command::Formula(FormulaCommand::ProblemShape(a)) => (problem_shape(&a.file)?, a.output),
        Command::Reduce(ReduceCommand::Verify(a)) => (verify(&a)?, a.output),
        Command::Ramsey(RamseyCommand::Solve(a)) => (solve(&a)?, a.output),
        Command::Ramsey(RamseyCommand::TwoStep(a)) => (two_step(&a)?, a.output),
        Command::Ramsey(RamseyCommand::OneUse(a)) => (one_use(&a)?, a.output),
        Command::Ramsey(RamseyCommand::General(a)) => (general(&a)?, a.output),
        Command::Adversary(AdversaryCommand::Probe(a)) => (probe(&a)?, a.output),
        Command::Enumerate(EnumerateCommand::RamseyOracle(a)) => (oracle(&a)?, a.output),
    })
}

fn write_report(done: &Finished, output: &Output) -> Result<(), UsageError> {
    let mut text = serde_json::to_string_pretty(&done.report).expect("reports are plain JSON");
    text.push('\n');
    let path = match (&output.out, std::env::var_os(OUT_DIR_VAR)) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(PathBuf::from(dir).join(format!("{}.json", done.name))),
        (None, None) => None,
    };
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)
                    .map_err(|e| UsageError::flag("--out", format!("{}: {e}", parent.display())))?;
            }
            fs::write(&p, text).map_err(|e| UsageError::flag("--out", format!("{}: {e}", p.display())))?;
            eprintln!("report written to {}", p.display());
        }
        None => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = run(cli).and_then(|(done, output)| write_report(&done, &output).map(|()| done));
    match outcome {
        Ok(done) => {
            eprintln!("{}", done.summary);
            ExitCode::from(u8::from(done.failed))
        }
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
