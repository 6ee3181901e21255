use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vpatch::{Complex64, EllipseSpec};
use vpatch_cli::commands::{self, Shape, SweepRequest, TransformRequest};
use vpatch_cli::scenario::Numerics;
use vpatch_cli::{exit_code, CliError, Scenario, Status};

/// Rotating layered vortex patches: verification, simulation and solving.
///
/// Exit codes: 0 success, 1 verification failed, 2 invalid input,
/// 3 numerical failure, 4 solver non-convergence.
#[derive(Parser)]
#[command(name = "vpatch", version)]
struct Cli {
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario's rigid-rotation residuals against its tolerance.
    Verify(ScenarioArgs),
    /// Evolve a scenario's interfaces in time.
    Simulate(ScenarioArgs),
    /// Solve for the outer interface around an elliptical inner one.
    Solve(ScenarioArgs),
    /// Evaluate the Cauchy transform of an ellipse or disc.
    Transform(TransformArgs),
    /// Verify the confocal-ellipse family over a (Q2, alpha) grid.
    Sweep(SweepArgs),
}

#[derive(clap::Args)]
struct ScenarioArgs {
    /// Scenario JSON document.
    scenario: PathBuf,
    /// Override `outputs.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeKind {
    Ellipse,
    Disc,
}

#[derive(clap::Args)]
struct TransformArgs {
    #[arg(long, value_enum)]
    shape: ShapeKind,
    /// Ellipse semi-axis along the tilted x direction.
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Disc radius.
    #[arg(long)]
    r: Option<f64>,
    /// Centre as `x,y`.
    #[arg(long, default_value = "0,0", value_parser = parse_point, allow_hyphen_values = true)]
    center: Complex64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    tilt: f64,
    /// Evaluation point as `x` or `x,y` (repeatable).
    #[arg(long, required = true, value_parser = parse_point, allow_hyphen_values = true)]
    at: Vec<Complex64>,
    /// Use boundary quadrature instead of the closed form.
    #[arg(long)]
    quadrature: bool,
    /// Boundary nodes for quadrature.
    #[arg(long, default_value_t = 256)]
    n: usize,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 20)]
    q_points: usize,
    #[arg(long, default_value_t = 20)]
    alpha_points: usize,
    /// Boundary nodes per interface.
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Use boundary quadrature instead of the ellipse closed forms.
    #[arg(long)]
    quadrature: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    match parts.as_slice() {
        [x] => Ok(Complex64::new(parse(x)?, 0.0)),
        [x, y] => Ok(Complex64::new(parse(x)?, parse(y)?)),
        _ => Err(format!("expected `x` or `x,y`, got {s:?}")),
    }
}

fn load(args: &ScenarioArgs) -> Result<Scenario, CliError> {
    let mut s = Scenario::load(&args.scenario)?;
    if let Some(out) = &args.out {
        s.outputs.dir = out.clone();
    }
    Ok(s)
}

fn transform(args: &TransformArgs) -> Result<Status, CliError> {
    let need = |v: Option<f64>, name: &str| v.ok_or_else(|| CliError::Input(format!("--{name} is required")));
    let shape = match args.shape {
        ShapeKind::Ellipse => Shape::Ellipse(
            EllipseSpec::new(args.center, need(args.a, "a")?, need(args.b, "b")?, args.tilt)
                .map_err(|e| CliError::Input(e.to_string()))?,
        ),
        ShapeKind::Disc => Shape::Disc { center: args.center, r: need(args.r, "r")? },
    };
    let req = TransformRequest { shape, at: args.at.clone(), quadrature: args.quadrature, n: args.n };
    print!("{}", commands::transform(&req)?);
    Ok(Status::Ok)
}

fn sweep(args: &SweepArgs) -> Result<Status, CliError> {
    let req = SweepRequest {
        q_points: args.q_points,
        alpha_points: args.alpha_points,
        numerics: Numerics { n: args.n, tol: args.tol, quadrature: args.quadrature, ..Numerics::default() },
    };
    let (status, csv) = commands::sweep(&req)?;
    match &args.out {
        Some(path) => std::fs::write(path, csv)?,
        None => print!("{csv}"),
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).init();
    let result = match &cli.command {
        Command::Verify(a) => load(a).and_then(|s| commands::verify(&s)),
        Command::Simulate(a) => load(a).and_then(|s| commands::simulate(&s)),
        Command::Solve(a) => load(a).and_then(|s| commands::solve(&s)),
        Command::Transform(a) => transform(a),
        Command::Sweep(a) => sweep(a),
    };
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    exit_code(&result)
}
