use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rigid_hc::harness::{self, to_csv, with_threads};
use rigid_hc::rigid::TrackerSettings;
use rigid_hc::unitary::PathKind;

#[derive(Parser)]
#[command(name = "rigid-hc", version, about = "Rigid continuation solver for homogeneous polynomial systems")]
struct Cli {
    /// Worker threads for trial-level parallelism; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find one certified zero of a system file.
    Solve(SolveArgs),
    /// Estimate E[κ²] for uniform unit-row matrices.
    KappaMoment(KappaArgs),
    /// Estimate E[γ_Frob²] at uniform zeros of Kostlan polynomials.
    GammaMoment(GammaArgs),
    /// Mean continuation step count over a grid of (n, D).
    StepScaling(ScalingArgs),
    /// Random two-point checks of the Lipschitz constants of 1/γ_Frob and 1/ĥγ_Frob.
    Lipschitz(LipschitzArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = PathKind::Geodesic)]
    path: PathKind,
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Output {
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KappaArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GammaArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ScalingArgs {
    #[arg(long, default_value = "1:4", value_parser = parse_range)]
    n_range: (usize, usize),
    #[arg(long, default_value = "1:3", value_parser = parse_range)]
    d_range: (usize, usize),
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LipschitzArgs {
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[command(flatten)]
    output: Output,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(':').ok_or("expected A:B")?;
    let a: usize = a.parse().map_err(|_| format!("invalid bound `{a}`"))?;
    let b: usize = b.parse().map_err(|_| format!("invalid bound `{b}`"))?;
    if a == 0 || a > b {
        return Err(format!("need 1 ≤ A ≤ B, got {a}:{b}"));
    }
    Ok((a, b))
}

fn emit(csv: String, output: &Output) -> ExitCode {
    match &output.out {
        Some(path) => match std::fs::write(path, csv) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                ExitCode::FAILURE
            }
        },
        None => {
            print!("{csv}");
            ExitCode::SUCCESS
        }
    }
}

fn solve(args: SolveArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.system) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.system.display());
            return ExitCode::from(2);
        }
    };
    let system = match harness::parse_system(&text) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {}: {e}", args.system.display());
            return ExitCode::from(2);
        }
    };
    let settings = TrackerSettings {
        path_kind: args.path,
        max_steps: args.max_steps,
        certify_tol: args.tol,
        ..TrackerSettings::default()
    };
    match harness::solve_report(&system, args.seed, &settings) {
        Ok(report) => {
            if args.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads;
    match cli.command {
        Command::Solve(args) => with_threads(threads, || solve(args)),
        Command::KappaMoment(a) => {
            let rec = with_threads(threads, || harness::kappa_moment(a.n.max(1), a.trials, a.seed));
            emit(to_csv(&[rec]), &a.output)
        }
        Command::GammaMoment(a) => {
            if a.d < 2 {
                eprintln!("error: --d must be at least 2");
                return ExitCode::from(2);
            }
            let rec = with_threads(threads, || harness::gamma_moment(a.n.max(1), a.d, a.trials, a.seed));
            emit(to_csv(&[rec]), &a.output)
        }
        Command::StepScaling(a) => {
            let settings = TrackerSettings::default();
            let recs = with_threads(threads, || {
                harness::step_scaling(a.n_range.0..=a.n_range.1, a.d_range.0..=a.d_range.1, a.trials, a.seed, &settings)
            });
            emit(to_csv(&recs), &a.output)
        }
        Command::Lipschitz(a) => {
            let rec = with_threads(threads, || harness::lipschitz(a.n.max(1), a.d.max(2), a.trials, a.seed));
            emit(to_csv(&[rec]), &a.output)
        }
    }
}
