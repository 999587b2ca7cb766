use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use csvol::{run, Command, RunOptions};

#[derive(Parser)]
#[command(name = "csvol", version, about = "Complex Chern-Simons invariants of branched ideal triangulations")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Parse, validate and print the census.
    Info(Common),
    /// Solve and sum the Chern-Simons invariant.
    Cs(Pipeline),
    /// As `cs`, then run every relation check.
    Verify {
        #[command(flatten)]
        pipeline: Pipeline,
        /// Flattening file to verify instead of solving.
        #[arg(long)]
        flattening: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    file: PathBuf,
    /// Print the JSON report on standard output.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Pipeline {
    #[command(flatten)]
    common: Common,
    /// Branching file, or `auto` to search for one.
    #[arg(long, default_value = "auto")]
    branching: String,
    /// Seed for solver restarts and random checks; falls back to CSVOL_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Gluing solver tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Boundary path file; the computed cusp basis is used otherwise.
    #[arg(long)]
    paths: Option<PathBuf>,
}

fn seed_from_env() -> Result<u64, String> {
    match std::env::var("CSVOL_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| format!("CSVOL_SEED is not an integer: `{s}`")),
        Err(_) => Ok(0),
    }
}

fn options(p: &Pipeline, flattening: Option<PathBuf>) -> Result<RunOptions, String> {
    Ok(RunOptions {
        branching: (p.branching != "auto").then(|| PathBuf::from(&p.branching)),
        seed: match p.seed {
            Some(s) => s,
            None => seed_from_env()?,
        },
        tol: p.tol,
        paths: p.paths.clone(),
        flattening,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, opts) = match &cli.command {
        Sub::Info(c) => (Command::Info, c, Ok(RunOptions::default())),
        Sub::Cs(p) => (Command::Cs, &p.common, options(p, None)),
        Sub::Verify { pipeline, flattening } => (Command::Verify, &pipeline.common, options(pipeline, flattening.clone())),
    };
    let opts = match opts {
        Ok(o) => o,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    let report = run(command, &common.file, &opts);
    if common.json {
        // A closed pipe (e.g. piping into `head`) is not an error.
        let _ = writeln!(std::io::stdout().lock(), "{}", report.to_json());
    }
    if let Some(c) = &report.census {
        eprintln!("{}", c.summary);
    }
    if let Some(cs) = &report.cs {
        eprintln!(
            "total CS = {:.15} {:+.15}i  (4π²|Im| = {:.12})",
            cs.total.re.0, cs.total.im.0, cs.volume.0
        );
    }
    for p in &report.peripheral {
        eprintln!(
            "{}: log holonomy {:.12} {:+.12}i = {}",
            p.name, p.log_holonomy.re.0, p.log_holonomy.im.0, p.form
        );
    }
    for c in report.verification.iter() {
        let mark = if c.passed { "ok  " } else { "FAIL" };
        eprintln!("{mark} {:<40} {:.3e} (tol {:.0e})", c.relation, c.residual.0, c.tolerance.0);
    }
    if report.status.exit_code != 0 {
        eprintln!("error: {}", report.status.message);
    }
    ExitCode::from(report.status.exit_code as u8)
}
