use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fractoconvex::suites::Prop;
use fractoconvex::{Error, Report, Status, DEFAULT_CAP};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "fracto", version, about = "Queries and checks for fractoconvexities on finite spaces")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for randomized commands; recorded in every report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest ground space that may be enumerated exhaustively.
    #[arg(long, global = true, env = "FRACTO_CAP", default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Print only the status.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Render expressions with ∨ and ∩.
    #[arg(long, global = true)]
    pub unicode: bool,
    /// Record wall-clock time in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a space file and check the hull axioms of every convexity.
    Validate(SpaceArg),
    /// Hull of a set in one convexity.
    Hull {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        conv: String,
        #[command(flatten)]
        set: SetArg,
    },
    /// Membership of a set in a fracto-expression.
    Member {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        expr: ExprArg,
        #[command(flatten)]
        set: SetArg,
    },
    /// All members of a fracto-expression.
    Enumerate {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        expr: ExprArg,
    },
    /// Do two expressions have the same members?
    Eq {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        e1: String,
        #[arg(long)]
        e2: String,
    },
    /// Full-block normal form of an expression.
    Normalize {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        expr: ExprArg,
    },
    /// Members of 1/{convs} that equal their pair hull.
    Independence {
        #[command(flatten)]
        space: SpaceArg,
        /// Comma-separated convexity ids (default: all).
        #[arg(long)]
        conv: Option<String>,
    },
    /// Conical independence scan of two convexities.
    Conical {
        #[command(flatten)]
        space: SpaceArg,
        /// Two comma-separated convexity ids.
        #[arg(long)]
        conv: String,
    },
    /// Run a property suite on a space file or on seeded random spaces.
    PropCheck {
        #[arg(long)]
        prop: Prop,
        #[arg(long)]
        space: Option<PathBuf>,
        /// Random spaces to draw when no space file is given.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
    /// Write a space file to standard output.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Subcommand, Debug)]
pub enum Gen {
    /// Window of Z with the interval convexity and a permuted copy.
    Zline {
        #[arg(long)]
        size: usize,
        /// `identity`, `reversal`, `random`, or an explicit comma-separated list.
        #[arg(long, default_value = "identity")]
        perm: String,
    },
    /// Fibonacci sample of the unit sphere with one cone convexity per center.
    Sphere {
        #[arg(long)]
        points: usize,
        /// Centers as `x,y,z;x,y,z;...` (default: two preset centers).
        #[arg(long)]
        centers: Option<String>,
        /// Segment tolerance (default: 1.5 median nearest-neighbor chords).
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Args, Debug)]
pub struct SpaceArg {
    #[arg(long)]
    pub space: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExprArg {
    #[arg(long)]
    pub expr: String,
}

#[derive(Args, Debug)]
pub struct SetArg {
    /// Comma-separated element ids; empty for the empty set.
    #[arg(long, allow_hyphen_values = false)]
    pub set: String,
}

pub enum Output {
    Report(Report),
    Text(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global;
    if let Some(jobs) = g.jobs {
        if jobs == 0 || rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().is_err() {
            eprintln!("error: invalid --jobs {jobs}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    match commands::run(cli.command, &g) {
        Ok(Output::Text(text)) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Ok(Output::Report(mut report)) => {
            report.seed = Some(g.seed);
            if g.timing {
                report.timing_ms = Some(start.elapsed().as_millis() as u64);
            }
            if g.quiet {
                println!("{}", report.status);
            } else {
                println!("{}", report.to_json());
            }
            match report.status {
                Status::Fail => ExitCode::from(1),
                Status::Pass | Status::Info => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", error_kind(&e));
            ExitCode::from(2)
        }
    }
}

/// Variant name of an error, e.g. `ExtensivityViolation`.
fn error_kind(e: &Error) -> String {
    let debug = format!("{e:?}");
    debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}
