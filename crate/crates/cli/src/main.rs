mod commands;
mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use coble::session::SessionError;

#[derive(Parser, Debug)]
#[command(name = "coble", version, about = "Coble cubic, abelian surface chords and dual sextic over prime fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a seeded trivector that passes the suitability gate.
    Gen(Common),
    /// Pfaffian cubic and its uniqueness by interpolation.
    Cubic(Common),
    /// Dual sextic by interpolation; climbs the prime ladder unless --prime is given.
    Sextic(Common),
    /// Full scan of the surface and the rank census.
    Scan(Common),
    /// Group law checks on the surface points.
    Group(Common),
    /// Orbit label of a trivector in eight variables.
    Classify(Common),
    /// The whole verification suite.
    Verify(VerifyArgs),
    /// Merge the artifacts found in the output directory.
    Report(Common),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Prime field; each command has its own default.
    #[arg(long)]
    prime: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trivector file, or "random" for a seeded one.
    #[arg(long, default_value = "random")]
    input: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated criterion ids; all of them by default.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<u32>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Session(#[from] SessionError),
    #[error("{0}")]
    Usage(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Gen(c) => commands::gen(&c),
        Command::Cubic(c) => commands::cubic(&c),
        Command::Sextic(c) => commands::sextic(&c),
        Command::Scan(c) => commands::scan(&c),
        Command::Group(c) => commands::group(&c),
        Command::Classify(c) => commands::classify(&c),
        Command::Verify(v) => commands::verify(&v),
        Command::Report(c) => commands::report(&c),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
