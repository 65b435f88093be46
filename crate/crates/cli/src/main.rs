use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

use config::CommonArgs;

#[derive(Debug, Parser)]
#[command(name = "wavekit", version, about = "Minimal position-velocity uncertainty wave packets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form and quadrature moments of a packet
    Moments(CommonArgs),
    /// Density |Φ(x,t)|² on an (x, t) grid
    Evolve(CommonArgs),
    /// Width Δx(t)² from the spreading law and from the evolved packet
    Spread(CommonArgs),
    /// Lorentz (or Galilean, for nonrel) boost of a packet
    Boost(CommonArgs),
    /// Comoving moments in an expanding background
    Cosmo(CommonArgs),
    /// Density grids of the four spreading figures
    Figures {
        #[command(flatten)]
        common: CommonArgs,
        /// Figure number (1 to 4); all four when omitted
        #[arg(long)]
        which: Option<u8>,
    },
    /// Runs the verification suite
    Selfcheck {
        /// Criterion numbers to run; all when omitted
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
    Checks(usize),
}

impl From<wavekit::Error> for Failure {
    fn from(e: wavekit::Error) -> Self {
        use wavekit::Error::*;
        match e {
            InvalidInput(_) | InvalidParams(_) | LatticePeriodicity { .. } | Unsatisfiable(_) | KindMismatch(_)
            | InvalidBoost(_) | NonIntegerSite(_) | Domain { .. } => Failure::Config(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(format!("cannot write output: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Moments(a) => commands::moments(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::Spread(a) => commands::spread(&a),
        Command::Boost(a) => commands::boost(&a),
        Command::Cosmo(a) => commands::cosmo(&a),
        Command::Figures { common, which } => commands::figures(&common, which),
        Command::Selfcheck { criteria } => commands::selfcheck(&criteria),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Checks(n)) => {
            eprintln!("{n} criterion(s) failed");
            ExitCode::from(1)
        }
    }
}
