//! `solitonlab` command-line front end: JSON configs in, CSV tables and a
//! run manifest out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod pipeline;
pub mod sim;
pub mod timing;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::Command;

#[derive(Parser, Debug)]
#[command(name = "solitonlab", version, about = "Dark-soliton oscillation experiments in elongated BECs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Subcommand, Debug)]
pub enum Sub {
    /// Ground state in the t = 0 trap.
    GroundState(Common),
    /// Double-well merge, tracking and pair-frequency fit.
    Merge(Common),
    /// Oscillation frequency of a single off-centre soliton.
    SingleFreq(Common),
    /// Pair frequency over an amplitude grid.
    Sweep(Common),
    /// Frequency-vs-amplitude table with the particle model.
    Fig2c(Common),
    /// Closed-form critical distance for the configured cloud.
    CriticalDistance(Common),
}

#[derive(Args, Debug)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides output.directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `dotted.path=value`, value parsed as JSON; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

impl Sub {
    fn split(&self) -> (Command, &Common) {
        match self {
            Sub::GroundState(c) => (Command::GroundState, c),
            Sub::Merge(c) => (Command::Merge, c),
            Sub::SingleFreq(c) => (Command::SingleFreq, c),
            Sub::Sweep(c) => (Command::Sweep, c),
            Sub::Fig2c(c) => (Command::Fig2c, c),
            Sub::CriticalDistance(c) => (Command::CriticalDistance, c),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (command, common) = cli.command.split();
    match commands::execute(command, &common.config, common.out.as_deref(), &common.overrides) {
        Ok(report) => {
            println!("{}: {}", command.name(), report.summary);
            println!("outputs in {}", report.out_dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
