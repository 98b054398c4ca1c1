use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use weakval::commands::{cmd_hvt, cmd_list, cmd_scenario, cmd_weakmeas, Format, WeakmeasArgs};

/// Pre/post-selected quantum scenarios, weak-measurement pointer
/// simulations and noncontextual assignment searches.
///
/// Exit status: 0 success, 1 a check failed, 2 usage or parse error,
/// 3 numerical configuration error.
#[derive(Parser)]
#[command(name = "weakval", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recompute every expected value of a named scenario.
    Scenario {
        name: String,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Simulate a Gaussian pointer weakly coupled to one observable.
    Weakmeas {
        scenario: String,
        observable: String,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        grid_points: Option<usize>,
        #[arg(long)]
        grid_halfwidth: Option<f64>,
        /// Directory for exact.csv, sampled.csv and summary.json.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Verify a context table and search for noncontextual assignments.
    Hvt {
        /// Table file, or a built-in table name.
        table: String,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List scenarios, their observables and built-in tables.
    List {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Scenario {
            name,
            format,
            output,
        } => cmd_scenario(&name, format, output.as_deref(), &mut out),
        Command::Weakmeas {
            scenario,
            observable,
            lambda,
            samples,
            seed,
            grid_points,
            grid_halfwidth,
            output,
            format,
        } => cmd_weakmeas(
            &WeakmeasArgs {
                scenario,
                observable,
                lambda,
                samples,
                seed,
                grid_points,
                grid_halfwidth,
                output,
                format,
            },
            &mut out,
        ),
        Command::Hvt {
            table,
            format,
            output,
        } => cmd_hvt(&table, format, output.as_deref(), &mut out),
        Command::List { format } => cmd_list(format, &mut out),
    };
    let _ = out.flush();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("weakval: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
