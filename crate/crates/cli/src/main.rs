use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use symtop::Vec3;
use symtop_cli::check::{cmd_check, Suite};
use symtop_cli::commands::{cmd_compare, cmd_orbit, cmd_simulate};
use symtop_cli::CliError;

#[derive(Parser)]
#[command(
    name = "symtop",
    version,
    about = "Symmetric-top reduction: simulate, check, compare, orbit reports"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configured run and write the trajectory as CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a property suite and report the worst residuals.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the projected full run against the reduced run.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Report the coadjoint orbit through (nu, pi).
    Orbit {
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        nu: Vec3,
        #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
        pi: Vec3,
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts = s
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    match parts[..] {
        [a, b, c] => Ok(Vec3::new(a, b, c)),
        _ => Err(format!(
            "expected three comma-separated numbers, got {}",
            parts.len()
        )),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Simulate { config, out: path } => cmd_simulate(&config, &path, &mut out),
        Command::Check { suite, seed } => cmd_check(suite, seed, &mut out),
        Command::Compare { config, tol } => cmd_compare(&config, tol, &mut out),
        Command::Orbit {
            nu,
            pi,
            count,
            seed,
        } => cmd_orbit(nu, pi, count, seed, &mut out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("symtop: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
