use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mqv_cli::check::check_all;
use mqv_cli::presets::preset;
use mqv_cli::{run, CliError, Scenario, Summary};

#[derive(Parser)]
#[command(name = "mqv", version, about = "Prepare, evolve and verify macroscopic quantum states")]
struct Cli {
    /// Multiply every grid resolution by this factor.
    #[arg(long, global = true)]
    grid_scale: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML scenario.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a named preset (fig4, fig6, fig7, fig9, tauG).
    Preset {
        name: String,
        #[arg(long, required_unless_present = "print")]
        out: Option<PathBuf>,
        /// Print the preset as TOML instead of running it.
        #[arg(long)]
        print: bool,
    },
    /// Run every preset and report all invariant checks.
    Check {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn finish(summary: Summary) -> ExitCode {
    for c in summary.checks.iter().filter(|c| !c.passed) {
        eprintln!("check failed: {} (residual {:e}, tolerance {:e})", c.name, c.residual, c.tolerance);
    }
    for a in &summary.advisories {
        eprintln!("note: {a}");
    }
    if summary.failures.is_empty() {
        println!("{}: {} checks passed", summary.scenario, summary.checks.len());
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}

fn with_scale(mut sc: Scenario, scale: Option<f64>) -> Result<Scenario, CliError> {
    if let Some(g) = scale {
        sc.grid_scale = g;
        sc.validate()?;
    }
    Ok(sc)
}

fn main_inner(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Run { config, out } => {
            let sc = with_scale(Scenario::load(&config)?, cli.grid_scale)?;
            Ok(finish(run(&sc, Some(&out))?))
        }
        Command::Preset { name, out, print } => {
            let sc = with_scale(preset(&name)?, cli.grid_scale)?;
            if print {
                print!("{}", sc.to_toml());
                return Ok(ExitCode::SUCCESS);
            }
            Ok(finish(run(&sc, out.as_deref())?))
        }
        Command::Check { out } => {
            let outcome = check_all(out.as_deref(), cli.grid_scale)?;
            for l in &outcome.lines {
                println!("{l}");
            }
            Ok(if outcome.passed { ExitCode::SUCCESS } else { ExitCode::from(3) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
