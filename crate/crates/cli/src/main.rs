use clap::{Parser, Subcommand};
use photopol_cli::commands::{self, OracleArgs, RunArgs};
use photopol_cli::error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "photopol",
    version,
    about = "Single-photon polarization on momentum grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scene and write the result document.
    Run {
        #[arg(long)]
        scene: PathBuf,
        /// Result file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the scene seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Mueller pair selector, e.g. "0,0,1,1;1,1,0,0".
        #[arg(long)]
        pairs: Option<String>,
        /// Directory for CSV copies of real-valued tables.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Detected mode indices, e.g. "0,2"; overrides the scene.
        #[arg(long)]
        detected: Option<String>,
    },
    /// Cross-check fast paths against the brute-force oracle.
    Oracle {
        /// Draw states and ensembles on this scene's grid.
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replaces every per-check tolerance.
        #[arg(long = "tol", env = commands::ORACLE_TOL_VAR)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scattering element catalogue.
    Elements {
        #[command(subcommand)]
        command: ElementsCommand,
    },
    /// Parse and build a scene, report state diagnostics.
    Validate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        detected: Option<String>,
    },
}

#[derive(Subcommand)]
enum ElementsCommand {
    List,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            eprintln!("{}", CliError::parse(e.kind().to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Run {
            scene,
            out,
            seed,
            pairs,
            csv,
            detected,
        } => commands::run(&RunArgs {
            scene,
            out,
            seed,
            pairs,
            csv,
            detected,
        }),
        Command::Oracle {
            scene,
            trials,
            seed,
            tolerance,
            out,
        } => commands::oracle(&OracleArgs {
            scene,
            trials,
            seed,
            tolerance,
            out,
        }),
        Command::Elements {
            command: ElementsCommand::List,
        } => commands::elements_list(),
        Command::Validate { scene, detected } => commands::validate(&scene, detected.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
