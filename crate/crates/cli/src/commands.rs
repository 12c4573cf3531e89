//! Subcommand implementations. Each returns the process exit code.

use crate::error::{CliError, CliResult};
use crate::run::{self, RunOptions};
use crate::scene::{self, Scene};
use photopol::oracle::{self, SuiteConfig};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub const ORACLE_TOL_VAR: &str = "PHOTOPOL_ORACLE_TOL";

fn read_scene(path: &Path) -> CliResult<scene::SceneFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::from(e).context(&path.display().to_string()))?;
    scene::parse(&text)
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::new(crate::error::ErrorKind::Internal, e.to_string()))?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Reads a float from the environment; unset means `None`.
pub fn env_tolerance(var: &str) -> CliResult<Option<f64>> {
    match std::env::var(var) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<f64>() {
            Ok(x) if x >= 0.0 && x.is_finite() => Ok(Some(x)),
            _ => Err(CliError::parse(format!(
                "{var}={v:?} is not a non-negative number"
            ))),
        },
    }
}

pub struct RunArgs {
    pub scene: PathBuf,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub pairs: Option<String>,
    pub csv: Option<PathBuf>,
    pub detected: Option<String>,
}

pub fn run(args: &RunArgs) -> CliResult<i32> {
    let file = read_scene(&args.scene)?;
    let detected = args
        .detected
        .as_deref()
        .map(run::parse_indices)
        .transpose()?;
    let pairs = args.pairs.as_deref().map(run::parse_pairs).transpose()?;
    let scene = Scene::build(file, args.seed, detected.as_deref())?;
    let opts = RunOptions {
        pairs,
        degenerate_tolerance: env_tolerance(run::DEGENERATE_TOL_VAR)?,
    };
    let doc = run::evaluate(&scene, &opts)?;
    if let Some(dir) = &args.csv {
        run::write_csv(&doc, dir)?;
    }
    emit(&doc, args.out.as_deref())?;
    Ok(0)
}

pub struct OracleArgs {
    pub scene: Option<PathBuf>,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
}

pub fn oracle(args: &OracleArgs) -> CliResult<i32> {
    let grid = match &args.scene {
        None => None,
        Some(path) => {
            let file = read_scene(path)?;
            let grid = photopol::build_grid(&file.grid)?;
            if grid.len() > oracle::MAX_MODES {
                return Err(CliError::validation(format!(
                    "oracle supports at most {} modes, scene has {}",
                    oracle::MAX_MODES,
                    grid.len()
                )));
            }
            Some(Arc::new(grid))
        }
    };
    let report = oracle::run_suite(&SuiteConfig {
        trials: args.trials,
        seed: args.seed,
        tolerance: args.tolerance,
        grid,
    });
    emit(&report, args.out.as_deref())?;
    Ok(if report.passed { 0 } else { 1 })
}

#[derive(Serialize)]
struct ElementInfo {
    kind: &'static str,
    parameters: &'static str,
    trace_preserving: bool,
}

const ELEMENTS: &[ElementInfo] = &[
    ElementInfo {
        kind: "identity",
        parameters: "",
        trace_preserving: true,
    },
    ElementInfo {
        kind: "polarizer",
        parameters: "angle (rad, default 0)",
        trace_preserving: false,
    },
    ElementInfo {
        kind: "retarder",
        parameters: "delta (rad), angle (rad, default 0)",
        trace_preserving: true,
    },
    ElementInfo {
        kind: "rotator",
        parameters: "angle (rad)",
        trace_preserving: true,
    },
    ElementInfo {
        kind: "pauli_depolarizer",
        parameters: "",
        trace_preserving: true,
    },
    ElementInfo {
        kind: "random_unitary",
        parameters: "n, seed (default: scene seed)",
        trace_preserving: true,
    },
    ElementInfo {
        kind: "mode_coupler",
        parameters: "mixing (KxK unitary), jones (K 2x2 matrices)",
        trace_preserving: false,
    },
    ElementInfo {
        kind: "jones",
        parameters: "matrix (2x2)",
        trace_preserving: false,
    },
    ElementInfo {
        kind: "raw",
        parameters: "realizations [{p, t (2Kx2K)}]",
        trace_preserving: false,
    },
    ElementInfo {
        kind: "compose",
        parameters: "sequence of earlier ensemble names",
        trace_preserving: false,
    },
];

pub fn elements_list() -> CliResult<i32> {
    emit(&ELEMENTS, None)?;
    Ok(0)
}

#[derive(Serialize)]
struct ValidationReport {
    valid: bool,
    modes: usize,
    states: Vec<scene::StateReport>,
    ensembles: Vec<scene::EnsembleReport>,
}

/// Builds the scene and checks every state for physicality; exit 3 when a
/// state fails.
pub fn validate(scene_path: &Path, detected: Option<&str>) -> CliResult<i32> {
    let file = read_scene(scene_path)?;
    let detected = detected.map(run::parse_indices).transpose()?;
    let scene = Scene::build(file, None, detected.as_deref())?;
    let states = scene.state_reports();
    let valid = states.iter().all(|s| s.diagnostics.is_physical());
    emit(
        &ValidationReport {
            valid,
            modes: scene.grid.len(),
            states,
            ensembles: scene.ensemble_reports(),
        },
        None,
    )?;
    Ok(if valid {
        0
    } else {
        crate::error::ErrorKind::Validation.exit_code()
    })
}
