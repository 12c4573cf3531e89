//! Evaluates scene outputs into the result document.

use crate::error::{CliError, CliResult};
use crate::scene::{EnsembleReport, OutputSpec, Scene, StateReport};
use photopol::io::{
    mueller_entries, Conventions, GridDocument, MatrixDocument, MuellerEntry, StokesEntry,
};
use photopol::scattering::{
    apply_ensemble, mueller_ensemble, mueller_ensemble_pairs, reduce_single_mode,
};
use photopol::{
    correlation_matrix, correlation_matrix_detected, effective_density_2x2_with_tolerance,
    effective_density_3x3, stokes_parameters, submatrix, tol, two_mode_stokes, validate,
    CorrelationMatrix, Diagnostics, PairOfPairs, PhotonState,
};
use serde::Serialize;
use std::path::Path;

pub const RESULT_SCHEMA: &str = "photopol-result/1";
pub const DEGENERATE_TOL_VAR: &str = "PHOTOPOL_DEGENERATE_TOL";

/// Full tensors are only computed up to this many modes when no pairs are
/// requested; above it only aligned pairs `(i, i; l, l)` are evaluated.
pub const FULL_TENSOR_MAX_MODES: usize = 8;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Pair selection applied to Mueller outputs that do not list their own.
    pub pairs: Option<Vec<PairOfPairs>>,
    pub degenerate_tolerance: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ResultDocument {
    pub schema: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub conventions: Conventions,
    pub grid: GridDocument,
    pub basis: [[f64; 3]; 3],
    pub states: Vec<StateReport>,
    pub ensembles: Vec<EnsembleReport>,
    pub outputs: Vec<Output>,
}

#[derive(Debug, Serialize)]
pub struct Output {
    pub name: String,
    #[serde(flatten)]
    pub value: OutputValue,
}

#[derive(Debug, Serialize)]
pub struct AxisStokes {
    pub axis: usize,
    pub s: [f64; 4],
    pub degree_of_polarization: f64,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutputValue {
    Stokes {
        state: String,
        detected: Vec<usize>,
        photon_number: f64,
        /// `Tr 𝕁`: the part of the photon number on detected modes.
        detected_trace: f64,
        axes: Vec<AxisStokes>,
        #[serde(skip_serializing_if = "Option::is_none")]
        two_mode: Option<Vec<StokesEntry>>,
    },
    Correlation {
        state: String,
        detected: Vec<usize>,
        photon_number: f64,
        detected_trace: f64,
        matrix: MatrixDocument,
    },
    RhoEff {
        state: String,
        detected: Vec<usize>,
        matrix: MatrixDocument,
    },
    Rho3 {
        state: String,
        detected: Vec<usize>,
        matrix: MatrixDocument,
    },
    Mueller {
        ensemble: String,
        entries: Vec<MuellerEntry>,
    },
    ReducedMueller {
        ensemble: String,
        in_mode: usize,
        out_mode: usize,
        matrix: [[f64; 4]; 4],
    },
    Scatter {
        ensemble: String,
        state: String,
        trace_in: f64,
        trace: f64,
        diagnostics: Diagnostics,
        rho: MatrixDocument,
    },
}

fn correlation(
    scene: &Scene,
    state: &PhotonState,
    detected: &Option<Vec<usize>>,
) -> CliResult<CorrelationMatrix> {
    Ok(match detected {
        Some(d) => correlation_matrix_detected(state, &scene.frame, d)?,
        None => correlation_matrix(state, &scene.frame)?,
    })
}

fn aligned_pairs(k: usize) -> Vec<PairOfPairs> {
    let mut v = Vec::with_capacity(k * k);
    for i in 0..k {
        for l in 0..k {
            v.push((i, i, l, l));
        }
    }
    v
}

pub fn evaluate(scene: &Scene, opts: &RunOptions) -> CliResult<ResultDocument> {
    let degenerate = opts.degenerate_tolerance.unwrap_or(tol::DEGENERATE_BEAM);
    let mut outputs = Vec::with_capacity(scene.file.outputs.len());
    for (n, req) in scene.file.outputs.iter().enumerate() {
        let value = match &req.spec {
            OutputSpec::Stokes {
                state,
                axes,
                detected,
                two_mode,
            } => {
                let s = scene.state(state)?;
                let j = correlation(scene, s, detected)?;
                let axes = axes
                    .iter()
                    .map(|&a| {
                        let sv = stokes_parameters(&submatrix(&j, a)?, a)?;
                        Ok(AxisStokes {
                            axis: a,
                            s: sv.s,
                            degree_of_polarization: sv.degree_of_polarization(),
                        })
                    })
                    .collect::<CliResult<Vec<_>>>()?;
                OutputValue::Stokes {
                    state: state.clone(),
                    detected: j.detected().to_vec(),
                    photon_number: j.photon_number(),
                    detected_trace: j.trace(),
                    axes,
                    two_mode: two_mode.then(|| photopol::io::stokes_entries(&two_mode_stokes(s))),
                }
            }
            OutputSpec::Correlation { state, detected } => {
                let j = correlation(scene, scene.state(state)?, detected)?;
                OutputValue::Correlation {
                    state: state.clone(),
                    detected: j.detected().to_vec(),
                    photon_number: j.photon_number(),
                    detected_trace: j.trace(),
                    matrix: MatrixDocument::from_matrix3(j.matrix()),
                }
            }
            OutputSpec::RhoEff { state, detected } => {
                let j = correlation(scene, scene.state(state)?, detected)?;
                let rho = effective_density_2x2_with_tolerance(&j, degenerate)?;
                OutputValue::RhoEff {
                    state: state.clone(),
                    detected: j.detected().to_vec(),
                    matrix: MatrixDocument::from_matrix2(&rho),
                }
            }
            OutputSpec::Rho3 { state, detected } => {
                let j = correlation(scene, scene.state(state)?, detected)?;
                let rho = effective_density_3x3(&j)?;
                OutputValue::Rho3 {
                    state: state.clone(),
                    detected: j.detected().to_vec(),
                    matrix: MatrixDocument::from_matrix3(&rho),
                }
            }
            OutputSpec::Mueller { ensemble, pairs } => {
                let ens = scene.ensemble(ensemble)?;
                let k = scene.grid.len();
                let pairs: Option<Vec<PairOfPairs>> = pairs
                    .as_ref()
                    .map(|p| p.iter().map(|q| (q[0], q[1], q[2], q[3])).collect())
                    .or_else(|| opts.pairs.clone());
                let tensor = match pairs {
                    Some(p) => mueller_ensemble_pairs(ens, &p)?,
                    None if k <= FULL_TENSOR_MAX_MODES => mueller_ensemble(ens),
                    None => mueller_ensemble_pairs(ens, &aligned_pairs(k))?,
                };
                OutputValue::Mueller {
                    ensemble: ensemble.clone(),
                    entries: mueller_entries(&tensor),
                }
            }
            OutputSpec::ReducedMueller {
                ensemble,
                in_mode,
                out_mode,
            } => {
                let ens = scene.ensemble(ensemble)?;
                let tensor =
                    mueller_ensemble_pairs(ens, &[(*out_mode, *out_mode, *in_mode, *in_mode)])?;
                let r = reduce_single_mode(&tensor, *in_mode, *out_mode)?;
                OutputValue::ReducedMueller {
                    ensemble: ensemble.clone(),
                    in_mode: *in_mode,
                    out_mode: *out_mode,
                    matrix: std::array::from_fn(|a| std::array::from_fn(|b| r[(a, b)])),
                }
            }
            OutputSpec::Scatter { ensemble, state } => {
                let s = scene.state(state)?;
                let out = apply_ensemble(scene.ensemble(ensemble)?, s)?;
                OutputValue::Scatter {
                    ensemble: ensemble.clone(),
                    state: state.clone(),
                    trace_in: s.trace(),
                    trace: out.trace(),
                    diagnostics: validate(&out),
                    rho: MatrixDocument::from_dmatrix(out.weighted()),
                }
            }
        };
        let name = req
            .name
            .clone()
            .unwrap_or_else(|| format!("{}_{n}", kind_name(&value)));
        outputs.push(Output { name, value });
    }

    let basis = scene.frame.basis().vectors();
    Ok(ResultDocument {
        schema: RESULT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        seed: scene.seed,
        conventions: Conventions::default(),
        grid: GridDocument::from_grid(&scene.grid),
        basis: std::array::from_fn(|a| [basis[a].x, basis[a].y, basis[a].z]),
        states: scene.state_reports(),
        ensembles: scene.ensemble_reports(),
        outputs,
    })
}

fn kind_name(v: &OutputValue) -> &'static str {
    match v {
        OutputValue::Stokes { .. } => "stokes",
        OutputValue::Correlation { .. } => "correlation",
        OutputValue::RhoEff { .. } => "rho_eff",
        OutputValue::Rho3 { .. } => "rho3",
        OutputValue::Mueller { .. } => "mueller",
        OutputValue::ReducedMueller { .. } => "reduced_mueller",
        OutputValue::Scatter { .. } => "scatter",
    }
}

/// Writes the real-valued tables: one file per Stokes output
/// (`axis,s0,s1,s2,s3`) and per reduced Mueller matrix (4x4).
pub fn write_csv(doc: &ResultDocument, dir: &Path) -> CliResult<Vec<String>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for out in &doc.outputs {
        let file = dir.join(format!("{}.csv", out.name));
        match &out.value {
            OutputValue::Stokes { axes, .. } => {
                let mut w = csv::Writer::from_path(&file)?;
                w.write_record(["axis", "s0", "s1", "s2", "s3"])?;
                for a in axes {
                    let mut row = vec![a.axis.to_string()];
                    row.extend(a.s.iter().map(|x| x.to_string()));
                    w.write_record(&row)?;
                }
                w.flush()?;
            }
            OutputValue::ReducedMueller { matrix, .. } => {
                let mut w = csv::Writer::from_path(&file)?;
                w.write_record(["m0", "m1", "m2", "m3"])?;
                for row in matrix {
                    w.write_record(row.iter().map(|x| x.to_string()))?;
                }
                w.flush()?;
            }
            _ => continue,
        }
        written.push(file.display().to_string());
    }
    Ok(written)
}

/// Parses `"i,j,l,m;i,j,l,m"`.
pub fn parse_pairs(text: &str) -> CliResult<Vec<PairOfPairs>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|group| {
            let idx = parse_indices(group)?;
            match idx[..] {
                [a, b, c, d] => Ok((a, b, c, d)),
                _ => Err(CliError::parse(format!(
                    "pair selector {group:?} needs four indices"
                ))),
            }
        })
        .collect()
}

/// Parses `"0,2,3"`.
pub fn parse_indices(text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| CliError::parse(format!("bad index {s:?}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors() {
        assert_eq!(
            parse_pairs("0,0,1,1; 1,0,0,1").unwrap(),
            vec![(0, 0, 1, 1), (1, 0, 0, 1)]
        );
        assert!(parse_pairs("0,1,2").is_err());
        assert_eq!(parse_indices("2, 0").unwrap(), vec![2, 0]);
        assert!(parse_indices("a").is_err());
    }

    #[test]
    fn aligned_pair_count() {
        assert_eq!(aligned_pairs(3).len(), 9);
        assert!(aligned_pairs(3).iter().all(|p| p.0 == p.1 && p.2 == p.3));
    }
}
