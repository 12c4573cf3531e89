//! Scene file schema and construction of the objects it names.

use crate::error::{CliError, CliResult};
use photopol::io::{from_pair, MatrixDocument, Pair};
use photopol::nalgebra::{Matrix2, Rotation3, Unit, Vector2, Vector3};
use photopol::scattering::{self, Realization, ScatteringEnsemble};
use photopol::{
    build_grid, frame_map, mixed_state, plane_wave_state, random, validate, wave_packet_state,
    Complex64, Diagnostics, FrameMap, GridSpec, PhotonState, ReferenceBasis, SharedGrid,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const SCHEMA: &str = "photopol-scene/1";

#[derive(Debug, Clone, Deserialize)]
pub struct SceneFile {
    pub schema: String,
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSpec,
    #[serde(default)]
    pub detected: Option<Vec<usize>>,
    #[serde(default)]
    pub basis: Option<BasisSpec>,
    #[serde(default)]
    pub states: Vec<NamedState>,
    #[serde(default)]
    pub ensembles: Vec<NamedEnsemble>,
    #[serde(default)]
    pub outputs: Vec<OutputRequest>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisSpec {
    Standard,
    /// Rows are `e(1), e(2), e(3)`.
    Vectors {
        vectors: [[f64; 3]; 3],
    },
    /// The standard basis rotated by `angle` about `axis`.
    Rotation {
        axis: [f64; 3],
        angle: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
pub struct NamedState {
    pub name: String,
    #[serde(flatten)]
    pub spec: StateSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    PlaneWave {
        mode: usize,
        pol: [Pair; 2],
    },
    WavePacket {
        amplitudes: Vec<Pair>,
        pols: Vec<[Pair; 2]>,
    },
    Mixed {
        parts: Vec<MixturePart>,
    },
    /// Weighted-basis `2K x 2K` density matrix, taken as is.
    Density {
        rho: MatrixDocument,
    },
    /// Random normalized state of the given rank.
    Random {
        #[serde(default = "one")]
        rank: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Deserialize)]
pub struct MixturePart {
    pub weight: f64,
    pub state: String,
}

#[derive(Debug, Clone, Deserialize)]
pub struct NamedEnsemble {
    pub name: String,
    #[serde(flatten)]
    pub spec: EnsembleSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    Identity,
    Polarizer {
        #[serde(default)]
        angle: f64,
    },
    Retarder {
        delta: f64,
        #[serde(default)]
        angle: f64,
    },
    Rotator {
        angle: f64,
    },
    PauliDepolarizer,
    RandomUnitary {
        n: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    ModeCoupler {
        mixing: MatrixDocument,
        jones: Vec<MatrixDocument>,
    },
    /// One Jones matrix applied to every mode.
    Jones {
        matrix: MatrixDocument,
    },
    /// Weighted-basis `2K x 2K` matrices with probabilities.
    Raw {
        realizations: Vec<RawRealization>,
    },
    /// Earlier ensembles applied in order.
    Compose {
        sequence: Vec<String>,
    },
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawRealization {
    pub p: f64,
    pub t: MatrixDocument,
}

#[derive(Debug, Clone, Deserialize)]
pub struct OutputRequest {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub spec: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutputSpec {
    /// Generalized Stokes parameters for the requested analyzer axes.
    Stokes {
        state: String,
        #[serde(default = "all_axes")]
        axes: Vec<usize>,
        #[serde(default)]
        detected: Option<Vec<usize>>,
        /// Also emit the two-mode Stokes field.
        #[serde(default)]
        two_mode: bool,
    },
    Correlation {
        state: String,
        #[serde(default)]
        detected: Option<Vec<usize>>,
    },
    RhoEff {
        state: String,
        #[serde(default)]
        detected: Option<Vec<usize>>,
    },
    Rho3 {
        state: String,
        #[serde(default)]
        detected: Option<Vec<usize>>,
    },
    Mueller {
        ensemble: String,
        #[serde(default)]
        pairs: Option<Vec<[usize; 4]>>,
    },
    ReducedMueller {
        ensemble: String,
        #[serde(default)]
        in_mode: usize,
        #[serde(default)]
        out_mode: usize,
    },
    Scatter {
        ensemble: String,
        state: String,
    },
}

fn all_axes() -> Vec<usize> {
    vec![1, 2, 3]
}

/// Parsed scene with every named object built.
pub struct Scene {
    pub file: SceneFile,
    pub seed: u64,
    pub grid: SharedGrid,
    pub frame: FrameMap,
    pub states: BTreeMap<String, PhotonState>,
    pub state_order: Vec<String>,
    pub ensembles: BTreeMap<String, ScatteringEnsemble>,
    pub ensemble_order: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StateReport {
    pub name: String,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    pub name: String,
    pub realizations: usize,
    pub trace_preserving: bool,
    pub completeness_defect: f64,
}

pub fn parse(text: &str) -> CliResult<SceneFile> {
    let file: SceneFile = serde_json::from_str(text)?;
    if file.schema != SCHEMA {
        return Err(CliError::parse(format!(
            "unsupported schema {:?}, expected {SCHEMA:?}",
            file.schema
        )));
    }
    Ok(file)
}

fn complex(p: &Pair) -> Complex64 {
    from_pair(*p)
}

fn pol(p: &[Pair; 2]) -> Vector2<Complex64> {
    Vector2::new(complex(&p[0]), complex(&p[1]))
}

fn matrix2(doc: &MatrixDocument) -> CliResult<Matrix2<Complex64>> {
    if doc.rows != 2 || doc.cols != 2 {
        return Err(CliError::validation(format!(
            "expected a 2x2 Jones matrix, got {}x{}",
            doc.rows, doc.cols
        )));
    }
    let m = doc.to_dmatrix()?;
    Ok(Matrix2::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]))
}

fn build_basis(spec: &Option<BasisSpec>) -> CliResult<ReferenceBasis> {
    Ok(match spec {
        None | Some(BasisSpec::Standard) => ReferenceBasis::standard(),
        Some(BasisSpec::Vectors { vectors }) => ReferenceBasis::new(vectors.map(Vector3::from))?,
        Some(BasisSpec::Rotation { axis, angle }) => {
            let axis = Vector3::from(*axis);
            if axis.norm().is_nan() || axis.norm() == 0.0 {
                return Err(CliError::validation("basis rotation axis is zero"));
            }
            let r = Rotation3::from_axis_angle(&Unit::new_normalize(axis), *angle);
            ReferenceBasis::from_rotation(r.matrix())?
        }
    })
}

impl Scene {
    /// Builds grid, frame, states and ensembles. `seed` and `detected`
    /// override the scene's values when given.
    pub fn build(
        file: SceneFile,
        seed: Option<u64>,
        detected: Option<&[usize]>,
    ) -> CliResult<Self> {
        let seed = seed.unwrap_or(file.seed);
        let mut grid = build_grid(&file.grid).map_err(|e| CliError::from(e).context("grid"))?;
        if let Some(d) = detected
            .map(<[usize]>::to_vec)
            .or_else(|| file.detected.clone())
        {
            grid = grid.with_detected(&d)?;
        }
        let grid: SharedGrid = Arc::new(grid);
        let frame = frame_map(
            &grid,
            &build_basis(&file.basis).map_err(|e| e.context("basis"))?,
        )?;

        let mut states = BTreeMap::new();
        let mut state_order = Vec::new();
        for (n, named) in file.states.iter().enumerate() {
            if states.contains_key(&named.name) {
                return Err(CliError::validation(format!(
                    "duplicate state name {:?}",
                    named.name
                )));
            }
            let state = build_state(&grid, &named.spec, &states, seed.wrapping_add(n as u64))
                .map_err(|e| e.context(&format!("state {:?}", named.name)))?;
            states.insert(named.name.clone(), state);
            state_order.push(named.name.clone());
        }

        let mut ensembles = BTreeMap::new();
        let mut ensemble_order = Vec::new();
        for named in &file.ensembles {
            if ensembles.contains_key(&named.name) {
                return Err(CliError::validation(format!(
                    "duplicate ensemble name {:?}",
                    named.name
                )));
            }
            let ens = build_ensemble(&grid, &named.spec, &ensembles, seed)
                .map_err(|e| e.context(&format!("ensemble {:?}", named.name)))?;
            ensembles.insert(named.name.clone(), ens);
            ensemble_order.push(named.name.clone());
        }

        let scene = Self {
            file,
            seed,
            grid,
            frame,
            states,
            state_order,
            ensembles,
            ensemble_order,
        };
        scene.check_references()?;
        Ok(scene)
    }

    fn check_references(&self) -> CliResult<()> {
        for out in &self.file.outputs {
            let (state, ensemble) = match &out.spec {
                OutputSpec::Stokes { state, .. }
                | OutputSpec::Correlation { state, .. }
                | OutputSpec::RhoEff { state, .. }
                | OutputSpec::Rho3 { state, .. } => (Some(state), None),
                OutputSpec::Mueller { ensemble, .. }
                | OutputSpec::ReducedMueller { ensemble, .. } => (None, Some(ensemble)),
                OutputSpec::Scatter { ensemble, state } => (Some(state), Some(ensemble)),
            };
            if let Some(s) = state {
                self.state(s)?;
            }
            if let Some(e) = ensemble {
                self.ensemble(e)?;
            }
        }
        Ok(())
    }

    pub fn state(&self, name: &str) -> CliResult<&PhotonState> {
        self.states
            .get(name)
            .ok_or_else(|| CliError::validation(format!("unknown state {name:?}")))
    }

    pub fn ensemble(&self, name: &str) -> CliResult<&ScatteringEnsemble> {
        self.ensembles
            .get(name)
            .ok_or_else(|| CliError::validation(format!("unknown ensemble {name:?}")))
    }

    pub fn state_reports(&self) -> Vec<StateReport> {
        self.state_order
            .iter()
            .map(|name| StateReport {
                name: name.clone(),
                diagnostics: validate(&self.states[name]),
            })
            .collect()
    }

    pub fn ensemble_reports(&self) -> Vec<EnsembleReport> {
        self.ensemble_order
            .iter()
            .map(|name| {
                let e = &self.ensembles[name];
                EnsembleReport {
                    name: name.clone(),
                    realizations: e.len(),
                    trace_preserving: e.trace_preserving(),
                    completeness_defect: e.completeness_defect(),
                }
            })
            .collect()
    }
}

fn build_state(
    grid: &SharedGrid,
    spec: &StateSpec,
    earlier: &BTreeMap<String, PhotonState>,
    default_seed: u64,
) -> CliResult<PhotonState> {
    Ok(match spec {
        StateSpec::PlaneWave { mode, pol: p } => plane_wave_state(grid, *mode, &pol(p))?,
        StateSpec::WavePacket { amplitudes, pols } => {
            let amps: Vec<Complex64> = amplitudes.iter().map(complex).collect();
            let pols: Vec<Vector2<Complex64>> = pols.iter().map(pol).collect();
            wave_packet_state(grid, &amps, &pols)?
        }
        StateSpec::Mixed { parts } => {
            let mut resolved = Vec::with_capacity(parts.len());
            for part in parts {
                let s = earlier.get(&part.state).ok_or_else(|| {
                    CliError::validation(format!("unknown state {:?} in mixture", part.state))
                })?;
                resolved.push((part.weight, s));
            }
            mixed_state(&resolved)?
        }
        StateSpec::Density { rho } => {
            PhotonState::from_weighted(Arc::clone(grid), rho.to_dmatrix()?)?
        }
        StateSpec::Random { rank, seed } => {
            let mut rng = random::rng(seed.unwrap_or(default_seed));
            random::state(&mut rng, grid, *rank)
        }
    })
}

fn build_ensemble(
    grid: &SharedGrid,
    spec: &EnsembleSpec,
    earlier: &BTreeMap<String, ScatteringEnsemble>,
    seed: u64,
) -> CliResult<ScatteringEnsemble> {
    Ok(match spec {
        EnsembleSpec::Identity => scattering::identity(grid),
        EnsembleSpec::Polarizer { angle } => scattering::polarizer(grid, *angle)?,
        EnsembleSpec::Retarder { delta, angle } => scattering::retarder(grid, *delta, *angle)?,
        EnsembleSpec::Rotator { angle } => scattering::rotator(grid, *angle)?,
        EnsembleSpec::PauliDepolarizer => scattering::pauli_depolarizer(grid),
        EnsembleSpec::RandomUnitary { n, seed: own } => {
            scattering::random_unitary_ensemble(grid, *n, own.unwrap_or(seed))?
        }
        EnsembleSpec::ModeCoupler { mixing, jones } => {
            let jones = jones.iter().map(matrix2).collect::<CliResult<Vec<_>>>()?;
            scattering::mode_coupler(grid, &mixing.to_dmatrix()?, &jones)?
        }
        EnsembleSpec::Jones { matrix } => scattering::jones(grid, &matrix2(matrix)?),
        EnsembleSpec::Raw { realizations } => {
            let rs = realizations
                .iter()
                .map(|r| {
                    Ok(Realization {
                        probability: r.p,
                        matrix: r.t.to_dmatrix()?,
                    })
                })
                .collect::<CliResult<Vec<_>>>()?;
            ScatteringEnsemble::new(Arc::clone(grid), rs)?
        }
        EnsembleSpec::Compose { sequence } => {
            let mut it = sequence.iter();
            let first = it
                .next()
                .ok_or_else(|| CliError::validation("compose needs at least one ensemble"))?;
            let lookup = |name: &String| {
                earlier.get(name).ok_or_else(|| {
                    CliError::validation(format!("unknown ensemble {name:?} in compose"))
                })
            };
            let mut acc = lookup(first)?.clone();
            for name in it {
                acc = acc.then(lookup(name)?)?;
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "schema": "photopol-scene/1",
        "grid": {"kind": "explicit", "modes": [{"k": [0, 0, 1]}]},
        "states": [
            {"name": "h", "kind": "plane_wave", "mode": 0, "pol": [[1, 0], [0, 0]]},
            {"name": "v", "kind": "plane_wave", "mode": 0, "pol": [[0, 0], [1, 0]]},
            {"name": "u", "kind": "mixed", "parts": [{"weight": 1, "state": "h"}, {"weight": 1, "state": "v"}]}
        ],
        "ensembles": [
            {"name": "p", "kind": "polarizer", "angle": 0.0},
            {"name": "r", "kind": "rotator", "angle": 0.3},
            {"name": "pr", "kind": "compose", "sequence": ["p", "r"]}
        ],
        "outputs": [{"kind": "rho_eff", "state": "u"}]
    }"#;

    #[test]
    fn minimal_scene_builds() {
        let scene = Scene::build(parse(MINIMAL).unwrap(), None, None).unwrap();
        assert_eq!(scene.state_order, vec!["h", "v", "u"]);
        assert_eq!(scene.ensembles["pr"].len(), 1);
        assert!(!scene.ensembles["p"].trace_preserving());
        assert!(scene
            .state_reports()
            .iter()
            .all(|r| r.diagnostics.is_physical()));
    }

    #[test]
    fn wrong_schema_is_parse_error() {
        let text = MINIMAL.replace("photopol-scene/1", "photopol-scene/0");
        assert_eq!(
            parse(&text).unwrap_err().kind,
            crate::error::ErrorKind::Parse
        );
        assert_eq!(
            parse("{not json").unwrap_err().kind,
            crate::error::ErrorKind::Parse
        );
    }

    #[test]
    fn unresolved_reference_is_validation_error() {
        let text = MINIMAL.replace(r#""state": "u"}]"#, r#""state": "missing"}]"#);
        let err = Scene::build(parse(&text).unwrap(), None, None)
            .err()
            .unwrap();
        assert_eq!(err.kind, crate::error::ErrorKind::Validation);
        assert!(err.message.contains("missing"));
    }

    #[test]
    fn detected_override_applies() {
        let text = MINIMAL.replace(
            r#""modes": [{"k": [0, 0, 1]}]"#,
            r#""modes": [{"k": [0, 0, 1]}, {"k": [1, 0, 0]}]"#,
        );
        let scene = Scene::build(parse(&text).unwrap(), None, Some(&[1])).unwrap();
        assert_eq!(scene.grid.detected_indices(), vec![1]);
        assert!(Scene::build(parse(&text).unwrap(), None, Some(&[5])).is_err());
    }

    #[test]
    fn rotated_basis() {
        let text = MINIMAL.replace(
            r#""grid""#,
            r#""basis": {"kind": "rotation", "axis": [0, 0, 1], "angle": 0.5}, "grid""#,
        );
        let scene = Scene::build(parse(&text).unwrap(), None, None).unwrap();
        let e1 = scene.frame.basis().vectors()[0];
        assert!((e1.x - 0.5f64.cos()).abs() < 1e-15);
    }
}
