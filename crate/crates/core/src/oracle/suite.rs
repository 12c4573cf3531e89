//! Cross-check suite: fast paths against the brute-force routines, over
//! seeded random draws.

use super::*;
use crate::correlation::{
    correlation_matrix_detected, photon_number, stokes_parameters, submatrix,
};
use crate::geometry::{frame_map, transverse_delta, ReferenceBasis, SharedGrid};
use crate::random::{self, SimRng};
use crate::scattering::{
    apply_ensemble, mueller_ensemble, mueller_single, pauli_depolarizer, polarizer,
    propagate_stokes, reduce_single_mode, retarder, rotator,
};
use crate::state::{state_from_stokes, two_mode_stokes, validate};
use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Suite parameters.
#[derive(Debug, Clone, Default)]
pub struct SuiteConfig {
    /// Random instances per check family; zero runs nothing.
    pub trials: usize,
    pub seed: u64,
    /// Replaces every per-check tolerance when set.
    pub tolerance: Option<f64>,
    /// Draw states and ensembles on this grid instead of random ones.
    pub grid: Option<SharedGrid>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub criterion: u8,
    pub tolerance: f64,
    pub max_deviation: f64,
    pub worst_trial: Option<usize>,
    pub samples: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub seed: u64,
    pub trials: usize,
    pub passed: bool,
    /// Name of the check with the largest deviation-to-tolerance ratio.
    pub worst_offender: Option<String>,
    pub checks: Vec<CheckResult>,
}

struct Check {
    name: &'static str,
    criterion: u8,
    tolerance: f64,
    max: f64,
    worst: Option<usize>,
    samples: usize,
}

impl Check {
    fn new(name: &'static str, criterion: u8, tolerance: f64, over: Option<f64>) -> Self {
        Self {
            name,
            criterion,
            tolerance: over.unwrap_or(tolerance),
            max: 0.0,
            worst: None,
            samples: 0,
        }
    }

    fn record(&mut self, trial: usize, deviation: f64) {
        let d = if deviation.is_nan() {
            f64::INFINITY
        } else {
            deviation
        };
        self.samples += 1;
        if self.worst.is_none() || d > self.max {
            self.max = d;
            self.worst = Some(trial);
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.to_string(),
            criterion: self.criterion,
            tolerance: self.tolerance,
            max_deviation: self.max,
            worst_trial: self.worst,
            samples: self.samples,
            passed: self.max <= self.tolerance,
        }
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn dense_diff(a: &Dense, b: &crate::linalg::CMatrix) -> (f64, f64) {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (r, row) in a.iter().enumerate() {
        for (c, z) in row.iter().enumerate() {
            diff = diff.max((z - b[(r, c)]).norm());
            scale = scale.max(b[(r, c)].norm());
        }
    }
    (diff, scale)
}

fn field_diff(a: &[[Complex64; 4]], b: &[[Complex64; 4]]) -> (f64, f64) {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        for mu in 0..4 {
            diff = diff.max((x[mu] - y[mu]).norm());
            scale = scale.max(y[mu].norm());
        }
    }
    (diff, scale)
}

fn matrix4_diff(fast: &nalgebra::Matrix4<f64>, exact: &[[f64; 4]; 4]) -> f64 {
    let mut d = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            d = d.max((fast[(mu, nu)] - exact[mu][nu]).abs());
        }
    }
    d
}

fn oracle_vs_exact(m: &[[Complex64; 4]; 4], exact: &[[f64; 4]; 4]) -> f64 {
    let mut d = 0.0f64;
    for mu in 0..4 {
        for nu in 0..4 {
            d = d.max((m[mu][nu] - Complex64::new(exact[mu][nu], 0.0)).norm());
        }
    }
    d
}

fn trial_grid(cfg: &SuiteConfig, rng: &mut SimRng, trial: usize) -> SharedGrid {
    match &cfg.grid {
        Some(g) => Arc::clone(g),
        None => random::grid(rng, 1 + trial % 4),
    }
}

fn trial_ensemble(
    rng: &mut SimRng,
    grid: &SharedGrid,
    complete: bool,
) -> crate::scattering::ScatteringEnsemble {
    let n = rng.random_range(1..=16);
    if complete {
        random::kraus_complete_ensemble(rng, grid, n)
    } else {
        random::general_ensemble(rng, grid, n)
    }
}

fn basis_array(basis: &ReferenceBasis) -> [[f64; 3]; 3] {
    let v = basis.vectors();
    std::array::from_fn(|a| [v[a].x, v[a].y, v[a].z])
}

/// Runs every check family. Trial counts: frame checks draw ten wave
/// vectors per trial, physicality checks ten channel applications per
/// trial, the rest one instance per trial.
pub fn run_suite(cfg: &SuiteConfig) -> OracleReport {
    if cfg.trials == 0 {
        return OracleReport {
            seed: cfg.seed,
            trials: 0,
            passed: true,
            worst_offender: None,
            checks: Vec::new(),
        };
    }
    let over = cfg.tolerance;
    let mut rng = random::rng(cfg.seed);
    let mut checks = Vec::new();

    // 1: frame map
    let mut frame_vs = Check::new("frame_map_vs_oracle", 1, 1e-12, over);
    let mut ortho = Check::new("frame_orthogonality", 1, 1e-12, over);
    let mut transverse = Check::new("transverse_projector", 1, 1e-12, over);
    for t in 0..cfg.trials {
        let basis = ReferenceBasis::from_rotation(&random::rotation(&mut rng))
            .expect("random rotation is orthonormal");
        let barr = basis_array(&basis);
        let modes: Vec<Vector3<f64>> = (0..10).map(|_| random::wave_vector(&mut rng)).collect();
        let Ok(grid) = crate::geometry::ModeGrid::new(modes, vec![1.0; 10]) else {
            continue;
        };
        let grid = Arc::new(grid);
        let frame = frame_map(&grid, &basis).expect("valid grid");
        for i in 0..grid.len() {
            let k = grid.mode(i);
            let karr = [k.x, k.y, k.z];
            let l = frame.lambda(i);
            let lo = oracle_lambda(karr, &barr);
            let delta = oracle_transverse_delta(karr, &barr);
            let (mut d_vs, mut d_ortho, mut d_tr) = (0.0f64, 0.0f64, 0.0f64);
            for a in 0..3 {
                for b in 0..3 {
                    d_vs = d_vs.max((l[(a, b)] - lo[a][b]).abs());
                    let mut ltl = 0.0;
                    let mut sum_transverse = 0.0;
                    for c in 0..3 {
                        ltl += l[(c, a)] * l[(c, b)];
                    }
                    for lam in 0..2 {
                        sum_transverse += l[(a, lam)] * l[(b, lam)];
                    }
                    let id = if a == b { 1.0 } else { 0.0 };
                    d_ortho = d_ortho.max((ltl - id).abs());
                    d_tr = d_tr.max((sum_transverse - delta[a][b]).abs());
                }
            }
            // Cartesian projector against the standard-basis oracle
            let fast_delta = transverse_delta(&k).expect("nonzero k");
            let std_delta =
                oracle_transverse_delta(karr, &basis_array(&ReferenceBasis::standard()));
            for a in 0..3 {
                for b in 0..3 {
                    d_tr = d_tr.max((fast_delta[(a, b)] - std_delta[a][b]).abs());
                }
            }
            frame_vs.record(t, d_vs);
            ortho.record(t, d_ortho);
            transverse.record(t, d_tr);
        }
    }
    checks.extend([frame_vs.finish(), ortho.finish(), transverse.finish()]);

    // 2: correlation, POVM trace, detection monotonicity, basis covariance
    let mut corr = Check::new("correlation_vs_oracle", 2, 1e-10, over);
    let mut povm = Check::new("povm_trace", 2, 1e-10, over);
    let mut mono = Check::new("detection_monotonicity", 2, 1e-12, over);
    let mut cov = Check::new("basis_covariance", 2, 1e-10, over);
    for t in 0..cfg.trials {
        let grid = trial_grid(cfg, &mut rng, t);
        let k = grid.len();
        let rank = rng.random_range(1..=grid.dim());
        let state = random::state(&mut rng, &grid, rank);
        let std_frame = frame_map(&grid, &ReferenceBasis::standard()).expect("valid grid");
        let all: Vec<usize> = (0..k).collect();
        let fast = correlation_matrix_detected(&state, &std_frame, &all).expect("valid detection");
        let slow = oracle_correlation(&state, &std_frame, &all);
        let mut d = 0.0f64;
        let mut trace = Complex64::new(0.0, 0.0);
        for a in 0..3 {
            trace += slow[a][a];
            for b in 0..3 {
                d = d.max((fast.matrix()[(a, b)] - slow[a][b]).norm());
            }
        }
        corr.record(t, d);
        povm.record(
            t,
            (trace.re - 1.0)
                .abs()
                .max(trace.im.abs())
                .max((fast.trace() - photon_number(&state)).abs()),
        );

        let mut order = all.clone();
        for i in (1..k).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let mut prev = 0.0f64;
        let mut worst_drop = 0.0f64;
        for n in 1..=k {
            let tr = correlation_matrix_detected(&state, &std_frame, &order[..n])
                .expect("valid detection")
                .trace();
            worst_drop = worst_drop.max(prev - tr);
            prev = tr;
        }
        mono.record(t, worst_drop);

        let r = random::rotation(&mut rng);
        let rotated = frame_map(
            &grid,
            &ReferenceBasis::from_rotation(&r).expect("orthonormal"),
        )
        .expect("valid grid");
        let j_rot = correlation_matrix_detected(&state, &rotated, &all).expect("valid detection");
        let rc: Matrix3<Complex64> = r.map(|x| Complex64::new(x, 0.0));
        let expect = rc.transpose() * fast.matrix() * rc;
        cov.record(
            t,
            (j_rot.matrix() - expect)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
    }
    checks.extend([corr.finish(), povm.finish(), mono.finish(), cov.finish()]);

    // 3: Stokes round trips
    let mut st_vs = Check::new("stokes_vs_oracle", 3, 1e-12, over);
    let mut st_rt = Check::new("stokes_round_trip", 3, 1e-12, over);
    let mut st_inv = Check::new("stokes_oracle_inversion", 3, 1e-12, over);
    let mut coh = Check::new("coherency_reconstruction", 3, 1e-12, over);
    for t in 0..cfg.trials {
        let grid = trial_grid(cfg, &mut rng, t);
        let rank = rng.random_range(1..=grid.dim());
        let state = random::state(&mut rng, &grid, rank);
        let dense = DenseOracleState::from_state(&state);
        let fast = two_mode_stokes(&state);
        let slow = oracle_stokes(&dense);
        st_vs.record(t, field_diff(fast.values(), &slow).0);
        let (back, _) = state_from_stokes(&fast).expect("symmetric field");
        let (d, _) = dense_diff(&DenseOracleState::from_state(&back).rho, state.weighted());
        st_rt.record(t, d);
        let (d, _) = dense_diff(&oracle_expand(grid.weights(), &slow).rho, state.weighted());
        st_inv.record(t, d);

        let frame = frame_map(&grid, &ReferenceBasis::standard()).expect("valid grid");
        let all: Vec<usize> = (0..grid.len()).collect();
        let j = correlation_matrix_detected(&state, &frame, &all).expect("valid detection");
        let j3 = submatrix(&j, 3).expect("axis 3");
        let s = stokes_parameters(&j3, 3).expect("Hermitian");
        let sig = pauli_table();
        let mut d = 0.0f64;
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = Complex64::new(0.0, 0.0);
                for mu in 0..4 {
                    acc += sig[mu][a][b] * s.s[mu];
                }
                d = d.max((acc - j3[(a, b)]).norm());
            }
        }
        coh.record(t, d);
    }
    checks.extend([
        st_vs.finish(),
        st_rt.finish(),
        st_inv.finish(),
        coh.finish(),
    ]);

    // 4: channel and Stokes-space propagation
    let mut chan = Check::new("channel_vs_oracle", 4, 1e-10, over);
    let mut comm = Check::new("channel_stokes_commutation", 4, 1e-10, over);
    let mut comm_o = Check::new("channel_stokes_oracle", 4, 1e-10, over);
    let mut mue = Check::new("mueller_vs_oracle", 4, 1e-12, over);
    for t in 0..cfg.trials {
        let grid = trial_grid(cfg, &mut rng, t);
        let rank = rng.random_range(1..=grid.dim());
        let state = random::state(&mut rng, &grid, rank);
        let ens = trial_ensemble(&mut rng, &grid, t % 2 == 0);
        let out = apply_ensemble(&ens, &state).expect("shared grid");
        let (d, s) = dense_diff(&oracle_channel(&ens, &state).rho, out.weighted());
        chan.record(t, rel(d, s));

        let density_side = two_mode_stokes(&out);
        let tensor = mueller_ensemble(&ens);
        let stokes_side = propagate_stokes(&tensor, &two_mode_stokes(&state)).expect("full tensor");
        let (d, s) = field_diff(stokes_side.values(), density_side.values());
        comm.record(t, rel(d, s));
        let slow = oracle_propagate(&ens, &oracle_stokes(&DenseOracleState::from_state(&state)));
        let (d, s) = field_diff(&slow, density_side.values());
        comm_o.record(t, rel(d, s));

        let k = grid.len();
        for r in ens.realizations() {
            let pair = (
                rng.random_range(0..k),
                rng.random_range(0..k),
                rng.random_range(0..k),
                rng.random_range(0..k),
            );
            let fast = mueller_single(&grid, &r.matrix, pair).expect("valid pair");
            let slow = oracle_mueller(&grid, &r.matrix, pair);
            let mut d = 0.0f64;
            let mut s = 0.0f64;
            for mu in 0..4 {
                for nu in 0..4 {
                    d = d.max((fast[(mu, nu)] - slow[mu][nu]).norm());
                    s = s.max(slow[mu][nu].norm());
                }
            }
            mue.record(t, rel(d, s));
        }
    }
    checks.extend([chan.finish(), comm.finish(), comm_o.finish(), mue.finish()]);

    // 5: classical single-mode reduction
    let mut pol = Check::new("classical_polarizer", 5, 1e-10, over);
    let mut rot = Check::new("classical_rotator", 5, 1e-10, over);
    let mut ret = Check::new("classical_retarder", 5, 1e-10, over);
    let mut dep = Check::new("classical_depolarizer", 5, 1e-12, over);
    let single = Arc::new(crate::geometry::ModeGrid::single(Vector3::z()).expect("unit mode"));
    let reduce = |ens: &crate::scattering::ScatteringEnsemble| {
        reduce_single_mode(&mueller_ensemble(ens), 0, 0).expect("real aligned block")
    };
    let oracle_avg = |ens: &crate::scattering::ScatteringEnsemble| {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for r in ens.realizations() {
            let o = oracle_mueller(&single, &r.matrix, (0, 0, 0, 0));
            for mu in 0..4 {
                for nu in 0..4 {
                    m[mu][nu] += o[mu][nu] * r.probability;
                }
            }
        }
        m
    };
    for (n, angle) in [0.0, PI / 6.0, PI / 4.0, PI / 3.0, 1.0, -0.4]
        .into_iter()
        .enumerate()
    {
        let ens = polarizer(&single, angle).expect("finite angle");
        let exact = classical::polarizer(angle);
        pol.record(
            n,
            matrix4_diff(&reduce(&ens), &exact).max(oracle_vs_exact(&oracle_avg(&ens), &exact)),
        );
    }
    for n in 0..12 {
        let phi = PI * n as f64 / 12.0;
        let ens = rotator(&single, phi).expect("finite angle");
        let exact = classical::rotator(phi);
        rot.record(
            n,
            matrix4_diff(&reduce(&ens), &exact).max(oracle_vs_exact(&oracle_avg(&ens), &exact)),
        );
    }
    for (n, (delta, angle)) in [(PI / 2.0, 0.0), (PI, PI / 8.0), (0.3, 1.1), (2.5, -0.7)]
        .into_iter()
        .enumerate()
    {
        let ens = retarder(&single, delta, angle).expect("finite parameters");
        let exact = classical::retarder(delta, angle);
        ret.record(
            n,
            matrix4_diff(&reduce(&ens), &exact).max(oracle_vs_exact(&oracle_avg(&ens), &exact)),
        );
    }
    let ens = pauli_depolarizer(&single);
    let exact = classical::depolarizer();
    dep.record(
        0,
        matrix4_diff(&reduce(&ens), &exact).max(oracle_vs_exact(&oracle_avg(&ens), &exact)),
    );
    checks.extend([pol.finish(), rot.finish(), ret.finish(), dep.finish()]);

    // 6: physicality and trace preservation
    let mut phys = Check::new("channel_physicality", 6, 1e-10, over);
    let mut trp = Check::new("trace_preservation", 6, 1e-10, over);
    for t in 0..cfg.trials {
        for n in 0..10 {
            let grid = trial_grid(cfg, &mut rng, t + n);
            let rank = rng.random_range(1..=grid.dim());
            let state = random::state(&mut rng, &grid, rank);
            let complete = n % 2 == 0;
            let ens = trial_ensemble(&mut rng, &grid, complete);
            let out = apply_ensemble(&ens, &state).expect("shared grid");
            let diag = validate(&out);
            let scale = out.weighted().norm().max(f64::MIN_POSITIVE);
            let mut d = diag.hermiticity_defect / scale;
            d = d.max((-diag.min_eigenvalue).max(0.0) / diag.trace.abs().max(f64::MIN_POSITIVE));
            // the oracle output must satisfy the same bounds
            let slow = oracle_channel(&ens, &state);
            let mut herm = 0.0f64;
            for (r, row) in slow.rho.iter().enumerate() {
                for (c, z) in row.iter().enumerate() {
                    herm = herm.max((z - slow.rho[c][r].conj()).norm());
                }
            }
            d = d.max(herm / scale);
            phys.record(t, d);

            let change = (out.trace() - state.trace()).abs();
            let dev = match (complete, ens.trace_preserving()) {
                (true, true) => change,
                (false, false) if change > 1e-10 => 0.0,
                _ => f64::INFINITY,
            };
            trp.record(t, dev);
        }
    }
    checks.extend([phys.finish(), trp.finish()]);

    let passed = checks.iter().all(|c| c.passed);
    let worst_offender = checks
        .iter()
        .filter(|c| c.samples > 0)
        .max_by(|a, b| {
            let ra = a.max_deviation / a.tolerance;
            let rb = b.max_deviation / b.tolerance;
            ra.total_cmp(&rb)
        })
        .map(|c| c.name.clone());
    OracleReport {
        seed: cfg.seed,
        trials: cfg.trials,
        passed,
        worst_offender,
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_suite_passes() {
        let r = run_suite(&SuiteConfig::default());
        assert!(r.passed);
        assert!(r.checks.is_empty());
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let cfg = SuiteConfig {
            trials: 6,
            seed: 9,
            ..Default::default()
        };
        let a = run_suite(&cfg);
        assert!(a.passed, "{a:#?}");
        assert_eq!(a, run_suite(&cfg));
    }

    #[test]
    fn tampered_tolerance_fails() {
        let cfg = SuiteConfig {
            trials: 4,
            seed: 0,
            tolerance: Some(1e-16),
            grid: None,
        };
        let r = run_suite(&cfg);
        assert!(!r.passed);
        assert!(r.worst_offender.is_some());
    }
}
