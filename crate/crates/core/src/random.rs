//! Seeded random draws shared by Monte Carlo ensembles, the verification
//! oracle and tests. Every generator is a ChaCha8 stream seeded from a
//! `u64`, so identical seeds give identical draws on every platform.

use crate::geometry::{ModeGrid, SharedGrid};
use crate::linalg::CMatrix;
use crate::scattering::{Realization, ScatteringEnsemble};
use crate::state::PhotonState;
use nalgebra::{DVector, Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::sync::Arc;

pub type SimRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian, `E|z|² = 1`.
pub fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Orthonormalizes the columns of a Ginibre matrix (Gram-Schmidt, i.e. QR
/// with positive `R` diagonal). Square input gives a Haar unitary.
pub fn random_isometry<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    assert!(cols <= rows);
    let mut q = ginibre(rng, rows, cols);
    for j in 0..cols {
        for p in 0..j {
            let proj = q.column(p).dotc(&q.column(j));
            let col_p = q.column(p).into_owned();
            let mut col_j = q.column_mut(j);
            col_j -= col_p * proj;
        }
        let n = q.column(j).norm();
        q.column_mut(j).unscale_mut(n);
    }
    q
}

pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    random_isometry(rng, n, n)
}

/// Random proper rotation.
pub fn rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
    let m = Matrix3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let mut q = m.qr().q();
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

pub fn wave_vector<R: Rng>(rng: &mut R) -> Vector3<f64> {
    let v = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let norm: f64 = rng.random_range(0.2..5.0);
    v.normalize() * norm
}

/// `k` random distinct modes with weights in `[0.2, 3)`.
pub fn grid<R: Rng>(rng: &mut R, k: usize) -> SharedGrid {
    loop {
        let modes = (0..k).map(|_| wave_vector(rng)).collect();
        let weights = (0..k).map(|_| rng.random_range(0.2..3.0)).collect();
        if let Ok(g) = ModeGrid::new(modes, weights) {
            return Arc::new(g);
        }
    }
}

/// Random normalized state of rank `rank` (clamped to `2K`).
pub fn state<R: Rng>(rng: &mut R, grid: &SharedGrid, rank: usize) -> PhotonState {
    let dim = grid.dim();
    let g = ginibre(rng, dim, rank.clamp(1, dim));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    PhotonState::from_weighted(Arc::clone(grid), rho / tr).expect("dimensions match grid")
}

/// Random pure state.
pub fn pure_state<R: Rng>(rng: &mut R, grid: &SharedGrid) -> PhotonState {
    let v: DVector<Complex64> = DVector::from_fn(grid.dim(), |_, _| complex_normal(rng));
    let rho = &v * v.adjoint() / Complex64::new(v.norm_squared(), 0.0);
    PhotonState::from_weighted(Arc::clone(grid), rho).expect("dimensions match grid")
}

fn probabilities<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

/// `n` realizations with arbitrary complex Gaussian matrices. Almost surely
/// not trace preserving.
pub fn general_ensemble<R: Rng>(rng: &mut R, grid: &SharedGrid, n: usize) -> ScatteringEnsemble {
    let dim = grid.dim();
    let scale = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let realizations = probabilities(rng, n)
        .into_iter()
        .map(|probability| Realization {
            probability,
            matrix: ginibre(rng, dim, dim) * scale,
        })
        .collect();
    ScatteringEnsemble::new(Arc::clone(grid), realizations).expect("valid ensemble")
}

/// `n` realizations obtained by slicing a random isometry, so that
/// `Σ_A p_A T^A† T^A = 1`.
pub fn kraus_complete_ensemble<R: Rng>(
    rng: &mut R,
    grid: &SharedGrid,
    n: usize,
) -> ScatteringEnsemble {
    let dim = grid.dim();
    let v = random_isometry(rng, n * dim, dim);
    let blocks: Vec<CMatrix> = (0..n).map(|a| v.rows(a * dim, dim).into_owned()).collect();
    let weights: Vec<f64> = blocks
        .iter()
        .map(|b| (b.adjoint() * b).trace().re / dim as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    let realizations = blocks
        .into_iter()
        .zip(weights)
        .map(|(b, p)| Realization {
            probability: p / total,
            matrix: b * Complex64::new(1.0 / (p / total).sqrt(), 0.0),
        })
        .collect();
    ScatteringEnsemble::new(Arc::clone(grid), realizations).expect("valid ensemble")
}
