//! Named ensemble constructors. Single-mode optical elements act with the
//! same Jones matrix on every mode of the grid.

use super::ScatteringEnsemble;
use crate::error::{Error, Result};
use crate::geometry::SharedGrid;
use crate::linalg::CMatrix;
use crate::pauli;
use crate::random;
use nalgebra::Matrix2;
use num_complex::Complex64;
use std::sync::Arc;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite, got {x}"
        )))
    }
}

fn block_diagonal(grid: &SharedGrid, blocks: impl Fn(usize) -> Matrix2<Complex64>) -> CMatrix {
    let dim = grid.dim();
    let mut t = CMatrix::zeros(dim, dim);
    for i in 0..grid.len() {
        t.fixed_view_mut::<2, 2>(2 * i, 2 * i).copy_from(&blocks(i));
    }
    t
}

fn rotation(angle: f64) -> Matrix2<Complex64> {
    let (s, co) = angle.sin_cos();
    Matrix2::new(c(co), c(-s), c(s), c(co))
}

/// `{(1, 1)}`.
pub fn identity(grid: &SharedGrid) -> ScatteringEnsemble {
    jones(grid, &Matrix2::identity())
}

/// The same Jones matrix on every mode, with probability one.
pub fn jones(grid: &SharedGrid, j: &Matrix2<Complex64>) -> ScatteringEnsemble {
    ScatteringEnsemble::uniform(Arc::clone(grid), vec![block_diagonal(grid, |_| *j)])
        .expect("single realization with unit probability")
}

/// Linear polarizer transmitting along `cos(angle) ε1 + sin(angle) ε2`.
pub fn polarizer(grid: &SharedGrid, angle: f64) -> Result<ScatteringEnsemble> {
    finite("angle", angle)?;
    let (s, co) = angle.sin_cos();
    Ok(jones(
        grid,
        &Matrix2::new(c(co * co), c(co * s), c(co * s), c(s * s)),
    ))
}

/// Linear retarder: phase `delta` on the slow axis at `angle` from `ε1`.
pub fn retarder(grid: &SharedGrid, delta: f64, angle: f64) -> Result<ScatteringEnsemble> {
    finite("delta", delta)?;
    finite("angle", angle)?;
    let core = Matrix2::new(c(1.0), c(0.0), c(0.0), Complex64::from_polar(1.0, delta));
    Ok(jones(grid, &(rotation(angle) * core * rotation(-angle))))
}

/// Polarization rotator `[[cos φ, −sin φ], [sin φ, cos φ]]`.
pub fn rotator(grid: &SharedGrid, angle: f64) -> Result<ScatteringEnsemble> {
    finite("angle", angle)?;
    Ok(jones(grid, &rotation(angle)))
}

/// `{(1/4, σ_A)}` with unnormalized Paulis `σ_0 .. σ_3`.
pub fn pauli_depolarizer(grid: &SharedGrid) -> ScatteringEnsemble {
    let matrices = (0..4)
        .map(|a| {
            let s = pauli::sigma(a);
            block_diagonal(grid, |_| s)
        })
        .collect();
    ScatteringEnsemble::uniform(Arc::clone(grid), matrices).expect("four equal realizations")
}

/// `n` realizations, each an independent Haar-random 2x2 unitary per mode,
/// drawn from a generator seeded with `seed`.
pub fn random_unitary_ensemble(
    grid: &SharedGrid,
    n: usize,
    seed: u64,
) -> Result<ScatteringEnsemble> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let mut rng = random::rng(seed);
    let matrices = (0..n)
        .map(|_| {
            let blocks: Vec<Matrix2<Complex64>> = (0..grid.len())
                .map(|_| {
                    let u = random::haar_unitary(&mut rng, 2);
                    Matrix2::new(u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)])
                })
                .collect();
            block_diagonal(grid, |i| blocks[i])
        })
        .collect();
    ScatteringEnsemble::uniform(Arc::clone(grid), matrices)
}

/// `T̃_(iλ),(jλ') = U_ij J_j,λλ'`: unitary mixing `U` over modes after a
/// per-mode Jones matrix `J_j`.
pub fn mode_coupler(
    grid: &SharedGrid,
    mixing: &CMatrix,
    jones: &[Matrix2<Complex64>],
) -> Result<ScatteringEnsemble> {
    let k = grid.len();
    if mixing.nrows() != k || mixing.ncols() != k {
        return Err(Error::DimensionMismatch {
            expected: k * k,
            found: mixing.nrows() * mixing.ncols(),
        });
    }
    if jones.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: jones.len(),
        });
    }
    let defect =
        crate::linalg::max_abs_diff(&(mixing.adjoint() * mixing), &CMatrix::identity(k, k));
    if defect > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "mode mixing matrix is not unitary (defect {defect:e})"
        )));
    }
    let mut t = CMatrix::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let b = jones[j] * mixing[(i, j)];
            t.fixed_view_mut::<2, 2>(2 * i, 2 * j).copy_from(&b);
        }
    }
    ScatteringEnsemble::uniform(Arc::clone(grid), vec![t])
}
