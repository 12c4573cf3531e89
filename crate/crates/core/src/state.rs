//! Single-photon density kernels and two-mode Stokes fields.
//!
//! A kernel `ρ_λλ'(k_i, k_j)` is stored in the weighted orthonormal basis
//! `ρ̃_(iλ),(jλ') = √(w_i w_j) ρ_λλ'(k_i, k_j)` as a dense `2K x 2K` matrix,
//! row index `2i + λ`. In that basis the trace is the photon number.

use crate::error::{Error, Result};
use crate::geometry::SharedGrid;
use crate::linalg::{self, CMatrix};
use crate::pauli;
use crate::tol;
use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A (possibly unnormalized) single-photon state on a mode grid.
#[derive(Debug, Clone)]
pub struct PhotonState {
    grid: SharedGrid,
    rho: CMatrix,
}

/// Physicality measurements of a state kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace: f64,
    pub hermitian: bool,
    pub positive: bool,
    pub normalized: bool,
}

impl Diagnostics {
    pub fn is_physical(&self) -> bool {
        self.hermitian && self.positive
    }
}

impl PhotonState {
    /// Wraps a weighted-basis matrix without checking physicality.
    pub fn from_weighted(grid: SharedGrid, rho: CMatrix) -> Result<Self> {
        let dim = grid.dim();
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: rho.nrows() * rho.ncols(),
            });
        }
        Ok(Self { grid, rho })
    }

    /// Builds the weighted matrix from kernel blocks `ρ(k_i, k_j)`.
    pub fn from_kernel<F>(grid: SharedGrid, mut block: F) -> Self
    where
        F: FnMut(usize, usize) -> Matrix2<Complex64>,
    {
        let k = grid.len();
        let mut rho = CMatrix::zeros(2 * k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                let s = (grid.weight(i) * grid.weight(j)).sqrt();
                let b = block(i, j);
                for a in 0..2 {
                    for c in 0..2 {
                        rho[(2 * i + a, 2 * j + c)] = b[(a, c)] * s;
                    }
                }
            }
        }
        Self { grid, rho }
    }

    pub fn grid(&self) -> &SharedGrid {
        &self.grid
    }

    /// The weighted-basis matrix `ρ̃`.
    pub fn weighted(&self) -> &CMatrix {
        &self.rho
    }

    pub fn into_weighted(self) -> CMatrix {
        self.rho
    }

    /// 2x2 block of `ρ̃` for the mode pair `(i, j)`.
    pub fn weighted_block(&self, i: usize, j: usize) -> Matrix2<Complex64> {
        self.rho.fixed_view::<2, 2>(2 * i, 2 * j).into_owned()
    }

    /// Kernel block `ρ(k_i, k_j) = ρ̃ block / √(w_i w_j)`.
    pub fn kernel_block(&self, i: usize, j: usize) -> Matrix2<Complex64> {
        let s = (self.grid.weight(i) * self.grid.weight(j)).sqrt();
        self.weighted_block(i, j) / Complex64::new(s, 0.0)
    }

    /// Real part of `Tr ρ̃`.
    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            rho: &self.rho * Complex64::new(factor, 0.0),
        }
    }
}

fn pol_norm_sqr(pol: &Vector2<Complex64>) -> f64 {
    pol.iter().map(|z| z.norm_sqr()).sum()
}

/// Pure state with all its weight in one mode and polarization `pol`.
pub fn plane_wave_state(
    grid: &SharedGrid,
    mode: usize,
    pol: &Vector2<Complex64>,
) -> Result<PhotonState> {
    grid.check_index(mode)?;
    let n = pol_norm_sqr(pol);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroPolarization);
    }
    let dim = grid.dim();
    let mut rho = CMatrix::zeros(dim, dim);
    let block = pol * pol.adjoint() / Complex64::new(n, 0.0);
    rho.fixed_view_mut::<2, 2>(2 * mode, 2 * mode)
        .copy_from(&block);
    Ok(PhotonState {
        grid: Arc::clone(grid),
        rho,
    })
}

/// Normalized pure wave packet `ρ(k_i,k_j) ∝ a_i p_i (a_j p_j)†`.
pub fn wave_packet_state(
    grid: &SharedGrid,
    amplitudes: &[Complex64],
    pols: &[Vector2<Complex64>],
) -> Result<PhotonState> {
    let k = grid.len();
    if amplitudes.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: amplitudes.len(),
        });
    }
    if pols.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: pols.len(),
        });
    }
    let mut v = nalgebra::DVector::<Complex64>::zeros(2 * k);
    for i in 0..k {
        let s = grid.weight(i).sqrt();
        v[2 * i] = amplitudes[i] * pols[i][0] * s;
        v[2 * i + 1] = amplitudes[i] * pols[i][1] * s;
    }
    let n = v.norm_squared();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let rho = &v * v.adjoint() / Complex64::new(n, 0.0);
    Ok(PhotonState {
        grid: Arc::clone(grid),
        rho,
    })
}

/// Convex combination renormalized to unit trace.
pub fn mixed_state(parts: &[(f64, &PhotonState)]) -> Result<PhotonState> {
    let (_, first) = parts.first().ok_or(Error::InvalidMixtureWeights)?;
    let grid = Arc::clone(first.grid());
    let dim = grid.dim();
    let mut rho = CMatrix::zeros(dim, dim);
    let mut weight_sum = 0.0;
    for (w, state) in parts {
        if !(*w >= 0.0) || !w.is_finite() {
            return Err(Error::InvalidMixtureWeights);
        }
        grid.check_same(state.grid())?;
        weight_sum += w;
        rho += &state.rho * Complex64::new(*w, 0.0);
    }
    if !(weight_sum > 0.0) {
        return Err(Error::InvalidMixtureWeights);
    }
    let tr = rho.trace().re;
    if !(tr > 0.0) {
        return Err(Error::ZeroNorm);
    }
    rho /= Complex64::new(tr, 0.0);
    Ok(PhotonState { grid, rho })
}

/// Measures Hermiticity defect, smallest eigenvalue and trace.
pub fn validate(state: &PhotonState) -> Diagnostics {
    diagnose(&state.rho)
}

pub(crate) fn diagnose(rho: &CMatrix) -> Diagnostics {
    let hermiticity_defect = linalg::hermiticity_defect(rho);
    let min_eigenvalue = linalg::min_eigenvalue(rho);
    let trace = rho.trace().re;
    let scale = rho.norm();
    Diagnostics {
        hermiticity_defect,
        min_eigenvalue,
        trace,
        hermitian: hermiticity_defect <= tol::HERMITIAN_REL * scale,
        positive: min_eigenvalue >= -tol::PSD_REL * trace.abs().max(f64::MIN_POSITIVE),
        normalized: (trace - 1.0).abs() <= tol::TRACE,
    }
}

/// Two-mode Stokes parameters `S_μ(k_i, k_j) = Tr{σ_(μ) ρ(k_i, k_j)}`.
#[derive(Debug, Clone)]
pub struct StokesField {
    grid: SharedGrid,
    values: Vec<[Complex64; 4]>,
}

impl StokesField {
    pub fn from_values(grid: SharedGrid, values: Vec<[Complex64; 4]>) -> Result<Self> {
        let expected = grid.len() * grid.len();
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SharedGrid {
        &self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> &[Complex64; 4] {
        &self.values[i * self.grid.len() + j]
    }

    pub fn values(&self) -> &[[Complex64; 4]] {
        &self.values
    }

    /// Mode-normalized Stokes vector `w_i Re S(k_i, k_i)`; this is the
    /// ordinary Stokes vector of the photon's component in mode `i`.
    pub fn mode_vector(&self, i: usize) -> [f64; 4] {
        let w = self.grid.weight(i);
        self.get(i, i).map(|z| z.re * w)
    }

    /// Largest `|S(i,j) − S(j,i)*|`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let k = self.grid.len();
        let mut worst = 0.0f64;
        for i in 0..k {
            for j in i..k {
                let (a, b) = (self.get(i, j), self.get(j, i));
                for mu in 0..4 {
                    worst = worst.max((a[mu] - b[mu].conj()).norm());
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &StokesField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max)
    }
}

/// Expands every kernel block in the normalized Pauli basis.
pub fn two_mode_stokes(state: &PhotonState) -> StokesField {
    let k = state.grid.len();
    let mut values = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            values.push(pauli::coefficients(&state.kernel_block(i, j)));
        }
    }
    StokesField {
        grid: Arc::clone(&state.grid),
        values,
    }
}

/// Inverts [`two_mode_stokes`]. The result need not be physical; the
/// returned diagnostics say whether it is.
pub fn state_from_stokes(field: &StokesField) -> Result<(PhotonState, Diagnostics)> {
    let defect = field.conjugate_symmetry_defect();
    let scale = field
        .values
        .iter()
        .flat_map(|s| s.iter().map(|z| z.norm()))
        .fold(1.0, f64::max);
    if !(defect <= tol::STOKES_SYMMETRY * scale) {
        return Err(Error::ConjugateSymmetry { defect });
    }
    let state = PhotonState::from_kernel(Arc::clone(&field.grid), |i, j| {
        pauli::expand(field.get(i, j))
    });
    let diagnostics = validate(&state);
    Ok((state, diagnostics))
}
