//! Polarization correlation matrix `𝕁`, its 2x2 submatrices, generalized
//! Stokes parameters and effective density matrices.
//!
//! `𝕁_ab = Σ_{i∈𝒟} Σ_{λλ'} Λ_aλ(k_i) ρ̃_(iλ),(iλ') Λ_bλ'(k_i)`. Only the
//! diagonal-in-k blocks of the kernel contribute.

use crate::error::{Error, Result};
use crate::geometry::FrameMap;
use crate::pauli;
use crate::state::PhotonState;
use crate::tol;
use nalgebra::{Matrix2, Matrix2x3, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Expectation value of the 3x3 correlation operator matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    j: Matrix3<Complex64>,
    detected: Vec<usize>,
    photon_number: f64,
}

impl CorrelationMatrix {
    /// Wraps an arbitrary 3x3 matrix, e.g. for testing submatrix extraction.
    pub fn from_matrix(j: Matrix3<Complex64>, photon_number: f64) -> Self {
        Self {
            j,
            detected: Vec::new(),
            photon_number,
        }
    }

    pub fn matrix(&self) -> &Matrix3<Complex64> {
        &self.j
    }

    pub fn detected(&self) -> &[usize] {
        &self.detected
    }

    /// Photon number of the state the matrix was computed from.
    pub fn photon_number(&self) -> f64 {
        self.photon_number
    }

    pub fn trace(&self) -> f64 {
        self.j.trace().re
    }
}

/// Generalized Stokes parameters measured with the analyzer along `e(axis)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StokesVector {
    pub axis: usize,
    pub s: [f64; 4],
}

impl StokesVector {
    /// `√(s1² + s2² + s3²) / s0`, or zero for an empty beam.
    pub fn degree_of_polarization(&self) -> f64 {
        let p = (self.s[1].powi(2) + self.s[2].powi(2) + self.s[3].powi(2)).sqrt();
        if self.s[0] > 0.0 {
            p / self.s[0]
        } else {
            0.0
        }
    }

    /// `Σ_μ s_μ σ_(μ)`.
    pub fn reconstruct(&self) -> Matrix2<Complex64> {
        pauli::expand(&self.s.map(|x| Complex64::new(x, 0.0)))
    }
}

/// `𝕁` over the detected modes of the state's grid.
pub fn correlation_matrix(state: &PhotonState, frame: &FrameMap) -> Result<CorrelationMatrix> {
    let detected = state.grid().detected_indices();
    correlation_matrix_detected(state, frame, &detected)
}

/// `𝕁` over an explicit detected set.
pub fn correlation_matrix_detected(
    state: &PhotonState,
    frame: &FrameMap,
    detected: &[usize],
) -> Result<CorrelationMatrix> {
    let grid = state.grid();
    grid.check_same(frame.grid())?;
    if detected.is_empty() {
        return Err(Error::EmptyDetection);
    }
    for &i in detected {
        if i >= grid.len() {
            return Err(Error::DetectedOutOfRange {
                index: i,
                modes: grid.len(),
            });
        }
    }
    let mut j = Matrix3::<Complex64>::zeros();
    for &i in detected {
        // transverse columns of Λ, as a 3x2 complex matrix
        let l = frame
            .lambda(i)
            .fixed_columns::<2>(0)
            .map(|x| Complex64::new(x, 0.0));
        let lt: Matrix2x3<Complex64> = l.transpose();
        j += l * state.weighted_block(i, i) * lt;
    }
    let mut sorted = detected.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(CorrelationMatrix {
        j,
        detected: sorted,
        photon_number: state.trace(),
    })
}

/// Expectation of the photon-number operator, `Tr ρ̃`.
pub fn photon_number(state: &PhotonState) -> f64 {
    state.trace()
}

/// Axes `(b, c)` with `b < c`, both different from `axis` (1-based).
fn complementary_axes(axis: usize) -> Result<(usize, usize)> {
    match axis {
        1 => Ok((1, 2)),
        2 => Ok((0, 2)),
        3 => Ok((0, 1)),
        _ => Err(Error::BadAxis(axis)),
    }
}

/// `J(a)`: rows and columns of `𝕁` other than `a`, ascending.
pub fn submatrix(jmat: &CorrelationMatrix, axis: usize) -> Result<Matrix2<Complex64>> {
    let (b, c) = complementary_axes(axis)?;
    let j = &jmat.j;
    Ok(Matrix2::new(j[(b, b)], j[(b, c)], j[(c, b)], j[(c, c)]))
}

/// `s_μ = Tr{σ_(μ) J}` for a Hermitian 2x2 `J`.
pub fn stokes_parameters(j2: &Matrix2<Complex64>, axis: usize) -> Result<StokesVector> {
    complementary_axes(axis)?;
    let defect = (j2 - j2.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if !(defect <= tol::HERMITIAN_INPUT) {
        return Err(Error::NonHermitian { defect });
    }
    let s = pauli::coefficients(j2).map(|z| z.re);
    Ok(StokesVector { axis, s })
}

/// `ρ_eff = J(3) / Tr J(3)`.
pub fn effective_density_2x2(jmat: &CorrelationMatrix) -> Result<Matrix2<Complex64>> {
    effective_density_2x2_with_tolerance(jmat, tol::DEGENERATE_BEAM)
}

/// As [`effective_density_2x2`], with the degenerate-beam threshold given
/// relative to the photon number.
pub fn effective_density_2x2_with_tolerance(
    jmat: &CorrelationMatrix,
    relative: f64,
) -> Result<Matrix2<Complex64>> {
    let j3 = submatrix(jmat, 3)?;
    let trace = j3.trace().re;
    let threshold = relative * jmat.photon_number.abs();
    if !(trace > threshold) || trace <= 0.0 {
        return Err(Error::DegenerateBeam { trace });
    }
    Ok(j3 / Complex64::new(trace, 0.0))
}

/// `ρ = 𝕁 / Tr 𝕁`.
pub fn effective_density_3x3(jmat: &CorrelationMatrix) -> Result<Matrix3<Complex64>> {
    let trace = jmat.trace();
    if !(trace > tol::ZERO_TRACE) {
        return Err(Error::ZeroTrace { trace });
    }
    Ok(jmat.j / Complex64::new(trace, 0.0))
}
