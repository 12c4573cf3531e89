//! Single-photon polarization on discretized momentum grids.
//!
//! * [`geometry`]: mode grids, polarization triads, the frame map `Λ(k)`
//!   and the transverse projector.
//! * [`state`]: density kernels, purity/physicality diagnostics and
//!   two-mode Stokes fields.
//! * [`correlation`]: the 3x3 correlation matrix `𝕁`, its 2x2
//!   submatrices, Stokes parameters and effective density matrices.
//! * [`scattering`]: Kraus-type ensembles, four-mode density Mueller
//!   matrices and the single-mode classical reduction.
//! * [`oracle`]: independent brute-force recomputation of all of the above.
//!
//! Stokes coefficients use the normalized Pauli basis `σ_μ/√2`; see
//! [`pauli`].
//!
//! ```
//! use photopol::nalgebra::{Vector2, Vector3};
//! use photopol::{
//!     correlation_matrix, effective_density_2x2, frame_map, plane_wave_state, Complex64,
//!     ModeGrid, ReferenceBasis,
//! };
//! use std::sync::Arc;
//!
//! let grid = Arc::new(ModeGrid::single(Vector3::z())?);
//! let h = Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
//! let state = plane_wave_state(&grid, 0, &h)?;
//! let frame = frame_map(&grid, &ReferenceBasis::standard())?;
//! let rho = effective_density_2x2(&correlation_matrix(&state, &frame)?)?;
//! assert!((rho[(0, 0)].re - 1.0).abs() < 1e-15);
//! assert!(rho[(1, 1)].norm() < 1e-15);
//! # Ok::<(), photopol::Error>(())
//! ```

// NaN must fail every positivity check, hence `!(x > 0.0)`; the oracle and
// small fixed-size kernels index explicitly on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod correlation;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pauli;
pub mod random;
pub mod scattering;
pub mod state;
pub mod tol;

pub use correlation::{
    correlation_matrix, correlation_matrix_detected, effective_density_2x2,
    effective_density_2x2_with_tolerance, effective_density_3x3, photon_number, stokes_parameters,
    submatrix, CorrelationMatrix, StokesVector,
};
pub use error::{Error, Result};
pub use geometry::{
    build_grid, frame_map, polarization_triad, transverse_delta, FrameMap, GridSpec, ModeGrid,
    ReferenceBasis, SharedGrid,
};
pub use scattering::{
    apply_ensemble, mueller_ensemble, mueller_ensemble_pairs, mueller_single, propagate_stokes,
    reduce_single_mode, MuellerTensor, PairOfPairs, Realization, ScatteringEnsemble,
};
pub use state::{
    mixed_state, plane_wave_state, state_from_stokes, two_mode_stokes, validate, wave_packet_state,
    Diagnostics, PhotonState, StokesField,
};

pub use nalgebra;
pub use num_complex::Complex64;
