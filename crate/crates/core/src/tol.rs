//! Numerical tolerances shared across modules.

/// Orthonormality of reference bases and frame maps.
pub const ORTHONORMAL: f64 = 1e-12;
/// Relative Hermiticity defect allowed for a state kernel.
pub const HERMITIAN_REL: f64 = 1e-12;
/// Minimum eigenvalue allowed, relative to the trace.
pub const PSD_REL: f64 = 1e-10;
/// Deviation of the trace from one for a normalized state.
pub const TRACE: f64 = 1e-10;
/// Conjugate-symmetry defect accepted when inverting a Stokes field.
pub const STOKES_SYMMETRY: f64 = 1e-9;
/// Hermiticity defect accepted for 2x2 coherency input.
pub const HERMITIAN_INPUT: f64 = 1e-9;
/// Degenerate-beam threshold on Tr J(3), relative to photon number.
pub const DEGENERATE_BEAM: f64 = 1e-12;
/// Threshold on Tr J for the 3x3 effective density matrix.
pub const ZERO_TRACE: f64 = 1e-12;
/// Probability normalization of scattering ensembles.
pub const PROBABILITY_SUM: f64 = 1e-12;
/// Kraus completeness check.
pub const KRAUS_COMPLETE: f64 = 1e-10;
/// Imaginary residue allowed on aligned Mueller diagonals.
pub const MUELLER_REALITY: f64 = 1e-9;
/// Relative tolerance for duplicate-mode detection.
pub const DUPLICATE_MODE: f64 = 1e-9;
