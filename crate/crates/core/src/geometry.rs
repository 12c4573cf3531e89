//! Discretized momentum grid, polarization triads and the frame map `Λ(k)`.
//!
//! A continuum integral `∫ d̃k f(k)` becomes `Σ_i w_i f(k_i)`; the plane-wave
//! normalization becomes `⟨i|j⟩ = δ_ij / w_i`. All `(2π)³ 2k⁰` factors live
//! inside the weights.

use crate::error::{Error, Result};
use crate::tol;
use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Grids are shared between states, frame maps and ensembles.
pub type SharedGrid = Arc<ModeGrid>;

/// Finite set of wave vectors with quadrature weights and a detection mask.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    modes: Vec<Vector3<f64>>,
    weights: Vec<f64>,
    detected: Vec<bool>,
}

impl ModeGrid {
    /// Builds a grid from explicit wave vectors and weights. Every mode is
    /// detected.
    pub fn new(modes: Vec<Vector3<f64>>, weights: Vec<f64>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if weights.len() != modes.len() {
            return Err(Error::DimensionMismatch {
                expected: modes.len(),
                found: weights.len(),
            });
        }
        for (index, k) in modes.iter().enumerate() {
            let n = k.norm();
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::ZeroWaveVector { index });
            }
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight > 0.0) || !weight.is_finite() {
                return Err(Error::NonPositiveWeight { index, weight });
            }
        }
        // sweep along x: a duplicate pair is never further apart in x than
        // the tolerance at the largest norm
        let reach = tol::DUPLICATE_MODE * modes.iter().map(|k| k.norm()).fold(0.0, f64::max);
        let mut order: Vec<usize> = (0..modes.len()).collect();
        order.sort_by(|&a, &b| modes[a].x.total_cmp(&modes[b].x));
        for (n, &i) in order.iter().enumerate() {
            for &j in &order[n + 1..] {
                if modes[j].x - modes[i].x > reach {
                    break;
                }
                let scale = modes[i].norm().max(modes[j].norm());
                if (modes[i] - modes[j]).norm() < tol::DUPLICATE_MODE * scale {
                    return Err(Error::DuplicateMode {
                        first: i.min(j),
                        second: i.max(j),
                    });
                }
            }
        }
        let detected = vec![true; modes.len()];
        Ok(Self {
            modes,
            weights,
            detected,
        })
    }

    /// Single mode with unit weight.
    pub fn single(k: Vector3<f64>) -> Result<Self> {
        Self::new(vec![k], vec![1.0])
    }

    /// Restricts detection to `indices`. An empty list is allowed here; the
    /// correlation module rejects it.
    pub fn with_detected(mut self, indices: &[usize]) -> Result<Self> {
        let k = self.modes.len();
        let mut mask = vec![false; k];
        for &index in indices {
            if index >= k {
                return Err(Error::DetectedOutOfRange { index, modes: k });
            }
            mask[index] = true;
        }
        self.detected = mask;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Vector3<f64>] {
        &self.modes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mode(&self, i: usize) -> Vector3<f64> {
        self.modes[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn detected_mask(&self) -> &[bool] {
        &self.detected
    }

    pub fn is_detected(&self, i: usize) -> bool {
        self.detected[i]
    }

    pub fn detected_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.detected[i]).collect()
    }

    /// Dimension of the single-photon space, `2K`.
    pub fn dim(&self) -> usize {
        2 * self.modes.len()
    }

    /// True when both grids have identical modes and weights. Detection
    /// masks are not compared.
    pub fn same_modes(&self, other: &ModeGrid) -> bool {
        std::ptr::eq(self, other) || (self.modes == other.modes && self.weights == other.weights)
    }

    pub(crate) fn check_same(&self, other: &ModeGrid) -> Result<()> {
        if self.same_modes(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                index,
                modes: self.len(),
            })
        }
    }
}

/// An explicit mode with its quadrature weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub k: [f64; 3],
    #[serde(default = "unit_weight")]
    pub w: f64,
}

fn unit_weight() -> f64 {
    1.0
}

fn default_k_norm() -> f64 {
    1.0
}

fn default_z() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

/// Grid description as found in scene files.
///
/// Sampled grids (`cap`, `sphere`) get weights proportional to the solid
/// angle of each cell, normalized to sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridSpec {
    Explicit {
        modes: Vec<ModeEntry>,
    },
    /// Central mode plus `rings` rings of `per_ring` modes, out to polar
    /// angle `half_angle` around `center`.
    Cap {
        #[serde(default = "default_z")]
        center: [f64; 3],
        half_angle: f64,
        rings: usize,
        per_ring: usize,
        #[serde(default = "default_k_norm")]
        k_norm: f64,
    },
    /// Full sphere: `rings` polar bands of `per_ring` modes, poles excluded.
    Sphere {
        rings: usize,
        per_ring: usize,
        #[serde(default = "default_k_norm")]
        k_norm: f64,
    },
}

/// Builds a grid from its description. Detection defaults to all modes.
pub fn build_grid(spec: &GridSpec) -> Result<ModeGrid> {
    match spec {
        GridSpec::Explicit { modes } => {
            if modes.is_empty() {
                return Err(Error::EmptyGrid);
            }
            ModeGrid::new(
                modes.iter().map(|m| Vector3::from(m.k)).collect(),
                modes.iter().map(|m| m.w).collect(),
            )
        }
        GridSpec::Cap {
            center,
            half_angle,
            rings,
            per_ring,
            k_norm,
        } => cap_grid(
            Vector3::from(*center),
            *half_angle,
            *rings,
            *per_ring,
            *k_norm,
        ),
        GridSpec::Sphere {
            rings,
            per_ring,
            k_norm,
        } => sphere_grid(*rings, *per_ring, *k_norm),
    }
}

fn check_k_norm(k_norm: f64) -> Result<()> {
    if k_norm > 0.0 && k_norm.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "k_norm must be positive, got {k_norm}"
        )))
    }
}

fn unit_sphere_point(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

/// Rotation taking `ẑ` onto `dir` (unit). Antipodal case turns about `x̂`.
fn rotation_from_z(dir: &Vector3<f64>) -> Rotation3<f64> {
    let z = Vector3::z();
    Rotation3::rotation_between(&z, dir)
        .unwrap_or_else(|| Rotation3::from_axis_angle(&Unit::new_unchecked(Vector3::x()), PI))
}

fn normalize_weights(weights: &mut [f64]) {
    let total: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
}

fn cap_grid(
    center: Vector3<f64>,
    half_angle: f64,
    rings: usize,
    per_ring: usize,
    k_norm: f64,
) -> Result<ModeGrid> {
    check_k_norm(k_norm)?;
    let c = center.norm();
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::ZeroVector);
    }
    if !(0.0..PI).contains(&half_angle) {
        return Err(Error::InvalidParameter(format!(
            "cap half_angle must lie in [0, π), got {half_angle}"
        )));
    }
    let dir = center / c;
    if half_angle == 0.0 || rings == 0 {
        return ModeGrid::single(dir * k_norm);
    }
    if per_ring == 0 {
        return Err(Error::InvalidParameter(
            "per_ring must be at least 1".into(),
        ));
    }
    let rot = rotation_from_z(&dir);
    let step = half_angle / rings as f64;
    let mut modes = vec![dir * k_norm];
    let mut weights = vec![2.0 * PI * (1.0 - (0.5 * step).cos())];
    for r in 1..=rings {
        let theta = step * r as f64;
        let lo = step * (r as f64 - 0.5);
        let hi = (step * (r as f64 + 0.5)).min(half_angle);
        let cell = 2.0 * PI * (lo.cos() - hi.cos()) / per_ring as f64;
        for j in 0..per_ring {
            let phi = 2.0 * PI * j as f64 / per_ring as f64;
            modes.push(rot * unit_sphere_point(theta, phi) * k_norm);
            weights.push(cell);
        }
    }
    normalize_weights(&mut weights);
    ModeGrid::new(modes, weights)
}

fn sphere_grid(rings: usize, per_ring: usize, k_norm: f64) -> Result<ModeGrid> {
    check_k_norm(k_norm)?;
    if rings == 0 || per_ring == 0 {
        return Err(Error::EmptyGrid);
    }
    let step = PI / rings as f64;
    let mut modes = Vec::with_capacity(rings * per_ring);
    let mut weights = Vec::with_capacity(rings * per_ring);
    for r in 0..rings {
        let lo = step * r as f64;
        let hi = step * (r + 1) as f64;
        let theta = 0.5 * (lo + hi);
        let cell = 2.0 * PI * (lo.cos() - hi.cos()) / per_ring as f64;
        for j in 0..per_ring {
            let phi = 2.0 * PI * (j as f64 + 0.5) / per_ring as f64;
            modes.push(unit_sphere_point(theta, phi) * k_norm);
            weights.push(cell);
        }
    }
    normalize_weights(&mut weights);
    ModeGrid::new(modes, weights)
}

/// Linear polarization triad `(ε1, ε2, ε3)` for wave vector `k`.
///
/// Spherical-polar convention: `ε1 = θ̂`, `ε2 = φ̂`, `ε3 = k/|k|`. On the
/// `±ẑ` axis `ε1 = x̂` and `ε2 = ±ŷ`, keeping `ε1 × ε2 = k/|k|`.
pub fn polarization_triad(k: &Vector3<f64>) -> Result<[Vector3<f64>; 3]> {
    let norm = k.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    let k_hat = k / norm;
    let rho = k.x.hypot(k.y);
    if rho == 0.0 {
        let sign = k.z.signum();
        return Ok([Vector3::x(), Vector3::new(0.0, sign, 0.0), k_hat]);
    }
    let (cos_phi, sin_phi) = (k.x / rho, k.y / rho);
    let (cos_theta, sin_theta) = (k.z / norm, rho / norm);
    let theta_hat = Vector3::new(cos_theta * cos_phi, cos_theta * sin_phi, -sin_theta);
    let phi_hat = Vector3::new(-sin_phi, cos_phi, 0.0);
    Ok([theta_hat, phi_hat, k_hat])
}

/// Transverse projector `Δ_aa' = δ_aa' − k_a k_a' / |k|²`.
pub fn transverse_delta(k: &Vector3<f64>) -> Result<Matrix3<f64>> {
    let n2 = k.norm_squared();
    if !(n2 > 0.0) || !n2.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(Matrix3::identity() - k * k.transpose() / n2)
}

/// Three orthonormal reference vectors `e(1), e(2), e(3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceBasis([Vector3<f64>; 3]);

impl ReferenceBasis {
    pub fn new(vectors: [Vector3<f64>; 3]) -> Result<Self> {
        let defect = basis_defect(&vectors);
        if defect.is_finite() && defect <= tol::ORTHONORMAL {
            Ok(Self(vectors))
        } else {
            Err(Error::NonOrthonormalBasis { defect })
        }
    }

    pub fn standard() -> Self {
        Self([Vector3::x(), Vector3::y(), Vector3::z()])
    }

    /// The columns of an orthogonal matrix `R`, i.e. the standard basis
    /// carried by `R`.
    pub fn from_rotation(r: &Matrix3<f64>) -> Result<Self> {
        Self::new([
            r.column(0).into_owned(),
            r.column(1).into_owned(),
            r.column(2).into_owned(),
        ])
    }

    pub fn vectors(&self) -> &[Vector3<f64>; 3] {
        &self.0
    }

    /// Matrix whose rows are `e(1), e(2), e(3)`.
    pub fn as_rows(&self) -> Matrix3<f64> {
        Matrix3::from_rows(&[
            self.0[0].transpose(),
            self.0[1].transpose(),
            self.0[2].transpose(),
        ])
    }

    /// Components `k_a = e(a)·k`.
    pub fn components(&self, k: &Vector3<f64>) -> Vector3<f64> {
        self.as_rows() * k
    }
}

impl Default for ReferenceBasis {
    fn default() -> Self {
        Self::standard()
    }
}

/// Larger of the orthonormality and completeness defects.
fn basis_defect(v: &[Vector3<f64>; 3]) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((v[a].dot(&v[b]) - expect).abs());
        }
    }
    let mut completeness = Matrix3::zeros();
    for e in v {
        completeness += e * e.transpose();
    }
    worst.max((completeness - Matrix3::identity()).abs().max())
}

/// Per-mode orthogonal matrices `Λ_ab(k_i) = e(a)·ε(b)(k_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMap {
    lambda: Vec<Matrix3<f64>>,
    basis: ReferenceBasis,
    grid: SharedGrid,
}

impl FrameMap {
    pub fn lambda(&self, i: usize) -> &Matrix3<f64> {
        &self.lambda[i]
    }

    pub fn lambdas(&self) -> &[Matrix3<f64>] {
        &self.lambda
    }

    pub fn basis(&self) -> &ReferenceBasis {
        &self.basis
    }

    pub fn grid(&self) -> &SharedGrid {
        &self.grid
    }

    /// Largest `|ΛᵀΛ − I|` over all modes.
    pub fn orthogonality_defect(&self) -> f64 {
        self.lambda
            .iter()
            .map(|l| (l.transpose() * l - Matrix3::identity()).abs().max())
            .fold(0.0, f64::max)
    }
}

/// Builds `Λ(k_i)` for every mode of `grid` relative to `basis`.
pub fn frame_map(grid: &SharedGrid, basis: &ReferenceBasis) -> Result<FrameMap> {
    let rows = basis.as_rows();
    let lambda = grid
        .modes()
        .iter()
        .map(|k| {
            let [e1, e2, e3] = polarization_triad(k)?;
            Ok(rows * Matrix3::from_columns(&[e1, e2, e3]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameMap {
        lambda,
        basis: *basis,
        grid: Arc::clone(grid),
    })
}
