//! Scattering ensembles `{(p_A, T^A)}`, their action on photon states and
//! the four-mode density Mueller matrices.
//!
//! `T^A` is stored in the weighted basis, `T̃_(iθ),(lλ) = √(w_i w_l)
//! T^A_θλ(q_i, k_l)`, so the identity channel is the identity matrix and
//! `ρ̃_out = Σ_A p_A T̃^A ρ̃ T̃^A†`. Mueller entries are kernel quantities and
//! carry the inverse weights; [`reduce_single_mode`] removes them again.

mod elements;

pub use elements::{
    identity, jones, mode_coupler, pauli_depolarizer, polarizer, random_unitary_ensemble, retarder,
    rotator,
};

use crate::error::{Error, Result};
use crate::geometry::SharedGrid;
use crate::linalg::CMatrix;
use crate::pauli;
use crate::state::PhotonState;
use crate::tol;
use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use std::sync::Arc;

/// One member of an ensemble.
#[derive(Debug, Clone)]
pub struct Realization {
    pub probability: f64,
    /// Weighted-basis scattering matrix, `2K x 2K`.
    pub matrix: CMatrix,
}

#[derive(Debug, Clone)]
pub struct ScatteringEnsemble {
    grid: SharedGrid,
    realizations: Vec<Realization>,
    trace_preserving: bool,
    completeness_defect: f64,
}

impl ScatteringEnsemble {
    pub fn new(grid: SharedGrid, realizations: Vec<Realization>) -> Result<Self> {
        if realizations.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let dim = grid.dim();
        let mut total = 0.0;
        for (a, r) in realizations.iter().enumerate() {
            if !(r.probability >= 0.0) || !r.probability.is_finite() {
                return Err(Error::InvalidProbabilities(format!(
                    "p[{a}] = {} is negative or not finite",
                    r.probability
                )));
            }
            if r.matrix.nrows() != dim || r.matrix.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim * dim,
                    found: r.matrix.nrows() * r.matrix.ncols(),
                });
            }
            total += r.probability;
        }
        if !((total - 1.0).abs() <= tol::PROBABILITY_SUM) {
            return Err(Error::InvalidProbabilities(format!(
                "probabilities sum to {total}"
            )));
        }
        let mut completeness = CMatrix::zeros(dim, dim);
        for r in &realizations {
            completeness += r.matrix.adjoint() * &r.matrix * Complex64::new(r.probability, 0.0);
        }
        let completeness_defect =
            crate::linalg::max_abs_diff(&completeness, &CMatrix::identity(dim, dim));
        Ok(Self {
            grid,
            realizations,
            trace_preserving: completeness_defect <= tol::KRAUS_COMPLETE,
            completeness_defect,
        })
    }

    /// Equal-probability ensemble of the given matrices.
    pub fn uniform(grid: SharedGrid, matrices: Vec<CMatrix>) -> Result<Self> {
        let n = matrices.len();
        let p = 1.0 / n as f64;
        Self::new(
            grid,
            matrices
                .into_iter()
                .map(|matrix| Realization {
                    probability: p,
                    matrix,
                })
                .collect(),
        )
    }

    pub fn grid(&self) -> &SharedGrid {
        &self.grid
    }

    pub fn realizations(&self) -> &[Realization] {
        &self.realizations
    }

    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }

    /// `Σ_A p_A T^A† T^A = 1` within tolerance.
    pub fn trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// Largest entry of `Σ_A p_A T^A† T^A − 1`.
    pub fn completeness_defect(&self) -> f64 {
        self.completeness_defect
    }

    /// The ensemble that applies `self` first, then `next`.
    pub fn then(&self, next: &ScatteringEnsemble) -> Result<Self> {
        self.grid.check_same(&next.grid)?;
        let mut out = Vec::with_capacity(self.len() * next.len());
        for b in &next.realizations {
            for a in &self.realizations {
                out.push(Realization {
                    probability: a.probability * b.probability,
                    matrix: &b.matrix * &a.matrix,
                });
            }
        }
        let total: f64 = out.iter().map(|r| r.probability).sum();
        for r in &mut out {
            r.probability /= total;
        }
        Self::new(Arc::clone(&self.grid), out)
    }

    /// Multiplies every realization by a global phase.
    pub fn with_phase(&self, phase: f64) -> Self {
        let z = Complex64::from_polar(1.0, phase);
        Self {
            grid: Arc::clone(&self.grid),
            realizations: self
                .realizations
                .iter()
                .map(|r| Realization {
                    probability: r.probability,
                    matrix: &r.matrix * z,
                })
                .collect(),
            trace_preserving: self.trace_preserving,
            completeness_defect: self.completeness_defect,
        }
    }
}

/// `ρ̃_out = Σ_A p_A T̃^A ρ̃_in T̃^A†`.
pub fn apply_ensemble(ens: &ScatteringEnsemble, state: &PhotonState) -> Result<PhotonState> {
    ens.grid.check_same(state.grid())?;
    let dim = ens.grid.dim();
    let rho = state.weighted();
    let mut out = CMatrix::zeros(dim, dim);
    for r in &ens.realizations {
        if r.probability == 0.0 {
            continue;
        }
        out += &r.matrix * rho * r.matrix.adjoint() * Complex64::new(r.probability, 0.0);
    }
    PhotonState::from_weighted(Arc::clone(state.grid()), out)
}

/// Index of a pair of mode pairs `(q_i, q_j; k_l, k_m)`.
pub type PairOfPairs = (usize, usize, usize, usize);

/// Kernel block `T(q_i, k_l)` of a weighted-basis matrix.
fn kernel_block(grid: &SharedGrid, t: &CMatrix, i: usize, l: usize) -> Matrix2<Complex64> {
    let s = (grid.weight(i) * grid.weight(l)).sqrt();
    t.fixed_view::<2, 2>(2 * i, 2 * l).into_owned() / Complex64::new(s, 0.0)
}

fn check_pair(grid: &SharedGrid, (i, j, l, m): PairOfPairs) -> Result<()> {
    for idx in [i, j, l, m] {
        grid.check_index(idx)?;
    }
    Ok(())
}

fn mueller_from_blocks(a: &Matrix2<Complex64>, b: &Matrix2<Complex64>) -> Matrix4<Complex64> {
    let sig: [Matrix2<Complex64>; 4] = std::array::from_fn(pauli::normalized);
    let b_dag = b.adjoint();
    let mut m = Matrix4::zeros();
    for nu in 0..4 {
        let inner = a * sig[nu] * b_dag;
        for mu in 0..4 {
            m[(mu, nu)] = (sig[mu] * inner).trace();
        }
    }
    m
}

/// `m_μν = Tr{σ_(μ) T(q_i, k_l) σ_(ν) T†(k_m, q_j)}` for one realization
/// given as a weighted-basis matrix on `grid`.
pub fn mueller_single(
    grid: &SharedGrid,
    t: &CMatrix,
    pair: PairOfPairs,
) -> Result<Matrix4<Complex64>> {
    check_pair(grid, pair)?;
    let dim = grid.dim();
    if t.nrows() != dim || t.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: t.nrows() * t.ncols(),
        });
    }
    let (i, j, l, m) = pair;
    Ok(mueller_from_blocks(
        &kernel_block(grid, t, i, l),
        &kernel_block(grid, t, j, m),
    ))
}

fn mueller_average(ens: &ScatteringEnsemble, (i, j, l, m): PairOfPairs) -> Matrix4<Complex64> {
    let mut acc = Matrix4::zeros();
    for r in &ens.realizations {
        let a = kernel_block(&ens.grid, &r.matrix, i, l);
        let b = kernel_block(&ens.grid, &r.matrix, j, m);
        acc += mueller_from_blocks(&a, &b) * Complex64::new(r.probability, 0.0);
    }
    acc
}

/// Ensemble-averaged four-mode density Mueller matrices, possibly only for
/// a subset of pair-of-pairs indices.
#[derive(Debug, Clone)]
pub struct MuellerTensor {
    grid: SharedGrid,
    entries: Vec<Option<Matrix4<Complex64>>>,
}

impl MuellerTensor {
    fn slot(&self, (i, j, l, m): PairOfPairs) -> usize {
        let k = self.grid.len();
        ((i * k + j) * k + l) * k + m
    }

    pub fn grid(&self) -> &SharedGrid {
        &self.grid
    }

    /// `M_μν(q_i, q_j; k_l, k_m)` if computed.
    pub fn get(&self, pair: PairOfPairs) -> Option<&Matrix4<Complex64>> {
        let k = self.grid.len();
        let (i, j, l, m) = pair;
        if i >= k || j >= k || l >= k || m >= k {
            return None;
        }
        self.entries[self.slot(pair)].as_ref()
    }

    fn require(&self, pair: PairOfPairs) -> Result<&Matrix4<Complex64>> {
        self.get(pair)
            .ok_or(Error::MissingMuellerEntry(pair.0, pair.1, pair.2, pair.3))
    }

    /// Computed indices in row-major order.
    pub fn computed_pairs(&self) -> Vec<PairOfPairs> {
        let k = self.grid.len();
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    for m in 0..k {
                        if self.entries[self.slot((i, j, l, m))].is_some() {
                            out.push((i, j, l, m));
                        }
                    }
                }
            }
        }
        out
    }

    /// Largest imaginary part on aligned diagonals `(q, q; k, k)`.
    pub fn aligned_reality_defect(&self) -> f64 {
        let k = self.grid.len();
        let mut worst = 0.0f64;
        for i in 0..k {
            for l in 0..k {
                if let Some(m) = self.get((i, i, l, l)) {
                    worst = worst.max(m.iter().map(|z| z.im.abs()).fold(0.0, f64::max));
                }
            }
        }
        worst
    }
}

/// Full tensor, `K⁴` entries.
pub fn mueller_ensemble(ens: &ScatteringEnsemble) -> MuellerTensor {
    let k = ens.grid.len();
    let mut entries = Vec::with_capacity(k.pow(4));
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                for m in 0..k {
                    entries.push(Some(mueller_average(ens, (i, j, l, m))));
                }
            }
        }
    }
    MuellerTensor {
        grid: Arc::clone(&ens.grid),
        entries,
    }
}

/// Only the requested entries.
pub fn mueller_ensemble_pairs(
    ens: &ScatteringEnsemble,
    pairs: &[PairOfPairs],
) -> Result<MuellerTensor> {
    let k = ens.grid.len();
    let mut tensor = MuellerTensor {
        grid: Arc::clone(&ens.grid),
        entries: vec![None; k.pow(4)],
    };
    for &pair in pairs {
        check_pair(&ens.grid, pair)?;
        let slot = tensor.slot(pair);
        if tensor.entries[slot].is_none() {
            tensor.entries[slot] = Some(mueller_average(ens, pair));
        }
    }
    Ok(tensor)
}

/// `S_out,μ(q_i, q_j) = Σ_ν Σ_{l,m} w_l w_m M_μν(q_i, q_j; k_l, k_m) S_in,ν(k_l, k_m)`.
pub fn propagate_stokes(
    tensor: &MuellerTensor,
    field: &crate::state::StokesField,
) -> Result<crate::state::StokesField> {
    tensor.grid.check_same(field.grid())?;
    let grid = &tensor.grid;
    let k = grid.len();
    let mut values = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let mut out = [Complex64::new(0.0, 0.0); 4];
            for l in 0..k {
                for m in 0..k {
                    let w = grid.weight(l) * grid.weight(m);
                    let mm = tensor.require((i, j, l, m))?;
                    let s_in = field.get(l, m);
                    for (mu, o) in out.iter_mut().enumerate() {
                        for nu in 0..4 {
                            *o += mm[(mu, nu)] * s_in[nu] * w;
                        }
                    }
                }
            }
            values.push(out);
        }
    }
    crate::state::StokesField::from_values(Arc::clone(grid), values)
}

/// Classical 4x4 Mueller matrix from mode `in_mode` to mode `out_mode`.
///
/// Acts on mode-normalized Stokes vectors (see
/// [`StokesField::mode_vector`](crate::state::StokesField::mode_vector)):
/// `R = w_out w_in M(q_out, q_out; k_in, k_in)`.
pub fn reduce_single_mode(
    tensor: &MuellerTensor,
    in_mode: usize,
    out_mode: usize,
) -> Result<Matrix4<f64>> {
    let grid = &tensor.grid;
    grid.check_index(in_mode)?;
    grid.check_index(out_mode)?;
    let m = tensor.require((out_mode, out_mode, in_mode, in_mode))?;
    let scaled = m * Complex64::new(grid.weight(out_mode) * grid.weight(in_mode), 0.0);
    let imag = scaled.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let scale = scaled.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if imag > tol::MUELLER_REALITY * scale {
        return Err(Error::Inconsistency(format!(
            "aligned Mueller block has imaginary part {imag:e}"
        )));
    }
    Ok(scaled.map(|z| z.re))
}
