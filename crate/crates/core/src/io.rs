//! JSON-facing document types. Complex numbers are `[re, im]` pairs and
//! matrices are stored row-major.

use crate::error::{Error, Result};
use crate::geometry::{ModeGrid, SharedGrid};
use crate::linalg::CMatrix;
use crate::scattering::{MuellerTensor, PairOfPairs};
use crate::state::{PhotonState, StokesField};
use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub type Pair = [f64; 2];

pub fn to_pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    pub modes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub detected: Vec<usize>,
}

impl GridDocument {
    pub fn from_grid(grid: &ModeGrid) -> Self {
        Self {
            modes: grid.modes().iter().map(|k| [k.x, k.y, k.z]).collect(),
            weights: grid.weights().to_vec(),
            detected: grid.detected_indices(),
        }
    }

    pub fn to_grid(&self) -> Result<ModeGrid> {
        ModeGrid::new(
            self.modes.iter().map(|k| Vector3::from(*k)).collect(),
            self.weights.clone(),
        )?
        .with_detected(&self.detected)
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDocument {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Pair>,
}

impl MatrixDocument {
    pub fn from_dmatrix(m: &CMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(to_pair(m[(r, c)]));
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_dmatrix(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: self.data.len(),
            });
        }
        Ok(CMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|p| from_pair(*p)),
        ))
    }

    pub fn from_matrix2(m: &Matrix2<Complex64>) -> Self {
        Self::from_iter(2, 2, m.transpose().iter().copied())
    }

    pub fn from_matrix3(m: &Matrix3<Complex64>) -> Self {
        Self::from_iter(3, 3, m.transpose().iter().copied())
    }

    pub fn from_matrix4(m: &Matrix4<Complex64>) -> Self {
        Self::from_iter(4, 4, m.transpose().iter().copied())
    }

    // nalgebra iterates column-major, so callers pass the transpose
    fn from_iter(rows: usize, cols: usize, it: impl Iterator<Item = Complex64>) -> Self {
        Self {
            rows,
            cols,
            data: it.map(to_pair).collect(),
        }
    }
}

/// Grid metadata plus the weighted-basis density matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub grid: GridDocument,
    pub rho: MatrixDocument,
}

impl StateDocument {
    pub fn from_state(state: &PhotonState) -> Self {
        Self {
            grid: GridDocument::from_grid(state.grid()),
            rho: MatrixDocument::from_dmatrix(state.weighted()),
        }
    }

    pub fn to_state(&self) -> Result<PhotonState> {
        let grid = Arc::new(self.grid.to_grid()?);
        PhotonState::from_weighted(grid, self.rho.to_dmatrix()?)
    }

    /// Rebuilds the state on an existing grid, which must match.
    pub fn to_state_on(&self, grid: &SharedGrid) -> Result<PhotonState> {
        let own = self.grid.to_grid()?;
        if !own.same_modes(grid) {
            return Err(Error::GridMismatch);
        }
        PhotonState::from_weighted(Arc::clone(grid), self.rho.to_dmatrix()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StokesEntry {
    pub pair: [usize; 2],
    pub s: [Pair; 4],
}

pub fn stokes_entries(field: &StokesField) -> Vec<StokesEntry> {
    let k = field.grid().len();
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            out.push(StokesEntry {
                pair: [i, j],
                s: field.get(i, j).map(to_pair),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuellerEntry {
    /// `(q_i, q_j; k_l, k_m)`
    pub pair: [usize; 4],
    pub m: MatrixDocument,
}

pub fn mueller_entries(tensor: &MuellerTensor) -> Vec<MuellerEntry> {
    tensor
        .computed_pairs()
        .into_iter()
        .map(|p: PairOfPairs| MuellerEntry {
            pair: [p.0, p.1, p.2, p.3],
            m: MatrixDocument::from_matrix4(tensor.get(p).expect("listed as computed")),
        })
        .collect()
}

/// Conventions embedded in every result document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub pauli: String,
    pub stokes_index: String,
    pub classical_relabeling: String,
    pub triad: String,
    pub weighted_basis: String,
    pub reduced_mueller: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            pauli: "sigma_(mu) = sigma_mu / sqrt(2); sigma_0 = I, sigma_1 = [[0,1],[1,0]], \
                    sigma_2 = [[0,-i],[i,0]], sigma_3 = diag(1,-1); Tr{sigma_(mu) sigma_(nu)} = delta"
                .into(),
            stokes_index: "s_mu = Tr{sigma_(mu) rho}, mu = 0..3 in the Pauli order above".into(),
            classical_relabeling: "(I, Q, U, V) = sqrt(2) * (s0, s3, s1, s2)".into(),
            triad: "eps1 = theta_hat, eps2 = phi_hat, eps3 = k/|k|; at k || +-z: eps1 = x, eps2 = +-y"
                .into(),
            weighted_basis: "rho~_(i l),(j l') = sqrt(w_i w_j) rho_(l l')(k_i, k_j); row index 2i + l"
                .into(),
            reduced_mueller: "R = w_out w_in M(q_out, q_out; k_in, k_in), acting on mode Stokes vectors w_i S(k_i, k_i)"
                .into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn state_document_round_trip_is_bit_exact(seed in any::<u64>(), k in 1usize..5) {
            let mut rng = random::rng(seed);
            let grid = random::grid(&mut rng, k);
            let state = random::state(&mut rng, &grid, 2);
            let doc = StateDocument::from_state(&state);
            let text = serde_json::to_string(&doc).unwrap();
            let back: StateDocument = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            let restored = back.to_state().unwrap();
            prop_assert_eq!(restored.weighted(), state.weighted());
            prop_assert_eq!(restored.grid().weights(), state.grid().weights());
        }
    }

    #[test]
    fn fixed_size_matrices_are_row_major() {
        let m = Matrix2::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(3.0, 0.0),
            Complex64::new(4.0, 0.0),
        );
        let d = MatrixDocument::from_matrix2(&m);
        assert_eq!(d.data, vec![[1.0, 0.0], [2.0, 0.0], [3.0, 0.0], [4.0, 0.0]]);
        let dm = d.to_dmatrix().unwrap();
        assert_eq!(dm[(0, 1)], Complex64::new(2.0, 0.0));
    }

    #[test]
    fn mismatched_grid_rejected() {
        let mut rng = random::rng(1);
        let g = random::grid(&mut rng, 2);
        let other = random::grid(&mut rng, 2);
        let doc = StateDocument::from_state(&random::state(&mut rng, &g, 1));
        assert!(matches!(doc.to_state_on(&other), Err(Error::GridMismatch)));
        assert!(doc.to_state_on(&g).is_ok());
    }
}
