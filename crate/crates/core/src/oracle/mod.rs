//! Brute-force reference computations.
//!
//! Nothing here calls the fast paths in `geometry`, `state`, `correlation`
//! or `scattering`: Pauli matrices, triads and `Λ` are rebuilt locally, and
//! all products are explicit index loops over `Vec<Vec<_>>`. Intended for
//! small grids (K ≤ 6).

mod suite;

pub use suite::{run_suite, CheckResult, OracleReport, SuiteConfig};

use crate::geometry::{FrameMap, ModeGrid};
use crate::scattering::ScatteringEnsemble;
use crate::state::PhotonState;
use num_complex::Complex64;

pub type Dense = Vec<Vec<Complex64>>;

/// Largest grid the oracle accepts.
pub const MAX_MODES: usize = 6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn zeros(n: usize, m: usize) -> Dense {
    vec![vec![ZERO; m]; n]
}

/// Normalized Pauli matrices, written out entry by entry.
fn pauli_table() -> [[[Complex64; 2]; 2]; 4] {
    let h = 0.5f64.sqrt();
    let r = |x: f64| Complex64::new(x * h, 0.0);
    let i = |x: f64| Complex64::new(0.0, x * h);
    [
        [[r(1.0), r(0.0)], [r(0.0), r(1.0)]],
        [[r(0.0), r(1.0)], [r(1.0), r(0.0)]],
        [[r(0.0), i(-1.0)], [i(1.0), r(0.0)]],
        [[r(1.0), r(0.0)], [r(0.0), r(-1.0)]],
    ]
}

/// Dense copy of a state's weighted matrix.
#[derive(Debug, Clone)]
pub struct DenseOracleState {
    pub weights: Vec<f64>,
    pub rho: Dense,
}

impl DenseOracleState {
    pub fn from_state(state: &PhotonState) -> Self {
        let m = state.weighted();
        let n = m.nrows();
        let rho = (0..n)
            .map(|r| (0..n).map(|c| m[(r, c)]).collect())
            .collect();
        Self {
            weights: state.grid().weights().to_vec(),
            rho,
        }
    }

    /// Builds `ρ̃` from kernel blocks, `ρ̃ = √(w_i w_j) ρ(k_i, k_j)`.
    pub fn from_kernel(weights: &[f64], kernel: &[Vec<[[Complex64; 2]; 2]>]) -> Self {
        let k = weights.len();
        let mut rho = zeros(2 * k, 2 * k);
        for i in 0..k {
            for j in 0..k {
                let s = (weights[i] * weights[j]).sqrt();
                for a in 0..2 {
                    for b in 0..2 {
                        rho[2 * i + a][2 * j + b] = kernel[i][j][a][b] * s;
                    }
                }
            }
        }
        Self {
            weights: weights.to_vec(),
            rho,
        }
    }

    pub fn modes(&self) -> usize {
        self.weights.len()
    }

    /// `ρ(k_i, k_j)` with the weights divided out.
    pub fn kernel(&self, i: usize, j: usize) -> [[Complex64; 2]; 2] {
        let s = (self.weights[i] * self.weights[j]).sqrt();
        let mut out = [[ZERO; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                out[a][b] = self.rho[2 * i + a][2 * j + b] / s;
            }
        }
        out
    }

    /// Largest elementwise difference from a fast-path state.
    pub fn deviation_from(&self, state: &PhotonState) -> f64 {
        let m = state.weighted();
        let mut worst = 0.0f64;
        for (r, row) in self.rho.iter().enumerate() {
            for (c, z) in row.iter().enumerate() {
                worst = worst.max((z - m[(r, c)]).norm());
            }
        }
        worst
    }
}

/// Triad from polar and azimuthal angles: `(θ̂, φ̂, k̂)`, with `x̂, ±ŷ` on
/// the poles.
pub fn oracle_triad(k: [f64; 3]) -> [[f64; 3]; 3] {
    let norm = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
    let khat = [k[0] / norm, k[1] / norm, k[2] / norm];
    if k[0] == 0.0 && k[1] == 0.0 {
        let sign = if k[2] > 0.0 { 1.0 } else { -1.0 };
        return [[1.0, 0.0, 0.0], [0.0, sign, 0.0], khat];
    }
    let theta = (k[0] * k[0] + k[1] * k[1]).sqrt().atan2(k[2]);
    let phi = k[1].atan2(k[0]);
    [
        [
            theta.cos() * phi.cos(),
            theta.cos() * phi.sin(),
            -theta.sin(),
        ],
        [-phi.sin(), phi.cos(), 0.0],
        khat,
    ]
}

/// `Λ_ab = Σ_i e(a)_i ε(b)_i`.
pub fn oracle_lambda(k: [f64; 3], basis: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let eps = oracle_triad(k);
    let mut l = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for i in 0..3 {
                l[a][b] += basis[a][i] * eps[b][i];
            }
        }
    }
    l
}

/// `δ_aa' − k_a k_a' / |k|²` in the components `k_a = e(a)·k`.
pub fn oracle_transverse_delta(k: [f64; 3], basis: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut comp = [0.0; 3];
    for a in 0..3 {
        for i in 0..3 {
            comp[a] += basis[a][i] * k[i];
        }
    }
    let n2: f64 = k.iter().map(|x| x * x).sum();
    let mut d = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            d[a][b] = if a == b { 1.0 } else { 0.0 } - comp[a] * comp[b] / n2;
        }
    }
    d
}

fn basis_rows(frame: &FrameMap) -> [[f64; 3]; 3] {
    let v = frame.basis().vectors();
    [
        [v[0].x, v[0].y, v[0].z],
        [v[1].x, v[1].y, v[1].z],
        [v[2].x, v[2].y, v[2].z],
    ]
}

fn mode_array(grid: &ModeGrid, i: usize) -> [f64; 3] {
    let k = grid.mode(i);
    [k.x, k.y, k.z]
}

/// `𝕁[a][b] = Σ_{i∈𝒟} ⟨k_i,a| ρ̃ |k_i,b⟩` with `|k_i,a⟩` embedded as a
/// `2K`-component vector whose `(i, λ)` entry is `Λ_aλ(k_i)`. The frame
/// contributes only its reference basis and grid.
pub fn oracle_correlation(
    state: &PhotonState,
    frame: &FrameMap,
    detected: &[usize],
) -> [[Complex64; 3]; 3] {
    let grid = state.grid();
    let dense = DenseOracleState::from_state(state);
    let basis = basis_rows(frame);
    let dim = 2 * grid.len();
    let mut j = [[ZERO; 3]; 3];
    for &i in detected {
        let l = oracle_lambda(mode_array(grid, i), &basis);
        let mut vecs = vec![vec![ZERO; dim]; 3];
        for (a, v) in vecs.iter_mut().enumerate() {
            for lam in 0..2 {
                v[2 * i + lam] = Complex64::new(l[a][lam], 0.0);
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = ZERO;
                for r in 0..dim {
                    for c in 0..dim {
                        acc += vecs[a][r].conj() * dense.rho[r][c] * vecs[b][c];
                    }
                }
                j[a][b] += acc;
            }
        }
    }
    j
}

/// Kernel blocks `T(q_i, k_l)` of every realization.
type KernelBlocks = Vec<Vec<[[Complex64; 2]; 2]>>;

fn kernel_blocks(ens: &ScatteringEnsemble) -> Vec<(f64, KernelBlocks)> {
    let grid = ens.grid();
    let k = grid.len();
    ens.realizations()
        .iter()
        .map(|r| {
            let blocks = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|l| {
                            let s = (grid.weight(i) * grid.weight(l)).sqrt();
                            let mut b = [[ZERO; 2]; 2];
                            for th in 0..2 {
                                for la in 0..2 {
                                    b[th][la] = r.matrix[(2 * i + th, 2 * l + la)] / s;
                                }
                            }
                            b
                        })
                        .collect()
                })
                .collect();
            (r.probability, blocks)
        })
        .collect()
}

/// Output kernel from the double sum over intermediate modes,
/// `ρ_out(q,q') = Σ_A p_A Σ_{l,m} w_l w_m T(q,k_l) ρ(k_l,k_m) T†(k_m,q')`,
/// returned in the weighted basis.
pub fn oracle_channel(ens: &ScatteringEnsemble, state: &PhotonState) -> DenseOracleState {
    let dense = DenseOracleState::from_state(state);
    let w = dense.weights.clone();
    let k = w.len();
    let kernel_in: Vec<Vec<[[Complex64; 2]; 2]>> = (0..k)
        .map(|l| (0..k).map(|m| dense.kernel(l, m)).collect())
        .collect();
    let mut out = vec![vec![[[ZERO; 2]; 2]; k]; k];
    for (p, t) in kernel_blocks(ens) {
        for q in 0..k {
            for qp in 0..k {
                for th in 0..2 {
                    for thp in 0..2 {
                        let mut acc = ZERO;
                        for l in 0..k {
                            for m in 0..k {
                                for la in 0..2 {
                                    for lap in 0..2 {
                                        acc += t[q][l][th][la]
                                            * kernel_in[l][m][la][lap]
                                            * t[qp][m][thp][lap].conj()
                                            * (w[l] * w[m]);
                                    }
                                }
                            }
                        }
                        out[q][qp][th][thp] += acc * p;
                    }
                }
            }
        }
    }
    DenseOracleState::from_kernel(&w, &out)
}

/// `Tr{σ_(μ) A σ_(ν) B†}` by explicit index loops.
pub fn oracle_mueller_blocks(
    a: &[[Complex64; 2]; 2],
    b: &[[Complex64; 2]; 2],
) -> [[Complex64; 4]; 4] {
    let sig = pauli_table();
    let mut m = [[ZERO; 4]; 4];
    for mu in 0..4 {
        for nu in 0..4 {
            let mut acc = ZERO;
            for w in 0..2 {
                for x in 0..2 {
                    for y in 0..2 {
                        for z in 0..2 {
                            // (B†)_{z w} = conj(B_{w z})
                            acc += sig[mu][w][x] * a[x][y] * sig[nu][y][z] * b[w][z].conj();
                        }
                    }
                }
            }
            m[mu][nu] = acc;
        }
    }
    m
}

/// Single-realization Mueller entry for the weighted-basis matrix `t`.
pub fn oracle_mueller(
    grid: &ModeGrid,
    t: &crate::linalg::CMatrix,
    (i, j, l, m): (usize, usize, usize, usize),
) -> [[Complex64; 4]; 4] {
    let block = |q: usize, k: usize| {
        let s = (grid.weight(q) * grid.weight(k)).sqrt();
        let mut b = [[ZERO; 2]; 2];
        for x in 0..2 {
            for y in 0..2 {
                b[x][y] = t[(2 * q + x, 2 * k + y)] / s;
            }
        }
        b
    };
    oracle_mueller_blocks(&block(i, l), &block(j, m))
}

/// `S_μ(k_i, k_j) = Σ_ab σ_(μ)[a][b] ρ(k_i,k_j)[b][a]`, row-major over pairs.
pub fn oracle_stokes(dense: &DenseOracleState) -> Vec<[Complex64; 4]> {
    let sig = pauli_table();
    let k = dense.modes();
    let mut out = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            let r = dense.kernel(i, j);
            let mut s = [ZERO; 4];
            for (mu, s_mu) in s.iter_mut().enumerate() {
                for a in 0..2 {
                    for b in 0..2 {
                        *s_mu += sig[mu][a][b] * r[b][a];
                    }
                }
            }
            out.push(s);
        }
    }
    out
}

/// `ρ(k_i,k_j) = Σ_μ S_μ σ_(μ)`.
pub fn oracle_expand(weights: &[f64], field: &[[Complex64; 4]]) -> DenseOracleState {
    let sig = pauli_table();
    let k = weights.len();
    let kernel: Vec<Vec<[[Complex64; 2]; 2]>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let s = field[i * k + j];
                    let mut b = [[ZERO; 2]; 2];
                    for a in 0..2 {
                        for c in 0..2 {
                            for mu in 0..4 {
                                b[a][c] += s[mu] * sig[mu][a][c];
                            }
                        }
                    }
                    b
                })
                .collect()
        })
        .collect();
    DenseOracleState::from_kernel(weights, &kernel)
}

/// Stokes propagation through the ensemble with every Mueller entry
/// evaluated by [`oracle_mueller_blocks`].
pub fn oracle_propagate(ens: &ScatteringEnsemble, field: &[[Complex64; 4]]) -> Vec<[Complex64; 4]> {
    let grid = ens.grid();
    let k = grid.len();
    let blocks = kernel_blocks(ens);
    let mut out = vec![[ZERO; 4]; k * k];
    for i in 0..k {
        for j in 0..k {
            for l in 0..k {
                for m in 0..k {
                    let w = grid.weight(l) * grid.weight(m);
                    let s_in = field[l * k + m];
                    for (p, t) in &blocks {
                        let mm = oracle_mueller_blocks(&t[i][l], &t[j][m]);
                        for mu in 0..4 {
                            for nu in 0..4 {
                                out[i * k + j][mu] += mm[mu][nu] * s_in[nu] * (w * p);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Closed-form classical Mueller matrices in the Pauli ordering
/// `(s0, s1, s2, s3)`, with `σ1 = X`, `σ2 = Y`, `σ3 = Z`.
pub mod classical {
    /// Projector onto linear polarization at `angle`: `½ U Uᵀ`,
    /// `U = (1, sin 2θ, 0, cos 2θ)`.
    pub fn polarizer(angle: f64) -> [[f64; 4]; 4] {
        let u = [1.0, (2.0 * angle).sin(), 0.0, (2.0 * angle).cos()];
        let mut m = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                m[a][b] = 0.5 * u[a] * u[b];
            }
        }
        m
    }

    /// `1 ⊕ R(n̂, α)` with the Rodrigues rotation on `(s1, s2, s3)`.
    pub fn unitary_rotation(axis: [f64; 3], alpha: f64) -> [[f64; 4]; 4] {
        let (s, c) = alpha.sin_cos();
        let n = axis;
        let cross = [[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]];
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 1.0;
        for a in 0..3 {
            for b in 0..3 {
                let id = if a == b { 1.0 } else { 0.0 };
                m[a + 1][b + 1] = c * id + s * cross[a][b] + (1.0 - c) * n[a] * n[b];
            }
        }
        m
    }

    /// Rotator by `φ`: rotation by `2φ` about the `s2` axis.
    pub fn rotator(phi: f64) -> [[f64; 4]; 4] {
        unitary_rotation([0.0, 1.0, 0.0], 2.0 * phi)
    }

    /// Retarder with phase `δ` and axis at `θ`: rotation by `δ` about
    /// `(sin 2θ, 0, cos 2θ)`.
    pub fn retarder(delta: f64, angle: f64) -> [[f64; 4]; 4] {
        unitary_rotation([(2.0 * angle).sin(), 0.0, (2.0 * angle).cos()], delta)
    }

    pub fn depolarizer() -> [[f64; 4]; 4] {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 1.0;
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{frame_map, ReferenceBasis};
    use crate::state::plane_wave_state;
    use nalgebra::{Vector2, Vector3};
    use std::sync::Arc;

    fn grid(modes: Vec<Vector3<f64>>) -> crate::geometry::SharedGrid {
        let n = modes.len();
        Arc::new(ModeGrid::new(modes, vec![1.0; n]).unwrap())
    }

    #[test]
    fn oracle_correlation_single_mode() {
        let g = grid(vec![Vector3::z()]);
        let f = frame_map(&g, &ReferenceBasis::standard()).unwrap();
        let s = plane_wave_state(&g, 0, &Vector2::new(Complex64::new(1.0, 0.0), ZERO)).unwrap();
        let j = oracle_correlation(&s, &f, &[0]);
        for a in 0..3 {
            for b in 0..3 {
                let e = if a == 0 && b == 0 { 1.0 } else { 0.0 };
                assert!((j[a][b] - Complex64::new(e, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn oracle_correlation_isotropic() {
        let g = grid(vec![Vector3::z(), Vector3::x(), Vector3::y()]);
        let f = frame_map(&g, &ReferenceBasis::standard()).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let a = plane_wave_state(&g, 0, &Vector2::new(one, ZERO)).unwrap();
        let b = plane_wave_state(&g, 1, &Vector2::new(ZERO, one)).unwrap();
        let c = plane_wave_state(&g, 2, &Vector2::new(one, ZERO)).unwrap();
        let m = crate::state::mixed_state(&[(1.0, &a), (1.0, &b), (1.0, &c)]).unwrap();
        let j = oracle_correlation(&m, &f, &[0, 1, 2]);
        for r in 0..3 {
            for col in 0..3 {
                let e = if r == col { 1.0 / 3.0 } else { 0.0 };
                assert!((j[r][col] - Complex64::new(e, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn oracle_channel_fixed_point_and_polarizer() {
        let g = grid(vec![Vector3::z()]);
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        let s =
            plane_wave_state(&g, 0, &Vector2::new(h, Complex64::new(0.0, 0.5f64.sqrt()))).unwrap();
        let out = oracle_channel(&crate::scattering::identity(&g), &s);
        assert!(out.deviation_from(&s) < 1e-15);
        let out = oracle_channel(&crate::scattering::polarizer(&g, 0.0).unwrap(), &s);
        assert!((out.rho[0][0] - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        assert!(out.rho[1][1].norm() < 1e-15);
    }

    #[test]
    fn oracle_mueller_identity_and_polarizer() {
        let one = Complex64::new(1.0, 0.0);
        let id = [[one, ZERO], [ZERO, one]];
        let m = oracle_mueller_blocks(&id, &id);
        for mu in 0..4 {
            for nu in 0..4 {
                let e = if mu == nu { 1.0 } else { 0.0 };
                assert!((m[mu][nu] - Complex64::new(e, 0.0)).norm() < 1e-15);
            }
        }
        let p = [[one, ZERO], [ZERO, ZERO]];
        let m = oracle_mueller_blocks(&p, &p);
        let expect = classical::polarizer(0.0);
        for mu in 0..4 {
            for nu in 0..4 {
                assert!((m[mu][nu] - Complex64::new(expect[mu][nu], 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn oracle_triad_matches_convention_examples() {
        let t = oracle_triad([2.0, 0.0, 0.0]);
        assert!((t[0][2] + 1.0).abs() < 1e-15 && (t[1][1] - 1.0).abs() < 1e-15);
        let t = oracle_triad([0.0, 0.0, -1.0]);
        assert_eq!(t[1], [0.0, -1.0, 0.0]);
    }
}
