//! Normalized Pauli basis `σ_(μ) = σ_μ / √2` for 2x2 complex matrices.
//!
//! With this normalization `Tr{σ_(μ) σ_(ν)} = δ_μν`, so expansion
//! coefficients `s_μ = Tr{σ_(μ) X}` reconstruct `X = Σ_μ s_μ σ_(μ)` exactly.
//! Index order: 0 = identity, 1 = `[[0,1],[1,0]]`, 2 = `[[0,-i],[i,0]]`,
//! 3 = `diag(1,-1)`.

use nalgebra::Matrix2;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Unnormalized Pauli matrix `σ_μ`.
pub fn sigma(mu: usize) -> Matrix2<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    match mu {
        0 => Matrix2::new(one, o, o, one),
        1 => Matrix2::new(o, one, one, o),
        2 => Matrix2::new(o, -i, i, o),
        3 => Matrix2::new(one, o, o, -one),
        _ => panic!("Pauli index {mu} out of range"),
    }
}

/// Normalized Pauli matrix `σ_(μ)`.
pub fn normalized(mu: usize) -> Matrix2<Complex64> {
    sigma(mu) * Complex64::new(FRAC_1_SQRT_2, 0.0)
}

/// `Tr{σ_(μ) X}` for μ = 0..3, evaluated in closed form.
pub fn coefficients(x: &Matrix2<Complex64>) -> [Complex64; 4] {
    let (a, b, c, d) = (x[(0, 0)], x[(0, 1)], x[(1, 0)], x[(1, 1)]);
    let i = Complex64::new(0.0, 1.0);
    let h = FRAC_1_SQRT_2;
    [(a + d) * h, (b + c) * h, i * (b - c) * h, (a - d) * h]
}

/// `Σ_μ s_μ σ_(μ)`.
pub fn expand(s: &[Complex64; 4]) -> Matrix2<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let h = FRAC_1_SQRT_2;
    Matrix2::new(
        (s[0] + s[3]) * h,
        (s[1] - i * s[2]) * h,
        (s[1] + i * s[2]) * h,
        (s[0] - s[3]) * h,
    )
}

/// Relabels Pauli-ordered Stokes coefficients as classical `(I, Q, U, V)`.
///
/// `(I, Q, U, V) = √2 (s0, s3, s1, s2)`. Display only; every computation
/// uses the Pauli order.
pub fn to_classical(s: &[f64; 4]) -> [f64; 4] {
    let r = std::f64::consts::SQRT_2;
    [r * s[0], r * s[3], r * s[1], r * s[2]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_basis_is_orthonormal() {
        for mu in 0..4 {
            for nu in 0..4 {
                let t = (normalized(mu) * normalized(nu)).trace();
                let expect = if mu == nu { 1.0 } else { 0.0 };
                assert!((t - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_matches_trace_definition() {
        let x = Matrix2::new(
            Complex64::new(0.3, 0.1),
            Complex64::new(-1.2, 0.7),
            Complex64::new(0.4, -2.0),
            Complex64::new(0.9, 0.0),
        );
        let s = coefficients(&x);
        for (mu, s_mu) in s.iter().enumerate() {
            let t = (normalized(mu) * x).trace();
            assert!((t - s_mu).norm() < 1e-14);
        }
        assert!((expand(&s) - x).norm() < 1e-14);
    }

    #[test]
    fn classical_labels_for_horizontal_light() {
        // diag(1,0) -> s = (1/√2, 0, 0, 1/√2) -> (I,Q,U,V) = (1,1,0,0)
        let s = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
        let c = to_classical(&s);
        assert!((c[0] - 1.0).abs() < 1e-15 && (c[1] - 1.0).abs() < 1e-15);
        assert_eq!(c[2], 0.0);
        assert_eq!(c[3], 0.0);
    }
}
