//! The two quadratic forms every solver works with.
//!
//! In terms of the cascaded vectors `g`, `v`, `r` and the path budgets
//! `q_r`, `q_c`, both echo powers are Hermitian quadratic forms in the
//! reflection vector:
//!
//! ```text
//! clutter power = theta^H A theta,  A = q_c^2 r r^H + q_c q_r g g^H
//! target power  = theta^H B theta,  B = q_r^2 v v^H + q_c q_r g g^H
//! ```
//!
//! `A` weights the return the radar should lock onto (the spoofed
//! detection at the clutter bearing), `B` the return that would betray
//! the surface, so the design problem is: maximize `theta^H A theta`
//! subject to `theta^H B theta <= threshold` over unit-modulus entries.
//!
//! Both matrices are PSD with rank at most two. [`QuadraticForms`] keeps
//! only the factors, evaluating products and quadratic forms in `O(N)`;
//! dense copies are available when a solver genuinely needs them.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::power::CascadedCoefficients;

/// Rank-2 factored representation of the clutter (`A`) and target (`B`)
/// power forms.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForms {
    g: DVector<Complex64>,
    v: DVector<Complex64>,
    r: DVector<Complex64>,
    /// Weight of `r r^H` in `A`.
    w_rr: f64,
    /// Weight of `g g^H` in both matrices.
    w_gg: f64,
    /// Weight of `v v^H` in `B`.
    w_vv: f64,
}

/// Builds the factored forms from a scenario's cascade data.
pub fn build_quadratic_forms(coeffs: &CascadedCoefficients) -> QuadraticForms {
    QuadraticForms {
        g: coeffs.g.clone(),
        v: coeffs.v.clone(),
        r: coeffs.r.clone(),
        w_rr: coeffs.q_c * coeffs.q_c,
        w_gg: coeffs.q_c * coeffs.q_r,
        w_vv: coeffs.q_r * coeffs.q_r,
    }
}

impl QuadraticForms {
    /// Surface element count `N`.
    pub fn len(&self) -> usize {
        self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.g.is_empty()
    }

    /// `A x` in `O(N)`.
    pub fn a_mul(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let rx = self.r.dotc(x);
        let gx = self.g.dotc(x);
        &self.r * (rx * self.w_rr) + &self.g * (gx * self.w_gg)
    }

    /// `B x` in `O(N)`.
    pub fn b_mul(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        let vx = self.v.dotc(x);
        let gx = self.g.dotc(x);
        &self.v * (vx * self.w_vv) + &self.g * (gx * self.w_gg)
    }

    /// `x^H A x` (the mean clutter-bearing echo power for unit-modulus `x`).
    pub fn a_quad(&self, x: &DVector<Complex64>) -> f64 {
        self.w_rr * self.r.dotc(x).norm_sqr() + self.w_gg * self.g.dotc(x).norm_sqr()
    }

    /// `x^H B x` (the mean surface-bearing echo power for unit-modulus `x`).
    pub fn b_quad(&self, x: &DVector<Complex64>) -> f64 {
        self.w_vv * self.v.dotc(x).norm_sqr() + self.w_gg * self.g.dotc(x).norm_sqr()
    }

    /// Largest eigenvalue of `A`, closed form.
    pub fn lambda_max_a(&self) -> f64 {
        lambda_max_rank2(self.w_rr, &self.r, self.w_gg, &self.g)
    }

    /// Largest eigenvalue of `B`, closed form.
    pub fn lambda_max_b(&self) -> f64 {
        lambda_max_rank2(self.w_vv, &self.v, self.w_gg, &self.g)
    }

    /// Frobenius norm of `A` without materializing it.
    pub fn a_frobenius(&self) -> f64 {
        rank2_frobenius(self.w_rr, &self.r, self.w_gg, &self.g)
    }

    /// Frobenius norm of `B` without materializing it.
    pub fn b_frobenius(&self) -> f64 {
        rank2_frobenius(self.w_vv, &self.v, self.w_gg, &self.g)
    }

    /// `Tr(A Z)` through the factors in `O(N^2)`.
    pub fn a_trace(&self, z: &DMatrix<Complex64>) -> f64 {
        self.w_rr * quad_with(z, &self.r) + self.w_gg * quad_with(z, &self.g)
    }

    /// `Tr(B Z)` through the factors in `O(N^2)`.
    pub fn b_trace(&self, z: &DMatrix<Complex64>) -> f64 {
        self.w_vv * quad_with(z, &self.v) + self.w_gg * quad_with(z, &self.g)
    }

    /// Dense `N x N` copy of `A`.
    pub fn dense_a(&self) -> DMatrix<Complex64> {
        rank2_dense(self.w_rr, &self.r, self.w_gg, &self.g)
    }

    /// Dense `N x N` copy of `B`.
    pub fn dense_b(&self) -> DMatrix<Complex64> {
        rank2_dense(self.w_vv, &self.v, self.w_gg, &self.g)
    }

    /// The factor whose alignment maximizes the dominant `A` term.
    pub fn r_factor(&self) -> &DVector<Complex64> {
        &self.r
    }

    /// The shared cross-cascade factor.
    pub fn g_factor(&self) -> &DVector<Complex64> {
        &self.g
    }
}

/// Largest eigenvalue of `w1 u1 u1^H + w2 u2 u2^H` for `w1, w2 >= 0`.
///
/// The nonzero spectrum equals that of the 2x2 matrix `W U^H U`, whose
/// characteristic roots are `(tr +- sqrt(tr^2 - 4 det)) / 2`; both trace
/// and determinant are real for PSD weights.
pub fn lambda_max_rank2(
    w1: f64,
    u1: &DVector<Complex64>,
    w2: f64,
    u2: &DVector<Complex64>,
) -> f64 {
    assert_eq!(u1.len(), u2.len(), "factors must have equal length");
    assert!(w1 >= 0.0 && w2 >= 0.0, "weights must be non-negative");
    let n11 = u1.norm_squared();
    let n22 = u2.norm_squared();
    let cross = u1.dotc(u2).norm_sqr();
    let tr = w1 * n11 + w2 * n22;
    let det = w1 * w2 * (n11 * n22 - cross);
    let disc = (tr * tr - 4.0 * det).max(0.0);
    0.5 * (tr + disc.sqrt())
}

fn quad_with(z: &DMatrix<Complex64>, u: &DVector<Complex64>) -> f64 {
    (u.adjoint() * z * u)[(0, 0)].re
}

fn rank2_frobenius(w1: f64, u1: &DVector<Complex64>, w2: f64, u2: &DVector<Complex64>) -> f64 {
    // tr(M^2) for M = w1 u1 u1^H + w2 u2 u2^H.
    let n11 = u1.norm_squared();
    let n22 = u2.norm_squared();
    let cross = u1.dotc(u2).norm_sqr();
    (w1 * w1 * n11 * n11 + w2 * w2 * n22 * n22 + 2.0 * w1 * w2 * cross).sqrt()
}

fn rank2_dense(w1: f64, u1: &DVector<Complex64>, w2: f64, u2: &DVector<Complex64>) -> DMatrix<Complex64> {
    let n = u1.len();
    DMatrix::from_fn(n, n, |i, j| {
        u1[i] * u1[j].conj() * w1 + u2[i] * u2[j].conj() * w2
    })
}
