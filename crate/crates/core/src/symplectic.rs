//! The symplectic form, Sp(4,R) and O(4) membership, and the passive
//! U(2) subgroup realised as real 4×4 blocks `S(X, Y) = [[X, Y], [-Y, X]]`
//! with `U = X - iY`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, Mat4, DEFAULT_EIGEN_TOL};

/// Tolerance used for the membership flags carried by [`TransformMatrix`].
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Admissible `‖U†U − I‖∞` for a [`U2Element`].
pub const UNITARY_TOL: f64 = 1e-12;

/// The commutation form `β` with `[ξ_a, ξ_b] = i β_ab` for `ξ = (q1, q2, p1, p2)`.
pub const fn beta_form() -> Mat4 {
    Mat4::from_rows([
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ])
}

/// `‖S β Sᵀ − β‖∞`.
pub fn symplectic_residual(s: &Mat4) -> f64 {
    let beta = beta_form();
    (beta.congruence(s) - beta).norm_inf()
}

/// `‖Sᵀ S − I‖∞`.
pub fn orthogonality_residual(s: &Mat4) -> f64 {
    (s.transpose() * *s - Mat4::identity()).norm_inf()
}

pub fn is_symplectic(s: &Mat4, tol: f64) -> bool {
    symplectic_residual(s) <= tol
}

pub fn is_orthogonal(s: &Mat4, tol: f64) -> bool {
    orthogonality_residual(s) <= tol
}

/// A 2×2 unitary matrix acting on `(a1, a2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct U2Element {
    entries: [[Complex64; 2]; 2],
}

impl U2Element {
    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let u = U2Element { entries };
        let deviation = u.unitarity_deviation();
        if deviation.is_finite() && deviation <= UNITARY_TOL {
            Ok(u)
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        U2Element {
            entries: [[one, zero], [zero, one]],
        }
    }

    /// `e^{iγ} [[a, -b̄], [b, ā]]` after normalising `(a, b)` to unit length.
    /// Every element of U(2) has this form.
    pub fn from_cayley_klein(phase: f64, a: Complex64, b: Complex64) -> Result<Self> {
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain(
                "Cayley-Klein parameters must be finite and not both zero".into(),
            ));
        }
        let (a, b) = (a / norm, b / norm);
        let g = Complex64::from_polar(1.0, phase);
        U2Element::new([[g * a, -g * b.conj()], [g * b, g * a.conj()]])
    }

    /// Completes a unit row `(u11, u12)` of C² to a unitary with
    /// second row `(-ū12, ū11)`.
    pub fn from_first_row(u11: Complex64, u12: Complex64) -> Result<Self> {
        let norm = (u11.norm_sqr() + u12.norm_sqr()).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Domain("first row must be a nonzero finite vector".into()));
        }
        let (u11, u12) = (u11 / norm, u12 / norm);
        U2Element::new([[u11, u12], [-u12.conj(), u11.conj()]])
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.entries
    }

    pub fn adjoint(&self) -> U2Element {
        let e = &self.entries;
        U2Element {
            entries: [[e[0][0].conj(), e[1][0].conj()], [e[0][1].conj(), e[1][1].conj()]],
        }
    }

    pub fn mul(&self, rhs: &U2Element) -> U2Element {
        let (a, b) = (&self.entries, &rhs.entries);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        U2Element { entries: out }
    }

    /// `‖U†U − I‖∞` over real and imaginary parts.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint().mul(self);
        let mut dev = 0.0_f64;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = p.entries[i][j] - Complex64::new(target, 0.0);
                dev = dev.max(d.re.abs()).max(d.im.abs());
            }
        }
        dev
    }

    /// `(X, Y)` with `U = X - iY`.
    pub fn real_blocks(&self) -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
        let e = &self.entries;
        let x = [[e[0][0].re, e[0][1].re], [e[1][0].re, e[1][1].re]];
        let y = [[-e[0][0].im, -e[0][1].im], [-e[1][0].im, -e[1][1].im]];
        (x, y)
    }
}

/// A 4×4 real transformation of `(q1, q2, p1, p2)` tagged with its
/// O(4) and Sp(4,R) membership at [`MEMBERSHIP_TOL`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformMatrix {
    pub mat: Mat4,
    pub is_orthogonal: bool,
    pub is_symplectic: bool,
}

impl TransformMatrix {
    pub fn classify(mat: Mat4) -> Self {
        TransformMatrix {
            mat,
            is_orthogonal: is_orthogonal(&mat, MEMBERSHIP_TOL),
            is_symplectic: is_symplectic(&mat, MEMBERSHIP_TOL),
        }
    }

    /// Passive (photon-number conserving) canonical transformation.
    pub fn is_passive(&self) -> bool {
        self.is_orthogonal && self.is_symplectic
    }

    pub fn then(&self, next: &TransformMatrix) -> TransformMatrix {
        TransformMatrix::classify(next.mat * self.mat)
    }
}

/// `S(X, Y) = [[X, Y], [-Y, X]]` for `U = X - iY`.
pub fn embed_u2(u: &U2Element) -> TransformMatrix {
    let (x, y) = u.real_blocks();
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = x[i][j];
            m[(i, j + 2)] = y[i][j];
            m[(i + 2, j)] = -y[i][j];
            m[(i + 2, j + 2)] = x[i][j];
        }
    }
    TransformMatrix::classify(m)
}

fn rot2(angle: f64) -> [[f64; 2]; 2] {
    let (s, c) = angle.sin_cos();
    [[c, s], [-s, c]]
}

/// `diag(R(θ), R(θ)ᵀ)` with `R(θ) = [[cos θ, sin θ], [-sin θ, cos θ]]`.
///
/// Orthogonal for every θ, symplectic only for θ ≡ 0 (mod π).
pub fn rotation_r1(theta: f64) -> TransformMatrix {
    let r = rot2(theta);
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = r[i][j];
            m[(i + 2, j + 2)] = r[j][i];
        }
    }
    TransformMatrix::classify(m)
}

/// Rotation by φ in the 1-4 and 2-3 coordinate planes, with `sin φ` above
/// the anti-diagonal in the first two rows. This is `S(cos φ·I, sin φ·σx)`,
/// so it lies in U(2) for every φ.
pub fn rotation_r2(phi: f64) -> TransformMatrix {
    let (s, c) = phi.sin_cos();
    TransformMatrix::classify(Mat4::from_rows([
        [c, 0.0, 0.0, s],
        [0.0, c, s, 0.0],
        [0.0, -s, c, 0.0],
        [-s, 0.0, 0.0, c],
    ]))
}

/// Rotation by φ in the 1-4 plane and by −φ in the 2-3 plane.
///
/// After `rotation_r1` the 2-3 block of a pair coherent variance matrix is
/// the mirror of its 1-4 block, so this (not `rotation_r2`) is the rotation
/// that finishes the diagonalisation. It is orthogonal but leaves Sp(4,R)
/// unless sin φ = 0.
pub fn counter_rotation_r2(phi: f64) -> TransformMatrix {
    let (s, c) = phi.sin_cos();
    TransformMatrix::classify(Mat4::from_rows([
        [c, 0.0, 0.0, s],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [-s, 0.0, 0.0, c],
    ]))
}

/// The heterodyne element
/// `U_ψ = (1/√2) [[e^{-iψ/2}, e^{-iψ/2}], [e^{iψ/2}, -e^{iψ/2}]]`
/// and its real embedding.
pub fn heterodyne_u(psi: f64) -> (U2Element, TransformMatrix) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let lo = Complex64::from_polar(h, -psi / 2.0);
    let hi = Complex64::from_polar(h, psi / 2.0);
    let u = U2Element {
        entries: [[lo, lo], [hi, -hi]],
    };
    debug_assert!(u.unitarity_deviation() <= UNITARY_TOL);
    (u, embed_u2(&u))
}

/// Smallest eigenvalue of the Hermitian matrix `V + (i/2) β`.
///
/// Non-negative exactly when `V` is compatible with the uncertainty
/// principle. Computed through the real symmetric embedding
/// `[[A, -B], [B, A]]` of `A + iB`, whose spectrum is that of `A + iB`
/// with every eigenvalue doubled in multiplicity.
pub fn uncertainty_margin(v: &Mat4) -> Result<f64> {
    let a = v;
    let b = beta_form().scale(0.5);
    let mut h = [[0.0; 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            h[i][j] = a[(i, j)];
            h[i + 4][j + 4] = a[(i, j)];
            h[i][j + 4] = -b[(i, j)];
            h[i + 4][j] = b[(i, j)];
        }
    }
    let (values, _) = jacobi_eigen(&h, DEFAULT_EIGEN_TOL)?;
    Ok(values[0])
}
