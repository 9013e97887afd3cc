//! Dense real 4×4 matrices and a cyclic Jacobi eigen-solver.
//!
//! Everything in the squeezing analysis lives in the four-dimensional
//! quadrature space `(q1, q2, p1, p2)`, so a fixed-size row-major array is
//! all that is needed. The Jacobi routine is written over a const dimension
//! so that the Hermitian uncertainty check can reuse it on the 8×8 real
//! embedding of a complex 4×4 matrix.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default off-diagonal threshold for [`sym_eigen`].
pub const DEFAULT_EIGEN_TOL: f64 = 1e-13;

/// Sweep budget for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// A real 4×4 matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat4(pub [[f64; 4]; 4]);

impl Mat4 {
    pub const fn zeros() -> Self {
        Mat4([[0.0; 4]; 4])
    }

    pub const fn identity() -> Self {
        Mat4([
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    pub const fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        Mat4(rows)
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut m = Mat4::zeros();
        for (i, v) in d.into_iter().enumerate() {
            m.0[i][i] = v;
        }
        m
    }

    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.0
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.0[0][0], self.0[1][1], self.0[2][2], self.0[3][3]]
    }

    pub fn transpose(&self) -> Mat4 {
        let mut t = Mat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    /// Largest absolute entry.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest absolute off-diagonal entry.
    pub fn off_diagonal_norm_inf(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    m = m.max(self.0[i][j].abs());
                }
            }
        }
        m
    }

    /// `‖A − Aᵀ‖∞`.
    pub fn max_asymmetry(&self) -> f64 {
        (*self - self.transpose()).norm_inf()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }

    pub fn scale(&self, k: f64) -> Mat4 {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|v| *v *= k);
        out
    }

    /// The congruence `S · self · Sᵀ`.
    pub fn congruence(&self, s: &Mat4) -> Mat4 {
        *s * *self * s.transpose()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let mut a = self.0;
        let mut det = 1.0;
        for col in 0..4 {
            let pivot = (col..4)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap_or(col);
            if a[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for row in col + 1..4 {
                let f = a[row][col] / a[col][col];
                for k in col..4 {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
        det
    }

    pub fn column(&self, j: usize) -> [f64; 4] {
        [self.0[0][j], self.0[1][j], self.0[2][j], self.0[3][j]]
    }
}

impl Default for Mat4 {
    fn default() -> Self {
        Mat4::zeros()
    }
}

impl Index<(usize, usize)> for Mat4 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat4 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Mul for Mat4 {
    type Output = Mat4;
    fn mul(self, rhs: Mat4) -> Mat4 {
        mat_mul(&self, &rhs)
    }
}

impl Add for Mat4 {
    type Output = Mat4;
    fn add(mut self, rhs: Mat4) -> Mat4 {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl Sub for Mat4 {
    type Output = Mat4;
    fn sub(mut self, rhs: Mat4) -> Mat4 {
        for i in 0..4 {
            for j in 0..4 {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl Neg for Mat4 {
    type Output = Mat4;
    fn neg(self) -> Mat4 {
        self.scale(-1.0)
    }
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = Mat4::zeros();
    for i in 0..4 {
        for j in 0..4 {
            c.0[i][j] = (0..4).map(|k| a.0[i][k] * b.0[k][j]).sum();
        }
    }
    c
}

/// Eigen-decomposition of a real symmetric 4×4 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymSpectrum {
    /// Ascending.
    pub eigenvalues: [f64; 4],
    /// Column `k` is the unit eigenvector of `eigenvalues[k]`.
    pub eigenvectors: Mat4,
}

impl SymSpectrum {
    pub fn least(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn greatest(&self) -> f64 {
        self.eigenvalues[3]
    }

    pub fn eigenvector(&self, k: usize) -> [f64; 4] {
        self.eigenvectors.column(k)
    }

    /// `M D Mᵀ`.
    pub fn reconstruct(&self) -> Mat4 {
        let m = self.eigenvectors;
        m * Mat4::diag(self.eigenvalues) * m.transpose()
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// `tol` bounds both the admissible asymmetry of `a` and the final
/// off-diagonal Frobenius norm, each relative to `max(1, ‖a‖∞)`.
pub fn sym_eigen(a: &Mat4, tol: f64) -> Result<SymSpectrum> {
    let (values, vectors) = jacobi_eigen(&a.0, tol)?;
    Ok(SymSpectrum {
        eigenvalues: values,
        eigenvectors: Mat4(vectors),
    })
}

type Square<const N: usize> = [[f64; N]; N];

pub(crate) fn jacobi_eigen<const N: usize>(
    input: &Square<N>,
    tol: f64,
) -> Result<([f64; N], Square<N>)> {
    let scale = input
        .iter()
        .flatten()
        .fold(1.0_f64, |acc, v| acc.max(v.abs()));
    if !scale.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }

    let mut asymmetry = 0.0_f64;
    let mut a = *input;
    for i in 0..N {
        for j in i + 1..N {
            asymmetry = asymmetry.max((input[i][j] - input[j][i]).abs());
            let avg = 0.5 * (input[i][j] + input[j][i]);
            a[i][j] = avg;
            a[j][i] = avg;
        }
    }
    if asymmetry > tol * scale {
        return Err(Error::NotSymmetric { asymmetry });
    }

    let mut v = [[0.0; N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let threshold = tol * scale;
    let off_norm = |a: &Square<N>| -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            for j in 0..N {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..N {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off > threshold {
            return Err(Error::NoConvergence {
                sweeps: MAX_SWEEPS,
                off_norm: off,
            });
        }
    }

    // Stable sort keeps equal eigenvalues in original index order.
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = std::array::from_fn(|k| a[order[k]][order[k]]);
    let mut vectors = [[0.0; N]; N];
    for (k, &src) in order.iter().enumerate() {
        for row in 0..N {
            vectors[row][k] = v[row][src];
        }
    }
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{beta_form, rotation_r1, rotation_r2};
    use proptest::prelude::*;

    fn assert_spectrum_invariants(a: &Mat4, sp: &SymSpectrum) {
        let m = sp.eigenvectors;
        assert!((m.transpose() * m - Mat4::identity()).norm_inf() <= 1e-12);
        assert!((sp.reconstruct() - *a).norm_inf() <= 1e-10 * a.norm_inf().max(1.0));
        assert!(sp.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn identity_squared() {
        assert_eq!(Mat4::identity() * Mat4::identity(), Mat4::identity());
    }

    #[test]
    fn beta_squared_is_minus_identity() {
        let b = beta_form();
        assert_eq!(b * b, -Mat4::identity());
    }

    #[test]
    fn product_matches_hand_expansion() {
        let a = Mat4::from_rows([
            [1.0, -2.0, 3.0, 0.0],
            [4.0, 5.0, -6.0, 7.0],
            [0.0, 8.0, 1.0, -1.0],
            [2.0, 2.0, -3.0, 9.0],
        ]);
        let b = Mat4::from_rows([
            [3.0, 1.0, 0.0, -2.0],
            [-1.0, 4.0, 2.0, 5.0],
            [6.0, 0.0, -7.0, 1.0],
            [2.0, -3.0, 8.0, 1.0],
        ]);
        let expected = Mat4::from_rows([
            [23.0, -7.0, -25.0, -9.0],
            [-15.0, 3.0, 108.0, 18.0],
            [-4.0, 35.0, 1.0, 40.0],
            [4.0, -17.0, 97.0, 12.0],
        ]);
        assert_eq!(mat_mul(&a, &b), expected);
    }

    #[test]
    fn determinant_of_permutation() {
        let p = Mat4::from_rows([
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]);
        assert_eq!(p.det(), -1.0);
        assert_eq!(Mat4::diag([1.0, 2.0, 3.0, 4.0]).det(), 24.0);
    }

    #[test]
    fn diagonal_input() {
        let a = Mat4::diag([1.0, 2.0, 3.0, 4.0]);
        let sp = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap();
        assert_eq!(sp.eigenvalues, [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(sp.eigenvectors, Mat4::identity());
    }

    #[test]
    fn ties_keep_index_order() {
        let a = Mat4::diag([2.5, 0.5, 2.5, 0.5]);
        let sp = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap();
        assert_eq!(sp.eigenvalues, [0.5, 0.5, 2.5, 2.5]);
        assert_eq!(sp.eigenvector(0), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(sp.eigenvector(1), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(sp.eigenvector(2), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let mut a = Mat4::identity();
        a[(0, 1)] = 1e-3;
        assert!(matches!(
            sym_eigen(&a, DEFAULT_EIGEN_TOL),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn dense_symmetric_case() {
        let a = Mat4::from_rows([
            [4.0, 1.0, -2.0, 2.0],
            [1.0, 2.0, 0.0, 1.0],
            [-2.0, 0.0, 3.0, -2.0],
            [2.0, 1.0, -2.0, -1.0],
        ]);
        let sp = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap();
        assert_spectrum_invariants(&a, &sp);
        assert!((sp.eigenvalues.iter().sum::<f64>() - a.trace()).abs() < 1e-12);
    }

    fn symmetric() -> impl Strategy<Value = Mat4> {
        prop::array::uniform10(-10.0f64..10.0).prop_map(|e| {
            let mut m = Mat4::zeros();
            let mut k = 0;
            for i in 0..4 {
                for j in i..4 {
                    m[(i, j)] = e[k];
                    m[(j, i)] = e[k];
                    k += 1;
                }
            }
            m
        })
    }

    proptest! {
        #[test]
        fn jacobi_invariants(a in symmetric()) {
            let sp = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap();
            assert_spectrum_invariants(&a, &sp);
            prop_assert!((sp.eigenvalues.iter().sum::<f64>() - a.trace()).abs() <= 1e-10);
        }

        #[test]
        fn spectrum_invariant_under_rotations(a in symmetric(), theta in -3.2f64..3.2, phi in -3.2f64..3.2) {
            let base = sym_eigen(&a, DEFAULT_EIGEN_TOL).unwrap().eigenvalues;
            for r in [rotation_r1(theta).mat, rotation_r2(phi).mat] {
                let rotated = sym_eigen(&a.congruence(&r), DEFAULT_EIGEN_TOL).unwrap().eigenvalues;
                for (x, y) in base.iter().zip(rotated.iter()) {
                    prop_assert!((x - y).abs() <= 1e-9);
                }
            }
        }
    }
}
