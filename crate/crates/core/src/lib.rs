//! U(2)-invariant squeezing analysis of two-mode pair coherent states.
//!
//! * [`linalg`]: 4×4 real matrices and a cyclic Jacobi eigen-solver.
//! * [`symplectic`]: the symplectic form, Sp(4,R)/O(4) membership and the
//!   passive U(2) subgroup.
//! * [`pair_coherent`]: closed-form photon numbers, variance matrix,
//!   spectrum, diagonalisation and squeezing verdict.
//! * [`fock`]: truncated Fock-space oracle for the same moments.
//! * [`cli`]: the `analyze`, `scan` and `verify` commands.

pub mod cli;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod pair_coherent;
pub mod symplectic;

pub use error::{Error, Result};
pub use linalg::{mat_mul, sym_eigen, Mat4, SymSpectrum};
pub use pair_coherent::{
    analytic_spectrum, analyze, diagonalize, is_squeezed, leading_position_transform,
    leading_u2_transform, norm_series, photon_numbers, stage1_angle, stage2_angle,
    variance_matrix, ComplexAmplitude, PairParams, PhotonNumbers, SqueezeReport, VarianceMatrix,
};
pub use symplectic::{
    beta_form, embed_u2, heterodyne_u, is_orthogonal, is_symplectic, rotation_r1, rotation_r2,
    TransformMatrix, U2Element,
};
