use thiserror::Error;

/// Errors raised by the squeezing analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("Jacobi sweeps did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("2x2 matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric overflow: {0}")]
    Overflow(String),

    #[error("amplitude is zero: every heterodyne phase is a minimiser")]
    ZeroAmplitude,

    #[error("Fock truncation too small: ncut = {ncut}, tail bound {tail_bound:e}")]
    TruncationTooSmall { ncut: usize, tail_bound: f64 },

    #[error("first moment <{quadrature}> = {value:e} does not vanish")]
    NonZeroFirstMoment { quadrature: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
