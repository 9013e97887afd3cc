//! Closed-form second moments of the pair coherent states `|ζ, q⟩`, their
//! two-stage diagonalisation, and the squeezing verdict.
//!
//! A pair coherent state is the joint eigenstate of `a1 a2` (eigenvalue ζ)
//! and of the photon-number difference (eigenvalue q ≥ 0):
//!
//! ```text
//! |ζ, q⟩ = N_q Σ_n ζⁿ / [n! (n+q)!]^{1/2} |n+q, n⟩
//! ```
//!
//! Its variance matrix in the quadrature order `(q1, q2, p1, p2)` depends on
//! the mean photon numbers and on ζ only:
//!
//! ```text
//!     ⎡ N1+½   Re ζ    0      Im ζ ⎤
//! V = ⎢ Re ζ   N2+½   Im ζ    0    ⎥
//!     ⎢ 0      Im ζ   N1+½   -Re ζ ⎥
//!     ⎣ Im ζ   0     -Re ζ   N2+½  ⎦
//! ```
//!
//! with a doubly degenerate spectrum `N2 + ½ + q/2 ∓ ½√(q² + 4|ζ|²)`.

use std::f64::consts::{FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, Mat4, SymSpectrum, DEFAULT_EIGEN_TOL};
use crate::symplectic::{
    counter_rotation_r2, embed_u2, heterodyne_u, rotation_r1, uncertainty_margin,
    TransformMatrix, U2Element,
};

/// Relative truncation threshold for the normalisation series.
pub const SERIES_REL_TOL: f64 = 1e-16;

/// Number of consecutive sub-threshold terms before a series is cut.
const SUBTHRESHOLD_RUN: usize = 10;

const MAX_SERIES_TERMS: usize = 1_000_000;

/// Largest `|ζ|` the series evaluation accepts.
pub const MAX_AMPLITUDE: f64 = 1e3;

/// Guard band around ½ for the squeezing verdict.
pub const SQUEEZE_GUARD: f64 = 1e-12;

/// Coherent-state (vacuum) quadrature noise with ħ = 1.
pub const VACUUM_NOISE: f64 = 0.5;

/// Symmetry tolerance of a [`VarianceMatrix`], relative to `max(1, ‖V‖∞)`.
pub const VARIANCE_SYMMETRY_TOL: f64 = 1e-12;

/// Grid resolution of the heterodyne phase search.
pub const PSI_GRID_POINTS: usize = 256;

/// The pair-annihilator eigenvalue ζ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::Domain(format!("ζ = ({re}, {im}) is not finite")));
        }
        Ok(ComplexAmplitude { re, im })
    }

    pub fn from_polar(abs: f64, arg: f64) -> Result<Self> {
        if abs < 0.0 {
            return Err(Error::Domain(format!("|ζ| = {abs} is negative")));
        }
        let (s, c) = arg.sin_cos();
        ComplexAmplitude::new(abs * c, abs * s)
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// The labels `(ζ, q)` of a pair coherent state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairParams {
    pub zeta: ComplexAmplitude,
    pub q: u32,
}

impl PairParams {
    pub fn new(re: f64, im: f64, q: i64) -> Result<Self> {
        if q < 0 {
            return Err(Error::Domain(format!(
                "photon-number difference q = {q} must be nonnegative"
            )));
        }
        let q = u32::try_from(q)
            .map_err(|_| Error::Domain(format!("photon-number difference q = {q} too large")))?;
        Ok(PairParams {
            zeta: ComplexAmplitude::new(re, im)?,
            q,
        })
    }

    pub fn from_polar(abs: f64, arg: f64, q: u32) -> Result<Self> {
        Ok(PairParams {
            zeta: ComplexAmplitude::from_polar(abs, arg)?,
            q,
        })
    }

    fn qf(&self) -> f64 {
        f64::from(self.q)
    }
}

/// A validated 4×4 variance matrix in quadrature order `(q1, q2, p1, p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceMatrix {
    mat: Mat4,
}

impl VarianceMatrix {
    /// Checks finiteness and symmetry. Positivity and the uncertainty
    /// relation are reported by [`VarianceMatrix::is_positive_definite`]
    /// and [`VarianceMatrix::uncertainty_margin`].
    pub fn new(mat: Mat4) -> Result<Self> {
        if !mat.is_finite() {
            return Err(Error::Overflow("variance matrix has non-finite entries".into()));
        }
        let asymmetry = mat.max_asymmetry();
        if asymmetry > VARIANCE_SYMMETRY_TOL * mat.norm_inf().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(VarianceMatrix { mat })
    }

    pub fn mat(&self) -> &Mat4 {
        &self.mat
    }

    pub fn spectrum(&self) -> Result<SymSpectrum> {
        sym_eigen(&self.mat, DEFAULT_EIGEN_TOL)
    }

    pub fn is_positive_definite(&self) -> Result<bool> {
        Ok(self.spectrum()?.least() > 0.0)
    }

    /// Least eigenvalue of `V + (i/2) β`; physical matrices give ≥ 0.
    pub fn uncertainty_margin(&self) -> Result<f64> {
        uncertainty_margin(&self.mat)
    }

    /// `S V Sᵀ`.
    pub fn transformed(&self, s: &Mat4) -> Result<VarianceMatrix> {
        VarianceMatrix::new(self.mat.congruence(s))
    }

    /// Any diagonal entry already below vacuum noise.
    pub fn is_manifestly_squeezed(&self) -> bool {
        self.mat.diagonal().iter().any(|&d| d < VACUUM_NOISE)
    }
}

/// Everything the closed-form analysis produces for one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeReport {
    pub n1: f64,
    pub n2: f64,
    pub e_down: f64,
    pub e_up: f64,
    pub theta: f64,
    pub phi: f64,
    /// `None` when ζ = 0, where every heterodyne phase is equivalent.
    pub psi_star: Option<f64>,
    pub squeezed: bool,
}

/// Mean photon numbers `⟨a1†a1⟩`, `⟨a2†a2⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonNumbers {
    pub n1: f64,
    pub n2: f64,
}

/// The orthogonal diagonaliser `r` and `d = r V rᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagonalization {
    pub transform: TransformMatrix,
    pub diagonal: Mat4,
}

/// A passive transformation together with the noise it puts in the
/// leading diagonal slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingTransform {
    /// Heterodyne phase, in `[0, 2π)`. `None` for a general U(2) element.
    pub psi: Option<f64>,
    pub u: U2Element,
    pub transform: TransformMatrix,
    /// `(S V Sᵀ)₁₁`.
    pub value: f64,
}

fn guard_amplitude(x: f64) -> Result<()> {
    if x > MAX_AMPLITUDE {
        return Err(Error::Overflow(format!(
            "|ζ| = {x} exceeds the supported series range {MAX_AMPLITUDE}"
        )));
    }
    Ok(())
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 0.0 && rel_tol <= 1e-3) {
        return Err(Error::Domain(format!("rel_tol = {rel_tol} outside (0, 1e-3]")));
    }
    Ok(())
}

const RESCALE: f64 = 1e-200;

/// Sums `Σ_n t_n` with `t_{n+1} = t_n · x² / ((n+1)(n+1+q))`.
///
/// With `rescale` the partial sum is kept as `mantissa · RESCALE^(-k)` and
/// `(mantissa, k)` is returned; without it the raw sum is returned with
/// `k = 0` and any non-finite term is an overflow.
fn sum_series(x2: f64, q: u32, first: f64, rel_tol: f64, rescale: bool) -> Result<(f64, i32)> {
    let q = f64::from(q);
    let mut term = first;
    let mut sum = 0.0;
    let mut shifts = 0;
    let mut run = 0;
    for n in 0..MAX_SERIES_TERMS {
        sum += term;
        if !(term.is_finite() && sum.is_finite()) {
            return Err(Error::Overflow(format!(
                "normalisation series term {n} exceeds the floating-point range"
            )));
        }
        let k = n as f64 + 1.0;
        term *= x2 / (k * (k + q));
        if rescale && sum > 1.0 / RESCALE {
            sum *= RESCALE;
            term *= RESCALE;
            shifts += 1;
        }
        if term <= rel_tol * sum {
            run += 1;
            if run >= SUBTHRESHOLD_RUN {
                return Ok((sum, shifts));
            }
        } else {
            run = 0;
        }
    }
    Err(Error::Overflow(format!(
        "normalisation series did not settle within {MAX_SERIES_TERMS} terms"
    )))
}

/// `Σ_n |ζ|^{2n} / (n! (n+q)!)`, the inverse square of the normalisation
/// constant `N_q`.
pub fn norm_series(params: &PairParams, rel_tol: f64) -> Result<f64> {
    check_rel_tol(rel_tol)?;
    let x = params.zeta.abs();
    guard_amplitude(x)?;
    let first = (1..=params.q).fold(1.0_f64, |acc, k| acc / f64::from(k));
    if first == 0.0 {
        return Err(Error::Overflow(format!("1/{}! underflows", params.q)));
    }
    let (sum, _) = sum_series(x * x, params.q, first, rel_tol, false)?;
    Ok(sum)
}

/// `N2 = |ζ|² S_{q+1} / S_q` with `S_q` the normalisation series, `N1 = N2 + q`.
///
/// Both series are summed with the `1/q!` prefactor divided out and with
/// periodic rescaling, so the ratio stays accurate up to `MAX_AMPLITUDE`.
pub fn photon_numbers(params: &PairParams) -> Result<PhotonNumbers> {
    let x = params.zeta.abs();
    guard_amplitude(x)?;
    let x2 = x * x;
    let (s0, k0) = sum_series(x2, params.q, 1.0, SERIES_REL_TOL, true)?;
    let (s1, k1) = sum_series(x2, params.q + 1, 1.0, SERIES_REL_TOL, true)?;
    // S_{q+1}/S_q = (s1/(q+1)!) / (s0/q!) up to the rescaling shifts.
    let shift = RESCALE.powi(k0 - k1);
    let n2 = x2 * (s1 / s0) * shift / (params.qf() + 1.0);
    if !n2.is_finite() {
        return Err(Error::Overflow("photon number is not finite".into()));
    }
    Ok(PhotonNumbers {
        n1: n2 + params.qf(),
        n2,
    })
}

fn variance_from_numbers(params: &PairParams, n: &PhotonNumbers) -> Result<VarianceMatrix> {
    let (r, i) = (params.zeta.re, params.zeta.im);
    let a = n.n1 + VACUUM_NOISE;
    let b = n.n2 + VACUUM_NOISE;
    VarianceMatrix::new(Mat4::from_rows([
        [a, r, 0.0, i],
        [r, b, i, 0.0],
        [0.0, i, a, -r],
        [i, 0.0, -r, b],
    ]))
}

/// The analytic variance matrix `V(ζ, q)`.
pub fn variance_matrix(params: &PairParams) -> Result<VarianceMatrix> {
    variance_from_numbers(params, &photon_numbers(params)?)
}

/// `λ± = ½(q ± √(q² + 4 (Re ζ)²))`, the eigenvalues of `[[q, Re ζ], [Re ζ, 0]]`.
pub fn stage1_eigenvalues(params: &PairParams) -> (f64, f64) {
    let q = params.qf();
    let root = q.hypot(2.0 * params.zeta.re);
    (0.5 * (q + root), 0.5 * (q - root))
}

/// Angle θ ∈ (−π/4, π/4] for which `R(θ) [[q, Re ζ], [Re ζ, 0]] R(θ)ᵀ` is
/// diagonal.
pub fn stage1_angle(params: &PairParams) -> f64 {
    let r = params.zeta.re;
    if r == 0.0 {
        0.0
    } else if params.q == 0 {
        FRAC_PI_4
    } else {
        0.5 * (2.0 * r / params.qf()).atan()
    }
}

/// Diagonal of the rotated upper block, `(d1, d2)`. Equals `(λ+, λ−)`
/// except for q = 0, Re ζ < 0, where the fixed θ = π/4 swaps them.
fn stage1_diagonal(params: &PairParams, theta: f64) -> (f64, f64) {
    let q = params.qf();
    let (s2, c2) = (2.0 * theta).sin_cos();
    let half = 0.5 * q;
    let spread = half * c2 + params.zeta.re * s2;
    (half + spread, half - spread)
}

/// Angle φ ∈ (−π/4, π/4] diagonalising the 1-4 block
/// `[[d1, Im ζ], [Im ζ, d2]]` left after the first stage.
pub fn stage2_angle(params: &PairParams) -> f64 {
    let m = params.zeta.im;
    if m == 0.0 {
        return 0.0;
    }
    let (d1, d2) = stage1_diagonal(params, stage1_angle(params));
    let delta = d1 - d2;
    if delta == 0.0 {
        FRAC_PI_4
    } else {
        0.5 * (2.0 * m / delta).atan()
    }
}

/// `(e↓, e↑) = N2 + ½ + q/2 ∓ ½√(q² + 4|ζ|²)`, each doubly degenerate.
pub fn analytic_spectrum(params: &PairParams) -> Result<(f64, f64)> {
    let n = photon_numbers(params)?;
    Ok(spectrum_from_numbers(params, &n))
}

fn spectrum_from_numbers(params: &PairParams, n: &PhotonNumbers) -> (f64, f64) {
    let q = params.qf();
    let centre = n.n2 + VACUUM_NOISE + 0.5 * q;
    let half_root = 0.5 * q.hypot(2.0 * params.zeta.abs());
    (centre - half_root, centre + half_root)
}

/// Two-stage orthogonal diagonalisation: `r = R₂'(φ) · R₁(θ)`, where
/// `R₂'` is [`counter_rotation_r2`].
pub fn diagonalize(params: &PairParams) -> Result<Diagonalization> {
    let v = variance_matrix(params)?;
    let r1 = rotation_r1(stage1_angle(params));
    let r2 = counter_rotation_r2(stage2_angle(params));
    let transform = r1.then(&r2);
    let diagonal = v.mat().congruence(&transform.mat);
    Ok(Diagonalization {
        transform,
        diagonal,
    })
}

/// U(2)-invariant verdict: least eigenvalue of V below ½.
pub fn is_squeezed(params: &PairParams) -> Result<bool> {
    let (e_down, _) = analytic_spectrum(params)?;
    Ok(e_down < VACUUM_NOISE - SQUEEZE_GUARD)
}

/// Noise `(S V Sᵀ)₁₁` of the leading quadrature after the heterodyne
/// element `U_ψ`.
pub fn heterodyne_noise(v: &VarianceMatrix, psi: f64) -> f64 {
    let (_, s) = heterodyne_u(psi);
    v.mat().congruence(&s.mat)[(0, 0)]
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_tau(angle: f64) -> f64 {
    let w = angle.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Searches the heterodyne family `U_ψ` for the phase that minimises the
/// leading-quadrature noise: a 256-point grid over `[0, 2π)` refined by
/// golden-section search around the best grid point.
///
/// For q = 0 the minimum equals e↓. For q > 0 the heterodyne family only
/// mixes the two modes with equal weight and the minimum stays above e↓;
/// [`leading_u2_transform`] reaches e↓ for every q.
pub fn leading_position_transform(params: &PairParams) -> Result<LeadingTransform> {
    if params.zeta.is_zero() {
        return Err(Error::ZeroAmplitude);
    }
    let v = variance_matrix(params)?;
    let f = |psi: f64| heterodyne_noise(&v, psi);
    let step = TAU / PSI_GRID_POINTS as f64;
    let (best, _) = (0..PSI_GRID_POINTS)
        .map(|k| (k, f(k as f64 * step)))
        .fold((0, f64::INFINITY), |acc, (k, val)| {
            if val < acc.1 {
                (k, val)
            } else {
                acc
            }
        });
    let centre = best as f64 * step;
    let psi = wrap_tau(golden_section_min(f, centre - step, centre + step, 1e-12));
    let (u, transform) = heterodyne_u(psi);
    Ok(LeadingTransform {
        psi: Some(psi),
        u,
        transform,
        value: f(psi),
    })
}

/// `(ψ* − arg ζ)` reduced to `[0, 2π)`.
pub fn heterodyne_phase_offset(params: &PairParams, psi_star: f64) -> f64 {
    wrap_tau(psi_star - params.zeta.arg())
}

/// A U(2) element whose image `S(X, Y)` has the least eigenvector of V as
/// its first row, so `(S V Sᵀ)₁₁ = e↓`.
///
/// U(2) acts transitively on unit vectors of R⁴ ≅ C², so such an element
/// always exists even though V itself cannot be diagonalised inside U(2).
pub fn leading_u2_transform(params: &PairParams) -> Result<LeadingTransform> {
    let v = variance_matrix(params)?;
    let spectrum = v.spectrum()?;
    let [a1, a2, b1, b2] = spectrum.eigenvector(0);
    let u = U2Element::from_first_row(Complex64::new(a1, -b1), Complex64::new(a2, -b2))?;
    let transform = embed_u2(&u);
    let value = v.mat().congruence(&transform.mat)[(0, 0)];
    Ok(LeadingTransform {
        psi: None,
        u,
        transform,
        value,
    })
}

/// Full closed-form analysis of one state.
pub fn analyze(params: &PairParams) -> Result<SqueezeReport> {
    let n = photon_numbers(params)?;
    let (e_down, e_up) = spectrum_from_numbers(params, &n);
    let psi_star = if params.zeta.is_zero() {
        None
    } else {
        leading_position_transform(params)?.psi
    };
    Ok(SqueezeReport {
        n1: n.n1,
        n2: n.n2,
        e_down,
        e_up,
        theta: stage1_angle(params),
        phi: stage2_angle(params),
        psi_star,
        squeezed: e_down < VACUUM_NOISE - SQUEEZE_GUARD,
    })
}
