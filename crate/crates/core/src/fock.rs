//! Truncated Fock-space ground truth for the closed-form moments.
//!
//! The pair coherent state is expanded on `|n+q, n⟩` with complex
//! coefficients, embedded in the full two-mode product basis `|m, n⟩`, and
//! every moment is taken by applying the quadrature operators `q_j`, `p_j`
//! built from ladder matrices. Nothing here uses the photon-number series
//! or the structure of the analytic variance matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat4;
use crate::pair_coherent::{PairParams, PhotonNumbers, VarianceMatrix};

/// Largest tail bound `build_state` accepts.
pub const MAX_TAIL_BOUND: f64 = 1e-8;

/// Largest admissible `|⟨ξ_a⟩|`.
pub const FIRST_MOMENT_TOL: f64 = 1e-10;

const QUADRATURE_NAMES: [&str; 4] = ["q1", "q2", "p1", "p2"];

/// Truncated pair coherent state.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    /// Normalised coefficient of `|n+q, n⟩` for `n = 0..=ncut`.
    pub coeffs: Vec<Complex64>,
    pub q: u32,
    pub ncut: usize,
    /// `|c_{ncut+1}|²` relative to the retained norm.
    pub tail_bound: f64,
}

/// `max(20, ceil(4|ζ| + 10√|ζ| + q))`.
pub fn auto_ncut(params: &PairParams) -> usize {
    let x = params.zeta.abs();
    let n = (4.0 * x + 10.0 * x.sqrt() + f64::from(params.q)).ceil();
    (n as usize).max(20)
}

/// Builds `N Σ_n ζⁿ / [n!(n+q)!]^{1/2} |n+q, n⟩` truncated at `n = ncut`.
pub fn build_state(params: &PairParams, ncut: usize) -> Result<FockState> {
    if ncut < 1 {
        return Err(Error::Domain("ncut must be at least 1".into()));
    }
    let zeta = params.zeta.to_complex();
    let q = f64::from(params.q);
    // The common factor 1/√q! is dropped; normalisation restores it.
    let mut raw = Vec::with_capacity(ncut + 2);
    raw.push(Complex64::new(1.0, 0.0));
    for n in 1..=ncut + 1 {
        let k = n as f64;
        let prev = raw[n - 1];
        raw.push(prev * zeta / (k * (k + q)).sqrt());
    }
    let dropped = raw.pop().expect("ncut + 2 coefficients");
    let norm_sqr: f64 = raw.iter().map(|c| c.norm_sqr()).sum();
    if !norm_sqr.is_finite() {
        return Err(Error::Overflow("Fock coefficients overflow".into()));
    }
    let tail_bound = dropped.norm_sqr() / norm_sqr;
    if tail_bound > MAX_TAIL_BOUND {
        return Err(Error::TruncationTooSmall { ncut, tail_bound });
    }
    let scale = norm_sqr.sqrt().recip();
    Ok(FockState {
        coeffs: raw.into_iter().map(|c| c * scale).collect(),
        q: params.q,
        ncut,
        tail_bound,
    })
}

/// [`build_state`] at [`auto_ncut`].
pub fn build_state_auto(params: &PairParams) -> Result<FockState> {
    build_state(params, auto_ncut(params))
}

impl FockState {
    pub fn max_photons_mode1(&self) -> usize {
        self.ncut + self.q as usize
    }

    pub fn max_photons_mode2(&self) -> usize {
        self.ncut
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The state in the product basis of [`QuadOps::for_state`].
    pub fn state_vector(&self) -> Vec<Complex64> {
        let m2 = self.max_photons_mode2();
        let dim = (self.max_photons_mode1() + 1) * (m2 + 1);
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        let q = self.q as usize;
        for (n, c) in self.coeffs.iter().enumerate() {
            v[(n + q) * (m2 + 1) + n] = *c;
        }
        v
    }
}

/// Compressed-row complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseOp {
    fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; dim + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in triplets {
            if last == Some((i, j)) {
                *vals.last_mut().expect("duplicate follows an entry") += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            cols.push(j);
            vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseOp {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.cols[k], self.vals[k]))
        })
    }

    pub fn identity(dim: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        SparseOp::from_triplets(dim, (0..dim).map(|i| (i, i, one)).collect())
    }

    /// Single-mode annihilation operator on `|0⟩ … |dim-1⟩`.
    pub fn annihilation(dim: usize) -> Self {
        SparseOp::from_triplets(
            dim,
            (1..dim)
                .map(|n| (n - 1, n, Complex64::new((n as f64).sqrt(), 0.0)))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn kron(a: &SparseOp, b: &SparseOp) -> Self {
        let dim = a.dim * b.dim;
        let mut t = Vec::with_capacity(a.nnz() * b.nnz());
        for (i, j, x) in a.triplets() {
            for (k, l, y) in b.triplets() {
                t.push((i * b.dim + k, j * b.dim + l, x * y));
            }
        }
        SparseOp::from_triplets(dim, t)
    }

    pub fn adjoint(&self) -> Self {
        SparseOp::from_triplets(self.dim, self.triplets().map(|(i, j, v)| (j, i, v.conj())).collect())
    }

    /// `alpha·self + beta·other`.
    pub fn combine(&self, alpha: Complex64, other: &SparseOp, beta: Complex64) -> Self {
        assert_eq!(self.dim, other.dim);
        let t = self
            .triplets()
            .map(|(i, j, v)| (i, j, alpha * v))
            .chain(other.triplets().map(|(i, j, v)| (i, j, beta * v)))
            .collect();
        SparseOp::from_triplets(self.dim, t)
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .map(|k| self.vals[k] * x[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    /// Largest `|A_ij − conj(A_ji)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let diff = self.combine(
            Complex64::new(1.0, 0.0),
            &self.adjoint(),
            Complex64::new(-1.0, 0.0),
        );
        diff.vals.iter().fold(0.0_f64, |m, v| m.max(v.norm()))
    }
}

/// Ladder and quadrature operators on the two-mode product basis
/// `|m, n⟩`, `m ≤ max1`, `n ≤ max2`, indexed `m·(max2+1) + n`.
#[derive(Debug, Clone)]
pub struct QuadOps {
    pub max1: usize,
    pub max2: usize,
    pub a1: SparseOp,
    pub a2: SparseOp,
    /// `[q1, q2, p1, p2]`.
    pub quadratures: [SparseOp; 4],
}

impl QuadOps {
    pub fn new(max1: usize, max2: usize) -> Self {
        let a1 = SparseOp::kron(&SparseOp::annihilation(max1 + 1), &SparseOp::identity(max2 + 1));
        let a2 = SparseOp::kron(&SparseOp::identity(max1 + 1), &SparseOp::annihilation(max2 + 1));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let position = |a: &SparseOp| a.combine(Complex64::new(h, 0.0), &a.adjoint(), Complex64::new(h, 0.0));
        // p = -i (a - a†) / √2
        let momentum = |a: &SparseOp| a.combine(Complex64::new(0.0, -h), &a.adjoint(), Complex64::new(0.0, h));
        let quadratures = [position(&a1), position(&a2), momentum(&a1), momentum(&a2)];
        QuadOps {
            max1,
            max2,
            a1,
            a2,
            quadratures,
        }
    }

    pub fn for_state(state: &FockState) -> Self {
        QuadOps::new(state.max_photons_mode1(), state.max_photons_mode2())
    }

    pub fn dim(&self) -> usize {
        (self.max1 + 1) * (self.max2 + 1)
    }

    pub fn index(&self, m: usize, n: usize) -> usize {
        m * (self.max2 + 1) + n
    }

    /// Largest deviation of `[q_j, p_j]` from `i·I` on basis states whose
    /// mode-`j` occupation is below the truncation edge.
    pub fn commutator_deviation(&self, mode: usize) -> f64 {
        let (qo, po) = (&self.quadratures[mode], &self.quadratures[mode + 2]);
        let dim = self.dim();
        let mut dev = 0.0_f64;
        for m in 0..=self.max1 {
            for n in 0..=self.max2 {
                let edge = if mode == 0 { m == self.max1 } else { n == self.max2 };
                if edge {
                    continue;
                }
                let k = self.index(m, n);
                let mut e = vec![Complex64::new(0.0, 0.0); dim];
                e[k] = Complex64::new(1.0, 0.0);
                let qp = qo.matvec(&po.matvec(&e));
                let pq = po.matvec(&qo.matvec(&e));
                for (i, (x, y)) in qp.iter().zip(pq.iter()).enumerate() {
                    let target = if i == k { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, 0.0) };
                    dev = dev.max((x - y - target).norm());
                }
            }
        }
        dev
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// All first and second moments of the quadratures in a pure state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericMoments {
    /// `½⟨{ξ_a, ξ_b}⟩`, real part.
    pub second: Mat4,
    /// `⟨ξ_a⟩`, real part.
    pub first: [f64; 4],
    /// Largest imaginary residue among all computed expectation values.
    pub imag_residue: f64,
}

pub fn numeric_moments(state: &FockState) -> NumericMoments {
    let ops = QuadOps::for_state(state);
    let psi = state.state_vector();
    let applied: Vec<Vec<Complex64>> = ops.quadratures.iter().map(|op| op.matvec(&psi)).collect();
    let mut imag_residue = 0.0_f64;
    let first = std::array::from_fn(|a| {
        let m = inner(&psi, &applied[a]);
        imag_residue = imag_residue.max(m.im.abs());
        m.re
    });
    // ⟨ψ| ξ_a ξ_b |ψ⟩ by applying both operators in turn.
    let mut products = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (a, op) in ops.quadratures.iter().enumerate() {
        for (b, row) in applied.iter().enumerate() {
            products[a][b] = inner(&psi, &op.matvec(row));
        }
    }
    let mut second = Mat4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let sym = 0.5 * (products[a][b] + products[b][a]);
            imag_residue = imag_residue.max(sym.im.abs());
            second[(a, b)] = sym.re;
        }
    }
    NumericMoments {
        second,
        first,
        imag_residue,
    }
}

/// `V_ab = ½⟨{ξ_a, ξ_b}⟩`; fails if a first moment does not vanish.
pub fn numeric_variance(state: &FockState) -> Result<VarianceMatrix> {
    let m = numeric_moments(state);
    for (value, quadrature) in m.first.iter().zip(QUADRATURE_NAMES) {
        if value.abs() > FIRST_MOMENT_TOL {
            return Err(Error::NonZeroFirstMoment {
                quadrature,
                value: *value,
            });
        }
    }
    VarianceMatrix::new(m.second)
}

/// `(Σ (n+q)|c_n|², Σ n|c_n|²)`.
pub fn numeric_photons(state: &FockState) -> PhotonNumbers {
    let q = f64::from(state.q);
    let (mut n1, mut n2) = (0.0, 0.0);
    for (n, c) in state.coeffs.iter().enumerate() {
        let w = c.norm_sqr();
        n1 += (n as f64 + q) * w;
        n2 += n as f64 * w;
    }
    PhotonNumbers { n1, n2 }
}

/// `‖(a1 a2 − ζ)|ψ⟩‖` over basis states with mode-2 occupation below the
/// truncation edge.
pub fn eigen_residual(state: &FockState, params: &PairParams) -> f64 {
    let ops = QuadOps::for_state(state);
    let psi = state.state_vector();
    let pair = ops.a1.matvec(&ops.a2.matvec(&psi));
    let zeta = params.zeta.to_complex();
    let mut r = Vec::new();
    for m in 0..=ops.max1 {
        for n in 0..ops.max2 {
            let k = ops.index(m, n);
            r.push(pair[k] - zeta * psi[k]);
        }
    }
    norm(&r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(re: f64, im: f64, q: i64) -> PairParams {
        PairParams::new(re, im, q).unwrap()
    }

    #[test]
    fn zero_amplitude_is_fock_state() {
        let s = build_state(&p(0.0, 0.0, 2), 5).unwrap();
        assert_eq!(s.coeffs[0], Complex64::new(1.0, 0.0));
        assert!(s.coeffs[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0)));
        assert_eq!(s.tail_bound, 0.0);
        let n = numeric_photons(&s);
        assert_eq!((n.n1, n.n2), (2.0, 0.0));
        let v = numeric_variance(&s).unwrap();
        let want = Mat4::diag([2.5, 0.5, 2.5, 0.5]);
        assert!((*v.mat() - want).norm_inf() < 1e-14);
    }

    #[test]
    fn coefficients_fall_as_inverse_factorial() {
        let s = build_state(&p(1.0, 0.0, 0), 30).unwrap();
        assert!(s.tail_bound < 1e-60);
        let mut fact = 1.0;
        for n in 1..=10 {
            fact *= n as f64;
            let ratio = s.coeffs[n].re / s.coeffs[0].re;
            assert!((ratio - 1.0 / fact).abs() < 1e-15);
        }
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_too_small() {
        assert!(matches!(
            build_state(&p(3.0, 0.0, 0), 4),
            Err(Error::TruncationTooSmall { .. })
        ));
        assert!(matches!(build_state(&p(0.0, 0.0, 0), 0), Err(Error::Domain(_))));
    }

    #[test]
    fn pair_annihilator_eigenstate() {
        let params = p(0.8, -1.1, 2);
        let s = build_state_auto(&params).unwrap();
        assert!(eigen_residual(&s, &params) <= 1e-8);
    }

    #[test]
    fn operators_are_hermitian_and_canonical() {
        let ops = QuadOps::new(7, 5);
        for op in &ops.quadratures {
            assert!(op.hermiticity_deviation() <= 1e-12);
        }
        assert!(ops.commutator_deviation(0) <= 1e-10);
        assert!(ops.commutator_deviation(1) <= 1e-10);
        assert!(ops.a1.hermiticity_deviation() > 1.0);
    }

    #[test]
    fn imaginary_coupling_slot() {
        let params = p(0.0, 2.0, 1);
        let v = numeric_variance(&build_state_auto(&params).unwrap()).unwrap();
        assert!((v.mat()[(0, 3)] - 2.0).abs() < 1e-8);
        assert!((v.mat()[(1, 2)] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn photon_difference_is_q() {
        for q in 0..4 {
            let s = build_state_auto(&PairParams::from_polar(1.7, 2.0, q).unwrap()).unwrap();
            let n = numeric_photons(&s);
            assert!((n.n1 - n.n2 - f64::from(q)).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_monotone() {
        let params = p(1.5, 0.5, 1);
        let base = build_state_auto(&params).unwrap();
        let more = build_state(&params, base.ncut + 10).unwrap();
        let a = numeric_moments(&base);
        let b = numeric_moments(&more);
        let bound = 10.0 * base.tail_bound.max(f64::EPSILON);
        assert!((a.second - b.second).norm_inf() <= bound);
    }
}
