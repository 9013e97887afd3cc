use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;

use paircoh::fock::{build_state, build_state_auto, eigen_residual, numeric_moments, numeric_photons, numeric_variance};
use paircoh::linalg::{sym_eigen, DEFAULT_EIGEN_TOL};
use paircoh::pair_coherent::{
    analytic_spectrum, diagonalize, heterodyne_phase_offset, is_squeezed,
    leading_position_transform, norm_series, photon_numbers, stage1_angle, stage1_eigenvalues,
    variance_matrix, PairParams, SERIES_REL_TOL,
};
use paircoh::symplectic::{embed_u2, rotation_r1, U2Element};

fn params() -> impl Strategy<Value = PairParams> {
    (0.0f64..6.0, -PI..PI, 0u32..7).prop_map(|(x, arg, q)| PairParams::from_polar(x, arg, q).unwrap())
}

fn unitary() -> impl Strategy<Value = U2Element> {
    (-PI..PI, prop::array::uniform4(-1.0f64..1.0))
        .prop_filter("nonzero", |(_, v)| v.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|(g, v)| {
            U2Element::from_cayley_klein(g, Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3])).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn spectrum_invariant_under_passive_maps(p in params(), u in unitary()) {
        let v = variance_matrix(&p).unwrap();
        let s = embed_u2(&u);
        prop_assert!((s.mat.det() - 1.0).abs() <= 1e-10);
        let before = v.spectrum().unwrap().eigenvalues;
        let after = sym_eigen(&v.mat().congruence(&s.mat), DEFAULT_EIGEN_TOL).unwrap().eigenvalues;
        for (a, b) in before.iter().zip(after) {
            prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
        }
    }

    #[test]
    fn spectrum_doubly_degenerate(p in params()) {
        let e = variance_matrix(&p).unwrap().spectrum().unwrap().eigenvalues;
        let (lo, hi) = analytic_spectrum(&p).unwrap();
        let scale = hi.max(1.0);
        for (got, want) in e.iter().zip([lo, lo, hi, hi]) {
            prop_assert!((got - want).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn variance_is_physical(p in params()) {
        let v = variance_matrix(&p).unwrap();
        prop_assert!(v.mat().max_asymmetry() <= 1e-12);
        prop_assert!(v.is_positive_definite().unwrap());
        prop_assert!(v.uncertainty_margin().unwrap() >= -1e-10);
        if v.is_manifestly_squeezed() {
            prop_assert!(is_squeezed(&p).unwrap());
        }
        let n = photon_numbers(&p).unwrap();
        prop_assert!((n.n1 - n.n2 - f64::from(p.q)).abs() <= 1e-10);
        let (lo, hi) = analytic_spectrum(&p).unwrap();
        prop_assert!(lo <= hi);
    }

    #[test]
    fn diagonalisation_is_complete(p in params()) {
        let d = diagonalize(&p).unwrap();
        prop_assert!(d.transform.is_orthogonal);
        let scale = d.diagonal.norm_inf().max(1.0);
        prop_assert!(d.diagonal.off_diagonal_norm_inf() <= 1e-10 * scale);
        let (lo, hi) = analytic_spectrum(&p).unwrap();
        let mut diag = d.diagonal.diagonal();
        diag.sort_by(f64::total_cmp);
        for (got, want) in diag.iter().zip([lo, lo, hi, hi]) {
            prop_assert!((got - want).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn stage1_blocks_match_lambda(p in params()) {
        let v = variance_matrix(&p).unwrap();
        let n2 = photon_numbers(&p).unwrap().n2;
        let vp = v.mat().congruence(&rotation_r1(stage1_angle(&p)).mat);
        let (lp, lm) = stage1_eigenvalues(&p);
        let mut got = [vp[(0, 0)] - n2 - 0.5, vp[(1, 1)] - n2 - 0.5];
        got.sort_by(f64::total_cmp);
        let scale = lp.abs().max(1.0);
        prop_assert!((got[1] - lp).abs() <= 1e-12 * scale);
        prop_assert!((got[0] - lm).abs() <= 1e-12 * scale);
        prop_assert!(vp[(0, 1)].abs() <= 1e-12 * scale);
    }

    #[test]
    fn heterodyne_never_beats_least_eigenvalue(p in params()) {
        prop_assume!(p.zeta.abs() > 1e-3);
        let (lo, _) = analytic_spectrum(&p).unwrap();
        let lt = leading_position_transform(&p).unwrap();
        prop_assert!(lt.value >= lo - 1e-12);
        prop_assert!(lt.transform.is_passive());
    }
}

#[test]
fn spectrum_independent_of_phase() {
    for q in 0..5 {
        for x in [0.1, 0.7, 2.0, 4.5] {
            let base = analytic_spectrum(&PairParams::from_polar(x, 0.0, q).unwrap()).unwrap();
            for k in 1..8 {
                let p = PairParams::from_polar(x, TAU * k as f64 / 8.0, q).unwrap();
                let (lo, hi) = analytic_spectrum(&p).unwrap();
                assert!((lo - base.0).abs() <= 1e-12);
                assert!((hi - base.1).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn heterodyne_phase_follows_zeta_at_q0() {
    let psi0 = leading_position_transform(&PairParams::from_polar(0.3, 0.0, 0).unwrap())
        .unwrap()
        .psi
        .unwrap();
    for k in 0..8 {
        let alpha = -PI + TAU * k as f64 / 8.0 + 0.1;
        let p = PairParams::from_polar(0.3, alpha, 0).unwrap();
        let lt = leading_position_transform(&p).unwrap();
        let psi = lt.psi.unwrap();
        let d = (psi - psi0 - alpha).rem_euclid(PI);
        assert!(d.min(PI - d) < 1e-6, "alpha={alpha} psi={psi}");
        // offset from arg ζ is a half turn
        let off = heterodyne_phase_offset(&p, psi);
        assert!((off - PI).abs() < 1e-6);
        let (lo, _) = analytic_spectrum(&p).unwrap();
        assert!((lt.value - lo).abs() <= 1e-9);
    }
}

#[test]
fn verdict_agrees_with_jacobi_for_q3() {
    for k in 1..=50 {
        let x = 5.0 * k as f64 / 50.0;
        let p = PairParams::from_polar(x, 0.7, 3).unwrap();
        let numeric = variance_matrix(&p).unwrap().spectrum().unwrap().least() < 0.5 - 1e-12;
        assert_eq!(is_squeezed(&p).unwrap(), numeric, "|zeta| = {x}");
    }
}

#[test]
fn normalisation_matches_fock_state() {
    // N_q = S^{-1/2} normalises the printed expansion: Σ |ζ|^{2n}/(n!(n+q)!) · N_q² = 1
    for q in 0..4 {
        let p = PairParams::from_polar(1.0, 0.3, q).unwrap();
        let s = norm_series(&p, SERIES_REL_TOL).unwrap();
        let mut partial = 0.0;
        let mut term = (1..=q).fold(1.0, |a, k| a / f64::from(k));
        for n in 0..=60u32 {
            partial += term;
            term /= f64::from(n + 1) * f64::from(n + 1 + q);
        }
        assert!((partial / s - 1.0).abs() < 1e-14);
        let state = build_state(&p, 60).unwrap();
        assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn oracle_agreement_grid() {
    for q in [0, 1, 2, 3, 5] {
        for x in [0.1, 0.5, 1.0, 2.0, 4.0] {
            for k in 0..4 {
                let p = PairParams::from_polar(x, 0.4 + k as f64 * PI / 2.0, q).unwrap();
                let state = build_state_auto(&p).unwrap();
                assert!(state.tail_bound < 1e-12);
                let v = numeric_variance(&state).unwrap();
                let dev = (*v.mat() - *variance_matrix(&p).unwrap().mat()).norm_inf();
                assert!(dev <= 1e-8, "q={q} x={x} dev={dev}");
                let (a, b) = (photon_numbers(&p).unwrap(), numeric_photons(&state));
                assert!((a.n2 - b.n2).abs() <= 1e-10);
                let m = numeric_moments(&state);
                assert!(m.imag_residue <= 1e-12);
                assert!(eigen_residual(&state, &p) <= 1e-8);
            }
        }
    }
}

#[test]
fn oracle_converges_with_truncation() {
    for q in [0, 2] {
        let p = PairParams::from_polar(2.0, 1.0, q).unwrap();
        let base = build_state_auto(&p).unwrap();
        let wider = build_state(&p, base.ncut + 10).unwrap();
        let (a, b) = (numeric_moments(&base), numeric_moments(&wider));
        let bound = 10.0 * base.tail_bound.max(f64::EPSILON);
        assert!((a.second - b.second).norm_inf() <= bound);
    }
}
