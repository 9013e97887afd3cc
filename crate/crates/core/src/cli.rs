//! Library side of the `paircoh` command line: single-point reports,
//! |ζ| sweeps written as CSV, and the Fock-oracle verification grid.
//!
//! All output is deterministic. Numbers in CSV are rounded to 12
//! significant digits and printed in the shortest decimal form that
//! round-trips that rounded value.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::fock::{build_state_auto, numeric_moments, numeric_photons, FIRST_MOMENT_TOL};
use crate::pair_coherent::{
    analytic_spectrum, analyze, heterodyne_phase_offset, leading_position_transform,
    leading_u2_transform, photon_numbers, variance_matrix, PairParams, SQUEEZE_GUARD,
    VACUUM_NOISE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_OVERFLOW: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const CSV_HEADER: &str = "abs_zeta,arg_zeta,q,n1,n2,e_down,e_up,squeezed";

/// Guards for `verify`.
pub const VERIFY_MAX_Q: u32 = 6;
pub const VERIFY_MAX_ZETA: f64 = 5.0;

const VERIFY_AMPLITUDES: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 4.0];
const VERIFY_PHASES: usize = 4;

/// Tolerances of the verification grid.
pub const TOL_VARIANCE: f64 = 1e-8;
pub const TOL_PHOTONS: f64 = 1e-10;
pub const TOL_SPECTRUM: f64 = 1e-10;
pub const TOL_UNCERTAINTY: f64 = 1e-10;
pub const TOL_LEADING: f64 = 1e-9;
pub const TOL_TAIL: f64 = 1e-12;
pub const TOL_SELF_CHECK: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("invalid scan: {0}")]
    InvalidScan(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Overflow(_)) => EXIT_OVERFLOW,
            CliError::Core(_) | CliError::InvalidScan(_) => EXIT_DOMAIN,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal that
/// round-trips the rounded value.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// One `analyze` record.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeRecord {
    pub re: f64,
    pub im: f64,
    pub q: u32,
    pub n1: f64,
    pub n2: f64,
    pub variance: [[f64; 4]; 4],
    pub e_down: f64,
    pub e_up: f64,
    pub theta: f64,
    pub phi: f64,
    /// Minimiser of the leading noise over the heterodyne family.
    pub psi_star: Option<f64>,
    /// `ψ* − arg ζ` in `[0, 2π)`.
    pub psi_offset: Option<f64>,
    /// Leading noise at `ψ*`.
    pub heterodyne_min: Option<f64>,
    /// Leading noise after the general U(2) element built from the least
    /// eigenvector.
    pub u2_leading: f64,
    pub squeezed: bool,
    /// Least eigenvalue of V from the Jacobi solver.
    pub numeric_e_down: f64,
    /// `|numeric_e_down − e_down| ≤ 1e-10`.
    pub self_check: bool,
}

pub fn cmd_analyze(re: f64, im: f64, q: i64) -> Result<AnalyzeRecord, CliError> {
    let params = PairParams::new(re, im, q)?;
    let report = analyze(&params)?;
    let v = variance_matrix(&params)?;
    let spectrum = v.spectrum()?;
    let (psi_offset, heterodyne_min) = if params.zeta.is_zero() {
        (None, None)
    } else {
        let lt = leading_position_transform(&params)?;
        let psi = lt.psi.expect("heterodyne search yields a phase");
        (Some(heterodyne_phase_offset(&params, psi)), Some(lt.value))
    };
    let u2 = leading_u2_transform(&params)?;
    Ok(AnalyzeRecord {
        re,
        im,
        q: params.q,
        n1: report.n1,
        n2: report.n2,
        variance: *v.mat().rows(),
        e_down: report.e_down,
        e_up: report.e_up,
        theta: report.theta,
        phi: report.phi,
        psi_star: report.psi_star,
        psi_offset,
        heterodyne_min,
        u2_leading: u2.value,
        squeezed: report.squeezed,
        numeric_e_down: spectrum.least(),
        self_check: (spectrum.least() - report.e_down).abs() <= TOL_SELF_CHECK,
    })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "none".to_string())
}

impl AnalyzeRecord {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "zeta = {} + {}i", self.re, self.im);
        let _ = writeln!(s, "q = {}", self.q);
        let _ = writeln!(s, "n1 = {}", self.n1);
        let _ = writeln!(s, "n2 = {}", self.n2);
        for (i, row) in self.variance.iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>22}")).collect();
            let label = if i == 0 { "V =" } else { "   " };
            let _ = writeln!(s, "{label} [{}]", cells.join(" "));
        }
        let _ = writeln!(s, "e_down = {}", self.e_down);
        let _ = writeln!(s, "e_up = {}", self.e_up);
        let _ = writeln!(s, "theta = {}", self.theta);
        let _ = writeln!(s, "phi = {}", self.phi);
        let _ = writeln!(s, "psi_star = {}", opt(self.psi_star));
        let _ = writeln!(s, "psi_offset = {}", opt(self.psi_offset));
        let _ = writeln!(s, "heterodyne_min = {}", opt(self.heterodyne_min));
        let _ = writeln!(s, "u2_leading = {}", self.u2_leading);
        let _ = writeln!(s, "squeezed = {}", self.squeezed);
        let _ = writeln!(s, "numeric_e_down = {}", self.numeric_e_down);
        let _ = writeln!(s, "self_check = {}", if self.self_check { "ok" } else { "FAILED" });
        s
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string(self).expect("record serialises")
    }
}

/// Parameters of a |ζ| sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub q_list: Vec<u32>,
    pub abs_zeta_start: f64,
    pub abs_zeta_stop: f64,
    pub steps: usize,
    pub arg_zeta: f64,
    /// Repeat every grid point at this many equally spaced phases,
    /// starting from `arg_zeta`.
    pub phase_sweep: Option<usize>,
    pub output_path: PathBuf,
}

impl ScanSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.q_list.is_empty() {
            return Err(CliError::InvalidScan("q list is empty".into()));
        }
        if self.steps < 2 {
            return Err(CliError::InvalidScan(format!("steps = {} < 2", self.steps)));
        }
        if !(self.abs_zeta_start.is_finite() && self.abs_zeta_stop.is_finite() && self.arg_zeta.is_finite()) {
            return Err(CliError::InvalidScan("grid bounds must be finite".into()));
        }
        if self.abs_zeta_start < 0.0 {
            return Err(CliError::InvalidScan(format!(
                "zeta-min = {} < 0",
                self.abs_zeta_start
            )));
        }
        if self.abs_zeta_stop <= self.abs_zeta_start {
            return Err(CliError::InvalidScan(format!(
                "zeta-max = {} must exceed zeta-min = {}",
                self.abs_zeta_stop, self.abs_zeta_start
            )));
        }
        if self.phase_sweep == Some(0) {
            return Err(CliError::InvalidScan("phase sweep needs at least one phase".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let span = self.abs_zeta_stop - self.abs_zeta_start;
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.abs_zeta_stop
                } else {
                    self.abs_zeta_start + span * k as f64 / last
                }
            })
            .collect()
    }

    fn phases(&self) -> Vec<f64> {
        match self.phase_sweep {
            None => vec![self.arg_zeta],
            Some(k) => (0..k).map(|j| self.arg_zeta + TAU * j as f64 / k as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub abs_zeta: f64,
    pub arg_zeta: f64,
    pub q: u32,
    pub n1: f64,
    pub n2: f64,
    pub e_down: f64,
    pub e_up: f64,
    pub squeezed: bool,
}

impl ScanRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            format_sig12(self.abs_zeta),
            format_sig12(self.arg_zeta),
            self.q,
            format_sig12(self.n1),
            format_sig12(self.n2),
            format_sig12(self.e_down),
            format_sig12(self.e_up),
            self.squeezed
        )
    }
}

/// Rows ordered by `(q, |ζ|, phase)`.
pub fn scan_rows(spec: &ScanSpec) -> Result<Vec<ScanRow>, CliError> {
    spec.validate()?;
    let mut q_list = spec.q_list.clone();
    q_list.sort_unstable();
    q_list.dedup();
    let grid = spec.grid();
    let phases = spec.phases();
    let mut rows = Vec::with_capacity(q_list.len() * grid.len() * phases.len());
    for &q in &q_list {
        for &abs_zeta in &grid {
            for &arg_zeta in &phases {
                let params = PairParams::from_polar(abs_zeta, arg_zeta, q)?;
                let n = photon_numbers(&params)?;
                let (e_down, e_up) = analytic_spectrum(&params)?;
                rows.push(ScanRow {
                    abs_zeta,
                    arg_zeta,
                    q,
                    n1: n.n1,
                    n2: n.n2,
                    e_down,
                    e_up,
                    squeezed: e_down < VACUUM_NOISE - SQUEEZE_GUARD,
                });
            }
        }
    }
    Ok(rows)
}

pub fn render_csv(rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv());
        out.push('\n');
    }
    out
}

pub fn render_json_lines(rows: &[ScanRow]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&serde_json::to_string(row).expect("row serialises"));
        out.push('\n');
    }
    out
}

/// Runs the sweep and writes it to `spec.output_path`; returns the row count.
pub fn cmd_scan(spec: &ScanSpec, json: bool) -> Result<usize, CliError> {
    let rows = scan_rows(spec)?;
    let body = if json { render_json_lines(&rows) } else { render_csv(&rows) };
    std::fs::write(&spec.output_path, body).map_err(|source| CliError::Io {
        path: spec.output_path.clone(),
        source,
    })?;
    Ok(rows.len())
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Heterodyne search outcome at one grid point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OffsetRecord {
    pub q: u32,
    pub abs_zeta: f64,
    pub arg_zeta: f64,
    /// `ψ* − arg ζ` in `[0, 2π)`.
    pub offset: f64,
    /// `f(ψ*) − e↓`; zero up to search accuracy only when q = 0.
    pub heterodyne_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub points: usize,
    pub checks: Vec<VerifyCheck>,
    pub offsets: Vec<OffsetRecord>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "grid points: {}", self.points);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<24} max_dev = {:<12.3e} tol = {:<8.0e} {}",
                c.name,
                c.max_deviation,
                c.tolerance,
                if c.passed { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "heterodyne search (psi* - arg zeta, f(psi*) - e_down):");
        for o in &self.offsets {
            let _ = writeln!(
                s,
                "  q={} |zeta|={} arg={:.6} offset={:.12} gap={:.3e}",
                o.q, o.abs_zeta, o.arg_zeta, o.offset, o.heterodyne_gap
            );
        }
        let _ = writeln!(s, "verdict: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    ok: bool,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tracker {
            name,
            tolerance,
            worst: 0.0,
            ok: true,
        }
    }

    fn record(&mut self, deviation: f64) {
        self.worst = self.worst.max(deviation);
        self.ok &= deviation <= self.tolerance;
    }

    fn finish(self) -> VerifyCheck {
        VerifyCheck {
            name: self.name,
            max_deviation: self.worst,
            tolerance: self.tolerance,
            passed: self.ok,
        }
    }
}

fn verify_amplitudes(zeta_max: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = VERIFY_AMPLITUDES.iter().copied().filter(|&x| x <= zeta_max).collect();
    if xs.last() != Some(&zeta_max) {
        xs.push(zeta_max);
    }
    xs
}

/// Cross-checks the closed forms against the Fock oracle and the Jacobi
/// solver on `q ∈ 0..=q_max`, `|ζ| ∈ {0.1, 0.5, 1, 2, 4} ∩ (0, zeta_max]`
/// (plus `zeta_max`), at four phases.
pub fn cmd_verify(q_max: u32, zeta_max: f64) -> Result<VerifySummary, CliError> {
    if q_max > VERIFY_MAX_Q {
        return Err(Error::Domain(format!("q-max = {q_max} exceeds {VERIFY_MAX_Q}")).into());
    }
    if !(zeta_max > 0.0 && zeta_max <= VERIFY_MAX_ZETA) {
        return Err(Error::Domain(format!("zeta-max = {zeta_max} outside (0, {VERIFY_MAX_ZETA}]")).into());
    }
    let mut variance = Tracker::new("variance vs oracle", TOL_VARIANCE);
    let mut photons = Tracker::new("photons vs oracle", TOL_PHOTONS);
    let mut first = Tracker::new("first moments", FIRST_MOMENT_TOL);
    let mut tail = Tracker::new("truncation tail", TOL_TAIL);
    let mut spectrum = Tracker::new("spectrum vs Jacobi", TOL_SPECTRUM);
    let mut degeneracy = Tracker::new("double degeneracy", TOL_SPECTRUM);
    let mut uncertainty = Tracker::new("uncertainty principle", TOL_UNCERTAINTY);
    let mut leading = Tracker::new("U(2) leading slot", TOL_LEADING);
    let mut offsets = Vec::new();
    let mut points = 0;

    for q in 0..=q_max {
        for x in verify_amplitudes(zeta_max) {
            for k in 0..VERIFY_PHASES {
                let arg = 0.25 + FRAC_PI_2 * k as f64;
                let params = PairParams::from_polar(x, arg, q)?;
                points += 1;

                let v = variance_matrix(&params)?;
                let n = photon_numbers(&params)?;
                let state = build_state_auto(&params)?;
                let moments = numeric_moments(&state);
                let nn = numeric_photons(&state);
                tail.record(state.tail_bound);
                variance.record((moments.second - *v.mat()).norm_inf());
                photons.record((nn.n1 - n.n1).abs().max((nn.n2 - n.n2).abs()));
                first.record(moments.first.iter().fold(0.0_f64, |m, f| m.max(f.abs())));

                let report = analyze(&params)?;
                let eig = v.spectrum()?.eigenvalues;
                spectrum.record((eig[0] - report.e_down).abs().max((eig[3] - report.e_up).abs()));
                degeneracy.record((eig[1] - eig[0]).abs().max((eig[3] - eig[2]).abs()));
                uncertainty.record((-v.uncertainty_margin()?).max(0.0));

                let u2 = leading_u2_transform(&params)?;
                leading.record((u2.value - report.e_down).abs());

                let lt = leading_position_transform(&params)?;
                let psi = lt.psi.expect("heterodyne search yields a phase");
                offsets.push(OffsetRecord {
                    q,
                    abs_zeta: x,
                    arg_zeta: arg,
                    offset: heterodyne_phase_offset(&params, psi),
                    heterodyne_gap: lt.value - report.e_down,
                });
            }
        }
    }

    let checks = vec![
        variance.finish(),
        photons.finish(),
        first.finish(),
        tail.finish(),
        spectrum.finish(),
        degeneracy.finish(),
        uncertainty.finish(),
        leading.finish(),
    ];
    Ok(VerifySummary {
        points,
        checks,
        offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(q_list: Vec<u32>, start: f64, stop: f64, steps: usize) -> ScanSpec {
        ScanSpec {
            q_list,
            abs_zeta_start: start,
            abs_zeta_stop: stop,
            steps,
            arg_zeta: 0.0,
            phase_sweep: None,
            output_path: PathBuf::from("unused.csv"),
        }
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(-0.0), "0");
        assert_eq!(format_sig12(0.5), "0.5");
        assert_eq!(format_sig12(2.279_585_302_336_067_3), "2.27958530234");
        assert_eq!(format_sig12(0.1 + 0.2), "0.3");
        assert_eq!(format_sig12(-1234.5), "-1234.5");
        assert_eq!(format_sig12(1.0e-5 / 3.0), "0.00000333333333333");
    }

    #[test]
    fn scan_validation() {
        assert!(matches!(
            spec(vec![0], 0.0, 0.0, 1).validate(),
            Err(CliError::InvalidScan(_))
        ));
        assert!(spec(vec![0], 0.0, 1.0, 1).validate().is_err());
        assert!(spec(vec![0], 1.0, 1.0, 5).validate().is_err());
        assert!(spec(vec![0], -1.0, 1.0, 5).validate().is_err());
        assert!(spec(vec![], 0.0, 1.0, 5).validate().is_err());
        assert!(spec(vec![0], 0.0, 1.0, 2).validate().is_ok());
        assert_eq!(CliError::InvalidScan(String::new()).exit_code(), EXIT_DOMAIN);
    }

    #[test]
    fn scan_grid_endpoints_and_order() {
        let rows = scan_rows(&spec(vec![2, 0], 0.5, 1.5, 3)).unwrap();
        let keys: Vec<(u32, f64)> = rows.iter().map(|r| (r.q, r.abs_zeta)).collect();
        assert_eq!(keys, vec![(0, 0.5), (0, 1.0), (0, 1.5), (2, 0.5), (2, 1.0), (2, 1.5)]);
    }

    #[test]
    fn csv_layout() {
        let rows = scan_rows(&spec(vec![2], 0.0, 1.0, 2)).unwrap();
        let csv = render_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("0,0,2,2,0,0.5,2.5,false"));
        let last = lines.next().unwrap();
        assert!(last.ends_with(",true"), "{last}");
        assert_eq!(last.split(',').count(), 8);
    }

    #[test]
    fn analyze_records() {
        let r = cmd_analyze(0.0, 0.0, 2).unwrap();
        assert_eq!(r.e_down, 0.5);
        assert!(!r.squeezed);
        assert!(r.psi_star.is_none());
        assert!(r.self_check);

        let r = cmd_analyze(1.0, 1.0, 1).unwrap();
        assert!(r.self_check);
        assert!((r.numeric_e_down - r.e_down).abs() <= 1e-10);

        let err = cmd_analyze(0.0, 0.0, -1).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_DOMAIN);
        let err = cmd_analyze(5e3, 0.0, 0).unwrap_err();
        assert_eq!(err.exit_code(), EXIT_OVERFLOW);
    }

    #[test]
    fn verify_guards() {
        assert_eq!(cmd_verify(7, 1.0).unwrap_err().exit_code(), EXIT_DOMAIN);
        assert_eq!(cmd_verify(1, 6.0).unwrap_err().exit_code(), EXIT_DOMAIN);
        assert_eq!(cmd_verify(1, 0.0).unwrap_err().exit_code(), EXIT_DOMAIN);
    }

    #[test]
    fn verify_small_grid_passes() {
        let s = cmd_verify(0, 0.5).unwrap();
        assert!(s.passed(), "{}", s.render_text());
        assert_eq!(s.points, 2 * VERIFY_PHASES);
        let var = s.checks.iter().find(|c| c.name == "variance vs oracle").unwrap();
        assert!(var.max_deviation < 1e-8);
    }
}
