//! Ansatz states `chi_n = phi_n chi_v`, their energies, and comparison
//! reports against the reference solver.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orthopoly::OrthoBasis;
use crate::potential::{Potential, PotentialSpec};
use crate::quadrature::QuadratureSpec;
use crate::reference::{self, ReferenceSolution, ReferenceSolver, Stencil};
use crate::weight::VirialWeight;

/// `chi_n(x) = phi_n(x - xi) chi_v(x - xi)`.
pub fn ansatz_eval(b: &OrthoBasis, n: usize, x: f64) -> Result<f64> {
    ansatz_shifted(b, n, x - b.weight().potential().xi())
}

/// `chi_n` in the shifted frame.
pub fn ansatz_shifted(b: &OrthoBasis, n: usize, u: f64) -> Result<f64> {
    Ok(b.eval(n, u)? * b.weight().chi_v(u))
}

/// `chi_n'(u) = (phi_n' - phi_n g') chi_v`.
pub fn ansatz_derivative(b: &OrthoBasis, n: usize, u: f64) -> Result<f64> {
    let (phi, dphi, _) = b.eval_with_derivatives(n, u)?;
    let w = b.weight();
    Ok((dphi - phi * w.g().derivative(u)) * w.chi_v(u))
}

fn check_index(b: &OrthoBasis, n: usize) -> Result<()> {
    if n > b.nmax() {
        return Err(Error::InvalidArgument(format!("state {n} exceeds basis degree {}", b.nmax())));
    }
    Ok(())
}

/// `int (phi_n' - phi_n g')^2 sigma_v`, which is `int (chi_n')^2`.
fn kinetic_form(b: &OrthoBasis, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    let w = b.weight();
    w.expectation(
        |u| {
            let (phi, dphi, _) = b.eval_with_derivatives(n, u).unwrap_or((0.0, 0.0, 0.0));
            let d = dphi - phi * w.g().derivative(u);
            d * d
        },
        spec,
    )
}

fn phi_squared_expectation<F>(b: &OrthoBasis, n: usize, f: F, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    b.weight().expectation(
        |u| {
            let phi = b.eval(n, u).unwrap_or(0.0);
            phi * phi * f(u)
        },
        spec,
    )
}

/// `<chi_n| -1/2 d^2 + U |chi_n>` in the integrated-by-parts form.
pub fn energy_hamiltonian(b: &OrthoBasis, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_index(b, n)?;
    let p = b.weight().potential();
    let kinetic = kinetic_form(b, n, spec)?;
    let potential = phi_squared_expectation(b, n, |u| p.shifted(u), spec)?;
    Ok(0.5 * kinetic + potential)
}

/// `<chi_n| u U'/2 + U |chi_n>`; the canonical ansatz energy.
pub fn energy_virial(b: &OrthoBasis, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_index(b, n)?;
    let p = b.weight().potential();
    phi_squared_expectation(b, n, |u| 0.5 * p.radial_force(u) + p.shifted(u), spec)
}

/// `|int (chi_n')^2 - <u U'>| / max(|<u U'>|, 1)`.
pub fn virial_check(b: &OrthoBasis, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_index(b, n)?;
    let p = b.weight().potential();
    let kinetic = kinetic_form(b, n, spec)?;
    let force = phi_squared_expectation(b, n, |u| p.radial_force(u), spec)?;
    Ok((kinetic - force).abs() / force.abs().max(1.0))
}

/// `<chi_i|chi_j>`.
pub fn ansatz_overlap(b: &OrthoBasis, i: usize, j: usize, spec: &QuadratureSpec) -> Result<f64> {
    check_index(b, i)?;
    check_index(b, j)?;
    if (i + j) % 2 == 1 {
        return Ok(0.0);
    }
    b.weight().expectation(|u| b.eval(i, u).unwrap_or(0.0) * b.eval(j, u).unwrap_or(0.0), spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzState {
    pub n: usize,
    pub energy_ansatz: f64,
    pub virial_residual: f64,
    /// `|<chi_n|chi_n> - 1|`
    pub norm_check: f64,
}

impl AnsatzState {
    pub fn compute(b: &OrthoBasis, n: usize, spec: &QuadratureSpec) -> Result<Self> {
        Ok(Self {
            n,
            energy_ansatz: energy_virial(b, n, spec)?,
            virial_residual: virial_check(b, n, spec)?,
            norm_check: (ansatz_overlap(b, n, n, spec)? - 1.0).abs(),
        })
    }
}

/// Basis of degree `nmax` for `p` built with the recurrence.
pub fn build_basis(p: &Potential, nmax: usize, spec: &QuadratureSpec) -> Result<OrthoBasis> {
    let weight = Arc::new(VirialWeight::for_potential(p, spec)?);
    OrthoBasis::build(weight, nmax, spec)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub e_ref: f64,
    pub e_ans: f64,
    pub delta: f64,
    pub epsilon_pct: f64,
}

impl ReportRow {
    pub fn new(n: usize, e_ref: f64, e_ans: f64) -> Self {
        let delta = e_ans - e_ref;
        Self { n, e_ref, e_ans, delta, epsilon_pct: 100.0 * delta / e_ref }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub stencil: Stencil,
    pub richardson: bool,
    pub half_width: f64,
    pub grid_points: usize,
    pub error_estimates: Option<Vec<f64>>,
}

impl From<&ReferenceSolution> for SolverInfo {
    fn from(s: &ReferenceSolution) -> Self {
        Self {
            stencil: s.stencil,
            richardson: s.richardson,
            half_width: s.half_width,
            grid_points: s.grid_points,
            error_estimates: s.error_estimates.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub potential: PotentialSpec,
    pub quadrature: QuadratureSpec,
    pub solver: SolverInfo,
    /// Exponent `k` of the leading `u^(2k)` term at the minimum.
    pub leading_order: usize,
    pub rows: Vec<ReportRow>,
}

/// Fixed-point rendering that never prints a negative zero.
pub fn format_fixed(v: f64, decimals: usize) -> String {
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

impl SpectrumReport {
    pub const CSV_HEADER: &'static str = "n,E_ref,E_ans,delta,epsilon_pct";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.n,
                format_fixed(r.e_ref, 8),
                format_fixed(r.e_ans, 8),
                format_fixed(r.delta, 8),
                format_fixed(r.epsilon_pct, 2)
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidArgument(format!("serialization failed: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("bad report JSON: {e}")))
    }

    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        let p = Potential::try_from(self.potential.clone()).map(|p| p.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{p}");
        let _ = writeln!(
            out,
            "reference: {:?} stencil, L = {:.4}, M = {}, richardson = {}",
            self.solver.stencil, self.solver.half_width, self.solver.grid_points, self.solver.richardson
        );
        let _ = writeln!(out, "{:>3} {:>14} {:>14} {:>12} {:>8}", "n", "E_ref", "E_ans", "delta", "eps%");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>3} {:>14} {:>14} {:>12} {:>8}",
                r.n,
                format_fixed(r.e_ref, 8),
                format_fixed(r.e_ans, 8),
                format_fixed(r.delta, 8),
                format_fixed(r.epsilon_pct, 2)
            );
        }
        out
    }
}

/// Ansatz and reference energies side by side for `n = 0..=nmax`.
pub fn build_report(
    p: &Potential,
    nmax: usize,
    solver: &ReferenceSolver,
    spec: &QuadratureSpec,
) -> Result<SpectrumReport> {
    let basis = build_basis(p, nmax, spec)?;
    let reference = reference::solve(p, nmax, solver)?;
    report_from_parts(&basis, &reference, spec)
}

pub fn report_from_parts(
    basis: &OrthoBasis,
    reference: &ReferenceSolution,
    spec: &QuadratureSpec,
) -> Result<SpectrumReport> {
    let p = basis.weight().potential();
    let nmax = basis.nmax().min(reference.energies.len() - 1);
    let rows = (0..=nmax)
        .map(|n| Ok(ReportRow::new(n, reference.energies[n], energy_virial(basis, n, spec)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumReport {
        potential: p.spec(),
        quadrature: *spec,
        solver: SolverInfo::from(reference),
        leading_order: p.leading_order()?.k,
        rows,
    })
}

/// Ansatz and reference eigenfunctions sampled on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub x: Vec<f64>,
    pub chi: Vec<Vec<f64>>,
    pub psi_ref: Vec<Vec<f64>>,
}

impl CurveTable {
    pub fn sample(
        basis: &OrthoBasis,
        reference: &ReferenceSolution,
        xmin: f64,
        xmax: f64,
        points: usize,
    ) -> Result<Self> {
        if !(xmin < xmax) || !xmin.is_finite() || !xmax.is_finite() {
            return Err(Error::InvalidArgument(format!("need finite xmin < xmax, got [{xmin}, {xmax}]")));
        }
        if points < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 points, got {points}")));
        }
        let nmax = basis.nmax().min(reference.eigenvectors.len() - 1);
        let step = (xmax - xmin) / (points - 1) as f64;
        let x: Vec<f64> = (0..points).map(|i| if i + 1 == points { xmax } else { xmin + i as f64 * step }).collect();
        let chi = (0..=nmax)
            .map(|n| x.iter().map(|&xv| ansatz_eval(basis, n, xv)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let psi_ref = (0..=nmax).map(|n| x.iter().map(|&xv| reference.interpolate(n, xv)).collect()).collect();
        Ok(Self { x, chi, psi_ref })
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["x".to_string()];
        cols.extend((0..self.chi.len()).map(|n| format!("chi_{n}")));
        cols.extend((0..self.psi_ref.len()).map(|n| format!("psi_ref_{n}")));
        cols.join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for (i, x) in self.x.iter().enumerate() {
            out.push_str(&format_fixed(*x, 10));
            for col in self.chi.iter().chain(&self.psi_ref) {
                let _ = write!(out, ",{:.12e}", col[i]);
            }
            out.push('\n');
        }
        out
    }
}

/// `sqrt(int (chi_n - psi_n)^2)` by the trapezoid rule on the reference grid.
pub fn l2_discrepancy(basis: &OrthoBasis, reference: &ReferenceSolution, n: usize) -> Result<f64> {
    let h = reference.spacing();
    let mut sum = 0.0;
    for (u, psi) in reference.grid.iter().zip(&reference.eigenvectors[n]) {
        let d = ansatz_shifted(basis, n, *u)? - psi;
        sum += d * d;
    }
    Ok((h * sum).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn aho(lambda: f64, xi: f64) -> Potential {
        Potential::quartic_anharmonic(1.0, lambda, xi).unwrap()
    }

    #[test]
    fn ground_state_is_chi_v() {
        let b = build_basis(&aho(1.0, 4.0), 3, &spec()).unwrap();
        for x in [2.0, 3.7, 4.0, 5.5] {
            let chi_v = b.weight().chi_v(x - 4.0);
            assert!((ansatz_eval(&b, 0, x).unwrap() - chi_v).abs() < 1e-15);
        }
    }

    #[test]
    fn harmonic_first_excited_state() {
        let b = build_basis(&Potential::harmonic(1.0, 0.0).unwrap(), 2, &spec()).unwrap();
        let expected = 2f64.sqrt() * std::f64::consts::PI.powf(-0.25) * (-0.5f64).exp();
        assert!((ansatz_eval(&b, 1, 1.0).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.644).abs() < 1e-3);
        for u in [0.3, 1.1, 2.9] {
            let a = ansatz_shifted(&b, 2, u).unwrap();
            assert!((a - ansatz_shifted(&b, 2, -u).unwrap()).abs() < 1e-14);
        }
        assert!(matches!(ansatz_eval(&b, 3, 0.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn harmonic_energies_exact() {
        let b = build_basis(&Potential::harmonic(1.0, 0.0).unwrap(), 3, &spec()).unwrap();
        assert!((energy_hamiltonian(&b, 0, &spec()).unwrap() - 0.5).abs() < 1e-10);
        assert!((energy_hamiltonian(&b, 3, &spec()).unwrap() - 3.5).abs() < 1e-10);
        assert!((energy_virial(&b, 1, &spec()).unwrap() - 1.5).abs() < 1e-10);
        assert!(virial_check(&b, 0, &spec()).unwrap() < 1e-10);
    }

    #[test]
    fn anharmonic_energies() {
        let b = build_basis(&aho(1.0, 0.0), 0, &spec()).unwrap();
        assert!((energy_hamiltonian(&b, 0, &spec()).unwrap() - 0.813638912074).abs() < 1e-10);
        let b = build_basis(&aho(0.05, 0.0), 0, &spec()).unwrap();
        assert!((energy_virial(&b, 0, &spec()).unwrap() - 0.533053744167).abs() < 1e-10);
        let b = build_basis(&aho(5.0, 0.0), 5, &spec()).unwrap();
        assert!((energy_virial(&b, 5, &spec()).unwrap() - 23.7157656769).abs() < 1e-8);
        assert!(virial_check(&b, 5, &spec()).unwrap() <= 1e-8);
        let b = build_basis(&aho(0.25, 0.0), 2, &spec()).unwrap();
        assert!(virial_check(&b, 2, &spec()).unwrap() <= 1e-8);
    }

    #[test]
    fn state_diagnostics() {
        let b = build_basis(&aho(2.5, 0.0), 4, &spec()).unwrap();
        for n in 0..=4 {
            let s = AnsatzState::compute(&b, n, &spec()).unwrap();
            assert!(s.norm_check < 1e-9);
            assert!(s.virial_residual < 1e-8);
        }
        assert!(ansatz_overlap(&b, 1, 3, &spec()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn report_rows_follow_definitions() {
        let r = ReportRow::new(0, 1.00917032, 1.02710883);
        assert!((r.delta - 0.01793851).abs() < 1e-12);
        assert_eq!(format_fixed(r.epsilon_pct, 2), "1.78");
        assert_eq!(format_fixed(-1e-12, 8), "0.00000000");
        assert_eq!(format_fixed(-0.5, 2), "-0.50");
    }

    #[test]
    fn harmonic_report_and_csv() {
        let p = Potential::harmonic(1.0, 0.0).unwrap();
        let report = build_report(&p, 3, &ReferenceSolver::default(), &spec()).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows.iter().all(|r| r.delta.abs() <= 1e-8));
        let csv = report.to_csv();
        assert!(csv.starts_with("n,E_ref,E_ans,delta,epsilon_pct\n0,0.50000000,0.50000000,0.00000000,0.00\n"));
        let back = SpectrumReport::from_json(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn curves_layout() {
        let p = aho(5.0, 4.0);
        let basis = build_basis(&p, 2, &spec()).unwrap();
        let reference = reference::solve(&p, 2, &ReferenceSolver::default()).unwrap();
        let c = CurveTable::sample(&basis, &reference, 2.0, 6.0, 2).unwrap();
        assert_eq!(c.header(), "x,chi_0,chi_1,chi_2,psi_ref_0,psi_ref_1,psi_ref_2");
        assert_eq!(c.to_csv().lines().count(), 3);
        assert!(CurveTable::sample(&basis, &reference, 2.0, 6.0, 1).is_err());
        assert!(CurveTable::sample(&basis, &reference, 6.0, 2.0, 5).is_err());
    }
}
