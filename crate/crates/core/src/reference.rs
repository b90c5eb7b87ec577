//! Finite-difference reference eigensolver for `H = -1/2 d^2/dx^2 + U`.
//!
//! The Hamiltonian is discretized on the interior points of a uniform mesh
//! over `[xi - L, xi + L]` with Dirichlet boundaries. With Richardson
//! extrapolation enabled, a second solve uses `2M + 1` interior points so the
//! spacing halves exactly.

use serde::{Deserialize, Serialize};

use crate::banded::SymmetricBand;
use crate::error::{Error, Result};
use crate::potential::Potential;

/// Amplitude above which a boundary value counts as not decayed.
pub const BOUNDARY_TOLERANCE: f64 = 1e-8;
pub const MIN_GRID_POINTS: usize = 64;
const POINTS_PER_WAVELENGTH: f64 = 40.0;
const AUTO_MIN_GRID_POINTS: usize = 257;
const DECAY_EXPONENT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    Second,
    Fourth,
}

impl Stencil {
    pub fn order(self) -> i32 {
        match self {
            Stencil::Second => 2,
            Stencil::Fourth => 4,
        }
    }
}

/// Solver configuration. `None` fields are filled in by [`auto_domain`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolver {
    pub half_width: Option<f64>,
    pub grid_points: Option<usize>,
    pub stencil: Stencil,
    pub richardson: bool,
}

impl Default for ReferenceSolver {
    fn default() -> Self {
        Self { half_width: None, grid_points: None, stencil: Stencil::Fourth, richardson: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub energies: Vec<f64>,
    /// `|E_fine - E_coarse| / (2^p - 1)` when extrapolating.
    pub error_estimates: Option<Vec<f64>>,
    pub xi: f64,
    pub half_width: f64,
    /// Interior point count of the base grid.
    pub grid_points: usize,
    pub stencil: Stencil,
    pub richardson: bool,
    /// Shifted coordinates `u = x - xi` of the grid carrying the eigenvectors.
    pub grid: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl ReferenceSolution {
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.grid.len() + 1) as f64
    }

    pub fn x_grid(&self) -> Vec<f64> {
        self.grid.iter().map(|u| u + self.xi).collect()
    }

    /// Trapezoid inner product; the boundary values are zero.
    pub fn inner(&self, i: usize, j: usize) -> f64 {
        let h = self.spacing();
        h * self.eigenvectors[i].iter().zip(&self.eigenvectors[j]).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `psi_n(x)` by 4-point Lagrange interpolation, zero outside the box.
    pub fn interpolate(&self, n: usize, x: f64) -> f64 {
        let psi = &self.eigenvectors[n];
        let h = self.spacing();
        let u = x - self.xi;
        if !(u.abs() < self.half_width) {
            return 0.0;
        }
        // node k (0..=M+1) sits at -L + k h, with zeros at k = 0 and M + 1
        let m = psi.len();
        let node = |k: isize| -> f64 {
            if k <= 0 || k as usize > m {
                0.0
            } else {
                psi[k as usize - 1]
            }
        };
        let t = (u + self.half_width) / h;
        let k = (t.floor() as isize).clamp(0, m as isize);
        let s = t - k as f64;
        let (p0, p1, p2, p3) = (node(k - 1), node(k), node(k + 1), node(k + 2));
        // Lagrange basis on nodes -1, 0, 1, 2
        -s * (s - 1.0) * (s - 2.0) / 6.0 * p0 + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * p1
            - (s + 1.0) * s * (s - 2.0) / 2.0 * p2
            + (s + 1.0) * s * (s - 1.0) / 6.0 * p3
    }

    /// `|<psi'^2> - <u U' psi^2>|` relative to the larger term, with the
    /// derivative from fourth-order central differences.
    pub fn virial_residual(&self, n: usize, p: &Potential) -> f64 {
        let psi = &self.eigenvectors[n];
        let m = psi.len();
        let h = self.spacing();
        let at = |k: isize| -> f64 {
            if k < 0 || k as usize >= m {
                0.0
            } else {
                psi[k as usize]
            }
        };
        let mut kinetic = 0.0;
        let mut force = 0.0;
        for (i, &u) in self.grid.iter().enumerate() {
            let k = i as isize;
            let d = (at(k - 2) - 8.0 * at(k - 1) + 8.0 * at(k + 1) - at(k + 2)) / (12.0 * h);
            kinetic += d * d;
            force += p.radial_force(u) * psi[i] * psi[i];
        }
        (kinetic - force).abs() * h / (kinetic.abs().max(force.abs()) * h).max(f64::MIN_POSITIVE)
    }
}

/// Heuristic box half-width and interior point count for the lowest
/// `nmax + 1` states.
pub fn auto_domain(p: &Potential, nmax: usize) -> Result<(f64, usize)> {
    let level = nmax as f64 + 0.5;
    let mut omega = p.omega();
    if !(omega > 0.0) {
        omega = 1.0;
    }
    let mut e = omega * level;
    // local harmonic frequency at the turning point, iterated to a fixed point
    for _ in 0..40 {
        let ut = p.turning_point(e)?;
        if !(ut > 0.0) {
            break;
        }
        let w = (p.radial_force(ut).max(0.0)).sqrt() / ut;
        let next = w.max(p.omega()) * level;
        if (next - e).abs() <= 1e-6 * e {
            e = next;
            break;
        }
        e = next;
    }
    let target = 3.0 * e;
    let mut half_width = 2.0 * p.turning_point(target)?;
    // widen until the WKB decay exponent past the turning point clears the
    // boundary tolerance with room to spare
    let ut = p.turning_point(e)?;
    let step = (half_width - ut).max(1e-3) / 256.0;
    let mut u = ut;
    let mut exponent = 0.0;
    while exponent < DECAY_EXPONENT || u < half_width {
        let mid = u + 0.5 * step;
        exponent += step * (2.0 * (p.shifted(mid) - e)).max(0.0).sqrt();
        u += step;
    }
    half_width = u.max(half_width);
    let wavelength = 2.0 * std::f64::consts::PI / (2.0 * target).sqrt();
    let h = wavelength / POINTS_PER_WAVELENGTH;
    let mut m = (2.0 * half_width / h).ceil() as usize;
    m = m.max(AUTO_MIN_GRID_POINTS);
    if m.is_multiple_of(2) {
        m += 1;
    }
    Ok((half_width, m))
}

fn hamiltonian(p: &Potential, half_width: f64, m: usize, stencil: Stencil) -> Result<(SymmetricBand, Vec<f64>)> {
    let h = 2.0 * half_width / (m + 1) as f64;
    let grid: Vec<f64> = (1..=m).map(|i| -half_width + i as f64 * h).collect();
    let h2 = h * h;
    let potential: Vec<f64> = grid.iter().map(|&u| p.shifted(u)).collect();
    let bands = match stencil {
        Stencil::Second => vec![potential.iter().map(|v| 1.0 / h2 + v).collect(), vec![-0.5 / h2; m - 1]],
        Stencil::Fourth => vec![
            potential.iter().map(|v| 1.25 / h2 + v).collect(),
            vec![-16.0 / (24.0 * h2); m - 1],
            vec![1.0 / (24.0 * h2); m.saturating_sub(2)],
        ],
    };
    Ok((SymmetricBand::new(bands)?, grid))
}

struct Level {
    energies: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    grid: Vec<f64>,
}

fn solve_grid(p: &Potential, nmax: usize, half_width: f64, m: usize, stencil: Stencil) -> Result<Level> {
    let (a, grid) = hamiltonian(p, half_width, m, stencil)?;
    let h = 2.0 * half_width / (m + 1) as f64;
    let mut energies = Vec::with_capacity(nmax + 1);
    let mut vectors = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        let e = a.eigenvalue(n)?;
        if let Some(&prev) = energies.last() {
            if !(e > prev) {
                return Err(Error::NumericalBreakdown {
                    n,
                    reason: format!("reference levels not strictly increasing: {prev} then {e}"),
                });
            }
        }
        let mut v = a.eigenvector(e)?;
        let norm = (h * v.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        // outermost right lobe positive
        let sign = v.iter().rev().find(|x| x.abs() > 1e-3 * peak).map_or(1.0, |x| x.signum());
        v.iter_mut().for_each(|x| *x *= sign / norm);
        let boundary = v[0].abs().max(v[m - 1].abs());
        if boundary > BOUNDARY_TOLERANCE {
            return Err(Error::DomainTooSmall {
                level: n,
                boundary_amplitude: boundary,
                suggested_half_width: 1.5 * half_width,
            });
        }
        energies.push(e);
        vectors.push(v);
    }
    Ok(Level { energies, vectors, grid })
}

/// Lowest `nmax + 1` eigenpairs of `p`.
pub fn solve(p: &Potential, nmax: usize, cfg: &ReferenceSolver) -> Result<ReferenceSolution> {
    let (auto_l, auto_m) =
        if cfg.half_width.is_none() || cfg.grid_points.is_none() { auto_domain(p, nmax)? } else { (0.0, 0) };
    let half_width = cfg.half_width.unwrap_or(auto_l);
    let m = cfg.grid_points.unwrap_or(auto_m);
    if !(half_width > 0.0) || !half_width.is_finite() {
        return Err(Error::InvalidArgument(format!("domain half-width must be positive, got {half_width}")));
    }
    if m < MIN_GRID_POINTS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_GRID_POINTS} grid points, got {m}")));
    }
    if nmax + 1 > m {
        return Err(Error::InvalidArgument(format!("{} levels requested on {m} grid points", nmax + 1)));
    }
    let coarse = solve_grid(p, nmax, half_width, m, cfg.stencil)?;
    let (energies, error_estimates, finest) = if cfg.richardson {
        let fine = solve_grid(p, nmax, half_width, 2 * m + 1, cfg.stencil)?;
        let factor = 2f64.powi(cfg.stencil.order());
        let mut energies = Vec::with_capacity(nmax + 1);
        let mut errors = Vec::with_capacity(nmax + 1);
        for (ec, ef) in coarse.energies.iter().zip(&fine.energies) {
            energies.push((factor * ef - ec) / (factor - 1.0));
            errors.push((ef - ec).abs() / (factor - 1.0));
        }
        (energies, Some(errors), fine)
    } else {
        (coarse.energies.clone(), None, coarse)
    };
    Ok(ReferenceSolution {
        energies,
        error_estimates,
        xi: p.xi(),
        half_width,
        grid_points: m,
        stencil: cfg.stencil,
        richardson: cfg.richardson,
        grid: finest.grid,
        eigenvectors: finest.vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed(l: f64, m: usize, stencil: Stencil, richardson: bool) -> ReferenceSolver {
        ReferenceSolver { half_width: Some(l), grid_points: Some(m), stencil, richardson }
    }

    #[test]
    fn harmonic_spectrum() {
        let p = Potential::harmonic(1.0, 0.0).unwrap();
        let sol = solve(&p, 5, &ReferenceSolver::default()).unwrap();
        for (n, e) in sol.energies.iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-8, "n={n}: {e}");
        }
    }

    #[test]
    fn anharmonic_table_values() {
        let p = Potential::quartic_anharmonic(1.0, 1.0, 4.0).unwrap();
        let sol = solve(&p, 0, &ReferenceSolver::default()).unwrap();
        assert!((sol.energies[0] - 0.80377065).abs() < 1e-7, "{}", sol.energies[0]);
        let p = Potential::quartic_anharmonic(1.0, 5.0, 4.0).unwrap();
        let sol = solve(&p, 5, &ReferenceSolver::default()).unwrap();
        assert!((sol.energies[5] - 23.36454046).abs() < 1e-6, "{}", sol.energies[5]);
    }

    #[test]
    fn convergence_order_matches_stencil() {
        let p = Potential::harmonic(1.0, 0.0).unwrap();
        for stencil in [Stencil::Second, Stencil::Fourth] {
            let e1 = solve(&p, 2, &fixed(10.0, 199, stencil, false)).unwrap().energies[2];
            let e2 = solve(&p, 2, &fixed(10.0, 399, stencil, false)).unwrap().energies[2];
            let ratio = (e1 - 2.5).abs() / (e2 - 2.5).abs();
            let expected = 2f64.powi(stencil.order());
            assert!((ratio / expected - 1.0).abs() < 0.2, "{stencil:?}: ratio {ratio}");
        }
    }

    #[test]
    fn eigenvectors_orthonormal_and_parity() {
        let p = Potential::quartic_anharmonic(1.0, 0.5, 0.0).unwrap();
        let sol = solve(&p, 5, &ReferenceSolver::default()).unwrap();
        for i in 0..=5 {
            for j in 0..=5 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((sol.inner(i, j) - target).abs() < 1e-8, "({i},{j}) {}", sol.inner(i, j));
            }
            let psi = &sol.eigenvectors[i];
            let parity = if i % 2 == 0 { 1.0 } else { -1.0 };
            let m = psi.len();
            let asym = (0..m).map(|k| (psi[k] - parity * psi[m - 1 - k]).abs()).fold(0.0, f64::max);
            assert!(asym < 1e-8, "n={i}: parity defect {asym}");
            assert!(sol.virial_residual(i, &p) < 1e-5);
        }
    }

    #[test]
    fn sign_convention_outer_right_lobe_positive() {
        let p = Potential::harmonic(1.0, 0.0).unwrap();
        let sol = solve(&p, 4, &ReferenceSolver::default()).unwrap();
        for n in 0..=4 {
            assert!(sol.interpolate(n, 2.5) > 0.0, "n={n}");
        }
    }

    #[test]
    fn interpolation_reproduces_ground_state() {
        let p = Potential::harmonic(1.0, 2.0).unwrap();
        let sol = solve(&p, 0, &ReferenceSolver::default()).unwrap();
        let pi: f64 = std::f64::consts::PI;
        for x in [2.0, 2.37, 0.9, 3.51] {
            let exact = pi.powf(-0.25) * (-0.5 * (x - 2.0f64).powi(2)).exp();
            assert!((sol.interpolate(0, x) - exact).abs() < 1e-6, "x={x}");
        }
        assert_eq!(sol.interpolate(0, 2.0 + sol.half_width + 1.0), 0.0);
    }

    #[test]
    fn auto_domain_heuristics() {
        let ho = Potential::harmonic(1.0, 0.0).unwrap();
        let (l_ho, m_ho) = auto_domain(&ho, 5).unwrap();
        assert!(l_ho >= 8.0);
        assert!(m_ho >= MIN_GRID_POINTS && m_ho % 2 == 1);
        let aho = Potential::quartic_anharmonic(1.0, 5.0, 0.0).unwrap();
        let (l_aho, _) = auto_domain(&aho, 5).unwrap();
        assert!(l_aho < l_ho);
        let pure_quartic = Potential::even_polynomial(vec![0.0, 1.0], 0.0).unwrap();
        let (l, m) = auto_domain(&pure_quartic, 3).unwrap();
        assert!(l.is_finite() && l > 0.0 && m >= MIN_GRID_POINTS);
    }

    #[test]
    fn small_box_is_reported() {
        let p = Potential::harmonic(1.0, 0.0).unwrap();
        match solve(&p, 5, &fixed(3.0, 301, Stencil::Fourth, true)) {
            Err(Error::DomainTooSmall { suggested_half_width, .. }) => assert!(suggested_half_width > 3.0),
            other => panic!("expected DomainTooSmall, got {other:?}"),
        }
    }

    #[test]
    fn rejects_coarse_grid() {
        let p = Potential::harmonic(1.0, 0.0).unwrap();
        assert!(matches!(solve(&p, 1, &fixed(8.0, 10, Stencil::Fourth, true)), Err(Error::InvalidArgument(_))));
    }
}
