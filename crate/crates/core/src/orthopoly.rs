//! Orthonormal polynomials under the virial weight.
//!
//! The production path is the three-term recurrence
//!
//! ```text
//! phi_0 = 1
//! phi_1 = <u^2>^(-1/2) u
//! phi_n = beta_n [u phi_(n-1) - <u phi_(n-1) phi_(n-2)> phi_(n-2)]
//! beta_n = [<u^2 phi_(n-1)^2> - <u phi_(n-1) phi_(n-2)>^2]^(-1/2)
//! ```
//!
//! with `<f> = int f sigma_v du` evaluated by quadrature. Explicit
//! Gram-Schmidt on the monomials is kept as an independent cross-check.
//!
//! Because `sigma_v` is even, `phi_n` has parity `(-1)^n`; every inner product
//! whose integrand is odd is set to zero without integrating. Beyond
//! `n = 16` double precision no longer preserves orthogonality, so larger
//! bases are refused.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureSpec;
use crate::weight::VirialWeight;

pub const MAX_DEGREE: usize = 16;

/// Recurrence data for `phi_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceStep {
    pub n: usize,
    pub beta: f64,
    /// `<u phi_(n-1) phi_(n-2)>`
    pub offdiag: f64,
    /// `<u phi_(n-1)^2>`, zero for an even weight; kept to check that.
    pub diag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Recurrence,
    GramSchmidt,
}

/// One row of the `--dump-basis` JSON array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDumpEntry {
    pub n: usize,
    pub beta_n: f64,
    pub offdiag: f64,
    pub alpha: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct OrthoBasis {
    steps: Vec<RecurrenceStep>,
    /// `monomial[n][j]` is the coefficient of `u^j` in `phi_n`.
    monomial: Vec<Vec<f64>>,
    weight: Arc<VirialWeight>,
    construction: Construction,
}

fn check_nmax(nmax: usize) -> Result<()> {
    if nmax > MAX_DEGREE {
        return Err(Error::InvalidArgument(format!("nmax = {nmax} exceeds the supported maximum {MAX_DEGREE}")));
    }
    Ok(())
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}

/// `<u^n>` under `sigma_v`; odd moments are exactly zero.
pub fn moment(w: &VirialWeight, n: usize, spec: &QuadratureSpec) -> Result<f64> {
    if n % 2 == 1 {
        return Ok(0.0);
    }
    if n == 0 {
        return w.expectation(|_| 1.0, spec);
    }
    w.expectation(|u| u.powi(n as i32), spec)
}

impl OrthoBasis {
    /// Builds `phi_0 ..= phi_nmax` by the three-term recurrence.
    pub fn build(weight: Arc<VirialWeight>, nmax: usize, spec: &QuadratureSpec) -> Result<Self> {
        check_nmax(nmax)?;
        let mut basis = Self {
            steps: vec![RecurrenceStep { n: 0, beta: 1.0, offdiag: 0.0, diag: 0.0 }],
            monomial: vec![vec![1.0]],
            weight,
            construction: Construction::Recurrence,
        };
        for n in 1..=nmax {
            let m = n - 1;
            let diag = basis.weight.expectation(
                |u| {
                    let p = basis.eval_recurrence(m, u);
                    u * p * p
                },
                spec,
            )?;
            let scale = basis.weight.expectation(
                |u| {
                    let p = basis.eval_recurrence(m, u);
                    u * u * p * p
                },
                spec,
            )?;
            if diag.abs() > 1e-10 * scale.sqrt() {
                return Err(Error::NumericalBreakdown {
                    n,
                    reason: format!("diagonal term <u phi_{m}^2> = {diag:e} does not vanish"),
                });
            }
            let offdiag = if n >= 2 {
                basis.weight.expectation(
                    |u| {
                        let (a, b) = basis.eval_pair(m, u);
                        u * a * b
                    },
                    spec,
                )?
            } else {
                0.0
            };
            let radicand = scale - offdiag * offdiag;
            if !(radicand > 0.0) {
                return Err(Error::NumericalBreakdown {
                    n,
                    reason: format!("beta radicand {radicand:e} is not positive"),
                });
            }
            let beta = radicand.powf(-0.5);

            let mut coeffs = vec![0.0; n + 1];
            for (j, &c) in basis.monomial[n - 1].iter().enumerate() {
                coeffs[j + 1] += beta * c;
            }
            if n >= 2 {
                for (j, &c) in basis.monomial[n - 2].iter().enumerate() {
                    coeffs[j] -= beta * offdiag * c;
                }
            }
            basis.steps.push(RecurrenceStep { n, beta, offdiag, diag });
            basis.monomial.push(coeffs);
        }
        Ok(basis)
    }

    /// Explicit Gram-Schmidt on `1, u, u^2, ...`:
    /// `phi_n = a_n [u^n - sum_k (u^n, phi_k) phi_k]`.
    ///
    /// The recurrence data reported for this basis is read back from the
    /// monomial coefficients.
    pub fn gram_schmidt(weight: Arc<VirialWeight>, nmax: usize, spec: &QuadratureSpec) -> Result<Self> {
        check_nmax(nmax)?;
        let mut monomial: Vec<Vec<f64>> = vec![vec![1.0]];
        for n in 1..=nmax {
            let mut v = vec![0.0; n + 1];
            v[n] = 1.0;
            for (k, phi_k) in monomial.iter().enumerate() {
                if (n + k) % 2 == 1 {
                    continue;
                }
                let proj = weight.expectation(|u| u.powi(n as i32) * horner(phi_k, u), spec)?;
                for (j, &c) in phi_k.iter().enumerate() {
                    v[j] -= proj * c;
                }
            }
            let norm2 = weight.expectation(
                |u| {
                    let p = horner(&v, u);
                    p * p
                },
                spec,
            )?;
            if !(norm2 > 0.0) {
                return Err(Error::NumericalBreakdown {
                    n,
                    reason: format!("Gram-Schmidt residual norm^2 {norm2:e} is not positive"),
                });
            }
            let a = norm2.powf(-0.5);
            monomial.push(v.into_iter().map(|c| a * c).collect());
        }

        let mut steps = vec![RecurrenceStep { n: 0, beta: 1.0, offdiag: 0.0, diag: 0.0 }];
        for n in 1..=nmax {
            let beta = monomial[n][n] / monomial[n - 1][n - 1];
            // match the u^(n-2) coefficients of phi_n = beta (u phi_(n-1) - c phi_(n-2))
            let offdiag = if n >= 2 {
                let shifted = if n >= 3 { monomial[n - 1][n - 3] } else { 0.0 };
                (shifted - monomial[n][n - 2] / beta) / monomial[n - 2][n - 2]
            } else {
                0.0
            };
            steps.push(RecurrenceStep { n, beta, offdiag, diag: 0.0 });
        }
        Ok(Self { steps, monomial, weight, construction: Construction::GramSchmidt })
    }

    pub fn nmax(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn weight(&self) -> &VirialWeight {
        &self.weight
    }

    pub fn weight_arc(&self) -> &Arc<VirialWeight> {
        &self.weight
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn steps(&self) -> &[RecurrenceStep] {
        &self.steps
    }

    /// Coefficients `alpha_(n0) ..= alpha_(nn)` of `phi_n` in powers of `u`.
    pub fn monomial_coeffs(&self, n: usize) -> Result<&[f64]> {
        self.check_index(n)?;
        Ok(&self.monomial[n])
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.nmax() {
            return Err(Error::InvalidArgument(format!("n = {n} exceeds basis nmax = {}", self.nmax())));
        }
        Ok(())
    }

    /// `(phi_m(u), phi_(m-1)(u))`, with `phi_(-1) = 0`.
    fn eval_pair(&self, m: usize, u: f64) -> (f64, f64) {
        let (mut cur, mut prev) = (1.0, 0.0);
        for step in &self.steps[1..=m] {
            let next = step.beta * (u * cur - step.offdiag * prev);
            prev = cur;
            cur = next;
        }
        (cur, prev)
    }

    fn eval_recurrence(&self, n: usize, u: f64) -> f64 {
        self.eval_pair(n, u).0
    }

    /// `phi_n(u)` by the recurrence.
    pub fn eval(&self, n: usize, u: f64) -> Result<f64> {
        self.check_index(n)?;
        Ok(self.eval_recurrence(n, u))
    }

    /// `phi_n(u)` by Horner on the monomial coefficients.
    pub fn eval_monomial(&self, n: usize, u: f64) -> Result<f64> {
        self.check_index(n)?;
        Ok(horner(&self.monomial[n], u))
    }

    /// `(phi_n, phi_n', phi_n'')` at `u`, differentiating the recurrence.
    pub fn eval_with_derivatives(&self, n: usize, u: f64) -> Result<(f64, f64, f64)> {
        self.check_index(n)?;
        let mut cur = (1.0, 0.0, 0.0);
        let mut prev = (0.0, 0.0, 0.0);
        for step in &self.steps[1..=n] {
            let (b, c) = (step.beta, step.offdiag);
            let next = (
                b * (u * cur.0 - c * prev.0),
                b * (cur.0 + u * cur.1 - c * prev.1),
                b * (2.0 * cur.1 + u * cur.2 - c * prev.2),
            );
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// `phi_n''(u)` from exact differentiation of the monomial coefficients.
    pub fn second_derivative_monomial(&self, n: usize, u: f64) -> Result<f64> {
        self.check_index(n)?;
        let d2: Vec<f64> =
            self.monomial[n].iter().enumerate().skip(2).map(|(j, &c)| (j * (j - 1)) as f64 * c).collect();
        Ok(horner(&d2, u))
    }

    /// `G_ij = (phi_i, phi_j)` for `i, j <= nmax`, every entry by quadrature.
    pub fn gram_matrix(&self, spec: &QuadratureSpec) -> Result<Vec<Vec<f64>>> {
        let size = self.nmax() + 1;
        let mut g = vec![vec![0.0; size]; size];
        for i in 0..size {
            for j in i..size {
                let v = self.weight.expectation(|u| self.eval_recurrence(i, u) * self.eval_recurrence(j, u), spec)?;
                g[i][j] = v;
                g[j][i] = v;
            }
        }
        Ok(g)
    }

    /// `(phi_n, phi_n'')` under `sigma_v`. Zero for a true orthogonal family,
    /// since `phi_n''` has degree `n - 2`.
    pub fn virial_condition_residual(&self, n: usize, spec: &QuadratureSpec) -> Result<f64> {
        self.check_index(n)?;
        if n < 2 {
            return Ok(0.0);
        }
        let coeffs = &self.monomial[n];
        let d2: Vec<f64> = coeffs.iter().enumerate().skip(2).map(|(j, &c)| (j * (j - 1)) as f64 * c).collect();
        self.weight.expectation(|u| horner(coeffs, u) * horner(&d2, u), spec)
    }

    pub fn dump(&self) -> Vec<BasisDumpEntry> {
        self.steps
            .iter()
            .zip(&self.monomial)
            .map(|(s, alpha)| BasisDumpEntry { n: s.n, beta_n: s.beta, offdiag: s.offdiag, alpha: alpha.clone() })
            .collect()
    }
}
