//! Symmetric strictly convex potentials.
//!
//! Every potential is stored together with the location `xi` of its minimum.
//! The `shifted_*` methods work in the frame `u = x - xi`, which is where the
//! rest of the crate does its numerics; the unshifted methods convert at the
//! boundary.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the potential relative to its minimum.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// `U(u) = omega^2 u^2 / 2`
    Harmonic { omega: f64 },
    /// `U(u) = omega^2 u^2 / 2 + lambda u^4`
    QuarticAnharmonic { omega: f64, lambda: f64 },
    /// `U(u) = sum_n a_n u^(2n)`, with `coeffs[i] = a_(i+1)`.
    EvenPolynomial { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    xi: f64,
}

/// First non-vanishing term `a_k u^(2k)` of the even series around the minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingOrder {
    pub k: usize,
    pub coefficient: f64,
}

/// Which pointwise convexity condition a sample failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvexityCondition {
    /// `(x - xi) U'(x) > 0`
    Radial,
    /// `U''(x) >= 0`
    Curvature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityWitness {
    pub x: f64,
    /// `(x - xi) U'(x)` at the failing sample.
    pub radial: f64,
    pub condition: ConvexityCondition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub is_strictly_convex: bool,
    pub witnesses: Vec<ConvexityWitness>,
    pub grid: GridSpec,
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {value}")))
    }
}

impl Potential {
    pub fn harmonic(omega: f64, xi: f64) -> Result<Self> {
        check_finite("omega", omega)?;
        check_finite("xi", xi)?;
        if omega <= 0.0 {
            return Err(Error::InvalidArgument(format!("omega must be > 0, got {omega}")));
        }
        Ok(Self { kind: PotentialKind::Harmonic { omega }, xi })
    }

    pub fn quartic_anharmonic(omega: f64, lambda: f64, xi: f64) -> Result<Self> {
        check_finite("omega", omega)?;
        check_finite("lambda", lambda)?;
        check_finite("xi", xi)?;
        if omega <= 0.0 {
            return Err(Error::InvalidArgument(format!("omega must be > 0, got {omega}")));
        }
        if lambda < 0.0 {
            return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
        }
        Ok(Self { kind: PotentialKind::QuarticAnharmonic { omega, lambda }, xi })
    }

    /// Builds `sum_n a_n (x - xi)^(2n)` from `coeffs = [a_1, a_2, ...]`.
    ///
    /// The first nonzero coefficient must be positive, otherwise the minimum
    /// at `xi` is not a strict minimum and the potential is rejected as
    /// non-convex. An all-zero list is accepted here but fails every later
    /// convexity check.
    pub fn even_polynomial(coeffs: Vec<f64>, xi: f64) -> Result<Self> {
        check_finite("xi", xi)?;
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("coefficient list is empty".into()));
        }
        for (i, &a) in coeffs.iter().enumerate() {
            check_finite(&format!("a_{}", i + 1), a)?;
        }
        if let Some((i, &a)) = coeffs.iter().enumerate().find(|(_, &a)| a != 0.0) {
            if a < 0.0 {
                return Err(Error::ConvexityViolation(format!(
                    "leading coefficient a_{} = {a} must be positive",
                    i + 1
                )));
            }
        }
        Ok(Self { kind: PotentialKind::EvenPolynomial { coeffs }, xi })
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Same shape, minimum moved to `xi`.
    pub fn with_xi(&self, xi: f64) -> Self {
        Self { kind: self.kind.clone(), xi }
    }

    /// Curvature frequency at the minimum, `sqrt(U''(xi))`.
    pub fn omega(&self) -> f64 {
        match self.kind {
            PotentialKind::Harmonic { omega } | PotentialKind::QuarticAnharmonic { omega, .. } => omega,
            PotentialKind::EvenPolynomial { ref coeffs } => (2.0 * coeffs[0]).max(0.0).sqrt(),
        }
    }

    /// Series coefficients `a_1, a_2, ...` of the shifted expansion.
    pub fn series_coefficients(&self) -> Vec<f64> {
        match self.kind {
            PotentialKind::Harmonic { omega } => vec![0.5 * omega * omega],
            PotentialKind::QuarticAnharmonic { omega, lambda } => vec![0.5 * omega * omega, lambda],
            PotentialKind::EvenPolynomial { ref coeffs } => coeffs.clone(),
        }
    }

    pub fn shifted(&self, u: f64) -> f64 {
        let u2 = u * u;
        match self.kind {
            PotentialKind::Harmonic { omega } => 0.5 * omega * omega * u2,
            PotentialKind::QuarticAnharmonic { omega, lambda } => 0.5 * omega * omega * u2 + lambda * u2 * u2,
            PotentialKind::EvenPolynomial { ref coeffs } => coeffs.iter().rev().fold(0.0, |acc, &a| (acc + a) * u2),
        }
    }

    pub fn shifted_derivative(&self, u: f64) -> f64 {
        let u2 = u * u;
        match self.kind {
            PotentialKind::Harmonic { omega } => omega * omega * u,
            PotentialKind::QuarticAnharmonic { omega, lambda } => omega * omega * u + 4.0 * lambda * u * u2,
            PotentialKind::EvenPolynomial { ref coeffs } => {
                // sum 2n a_n u^(2n-1)
                let poly =
                    coeffs.iter().enumerate().rev().fold(0.0, |acc, (i, &a)| acc * u2 + 2.0 * (i as f64 + 1.0) * a);
                poly * u
            }
        }
    }

    pub fn shifted_second_derivative(&self, u: f64) -> f64 {
        let u2 = u * u;
        match self.kind {
            PotentialKind::Harmonic { omega } => omega * omega,
            PotentialKind::QuarticAnharmonic { omega, lambda } => omega * omega + 12.0 * lambda * u2,
            PotentialKind::EvenPolynomial { ref coeffs } => {
                coeffs.iter().enumerate().rev().fold(0.0, |acc, (i, &a)| {
                    let n = i as f64 + 1.0;
                    acc * u2 + 2.0 * n * (2.0 * n - 1.0) * a
                })
            }
        }
    }

    /// `u U'(u)` in the shifted frame. Nonnegative for every admissible
    /// potential; this is the radicand of the g-function integrand.
    pub fn radial_force(&self, u: f64) -> f64 {
        let u2 = u * u;
        match self.kind {
            PotentialKind::Harmonic { omega } => omega * omega * u2,
            PotentialKind::QuarticAnharmonic { omega, lambda } => omega * omega * u2 + 4.0 * lambda * u2 * u2,
            PotentialKind::EvenPolynomial { ref coeffs } => {
                coeffs.iter().enumerate().rev().fold(0.0, |acc, (i, &a)| (acc + 2.0 * (i as f64 + 1.0) * a) * u2)
            }
        }
    }

    /// `U(x)`.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.shifted(x - self.xi)
    }

    /// `U'(x)`, analytic.
    pub fn derivative(&self, x: f64) -> f64 {
        self.shifted_derivative(x - self.xi)
    }

    /// `U''(x)`, analytic.
    pub fn second_derivative(&self, x: f64) -> f64 {
        self.shifted_second_derivative(x - self.xi)
    }

    /// Samples `(x - xi) U'(x) > 0` and `U''(x) >= 0` on a symmetric grid of
    /// `samples` points over `[xi - half_width, xi + half_width]`, skipping
    /// `x = xi` itself.
    pub fn check_strict_convexity(&self, half_width: f64, samples: usize) -> Result<ConvexityReport> {
        if samples < 3 {
            return Err(Error::InvalidArgument(format!("need at least 3 samples, got {samples}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(Error::InvalidArgument(format!("half_width must be positive and finite, got {half_width}")));
        }
        let step = 2.0 * half_width / (samples - 1) as f64;
        let mut witnesses = Vec::new();
        for j in 0..samples {
            // mirror the right half so the grid is exactly symmetric
            let u = if 2 * j < samples - 1 {
                -(half_width - j as f64 * step)
            } else {
                half_width - (samples - 1 - j) as f64 * step
            };
            if u == 0.0 {
                continue;
            }
            let radial = self.radial_force(u);
            let x = self.xi + u;
            if !(radial > 0.0) {
                witnesses.push(ConvexityWitness { x, radial, condition: ConvexityCondition::Radial });
            }
            if self.shifted_second_derivative(u) < 0.0 {
                witnesses.push(ConvexityWitness { x, radial, condition: ConvexityCondition::Curvature });
            }
        }
        Ok(ConvexityReport {
            is_strictly_convex: witnesses.is_empty(),
            witnesses,
            grid: GridSpec { half_width, samples },
        })
    }

    /// Half-width beyond which no convexity failure can occur.
    ///
    /// For the built-in kinds every width works; for an even polynomial the
    /// positive roots of `u U'(u) / u^2` (a polynomial in `u^2`) lie inside the
    /// Cauchy bound, so sampling up to it covers every possible sign change.
    pub fn convexity_half_width(&self) -> Result<f64> {
        match self.kind {
            PotentialKind::Harmonic { omega } | PotentialKind::QuarticAnharmonic { omega, .. } => {
                Ok(8.0 / omega.sqrt())
            }
            PotentialKind::EvenPolynomial { ref coeffs } => {
                let q: Vec<f64> = coeffs.iter().enumerate().map(|(i, &a)| 2.0 * (i as f64 + 1.0) * a).collect();
                let top = q
                    .iter()
                    .rposition(|&c| c != 0.0)
                    .ok_or_else(|| Error::ConvexityViolation("all series coefficients vanish".into()))?;
                if q[top] < 0.0 {
                    return Err(Error::ConvexityViolation(format!(
                        "highest coefficient a_{} = {} is negative, potential is not confining",
                        top + 1,
                        coeffs[top]
                    )));
                }
                let bound = 1.0 + q[..top].iter().map(|c| (c / q[top]).abs()).fold(0.0, f64::max);
                Ok(1.25 * bound.sqrt())
            }
        }
    }

    /// Validates convexity over [`Self::convexity_half_width`] and fails with
    /// [`Error::ConvexityViolation`] naming the first witness.
    pub fn ensure_strictly_convex(&self) -> Result<ConvexityReport> {
        let half_width = self.convexity_half_width()?;
        let report = self.check_strict_convexity(half_width, 4097)?;
        if let Some(w) = report.witnesses.first() {
            return Err(Error::ConvexityViolation(format!(
                "{:?} condition fails at x = {} ((x - xi) U'(x) = {})",
                w.condition, w.x, w.radial
            )));
        }
        Ok(report)
    }

    /// Exponent index `k` and coefficient `a_k` of the leading term
    /// `U(u) ~ a_k u^(2k)` near the minimum.
    pub fn leading_order(&self) -> Result<LeadingOrder> {
        self.series_coefficients()
            .iter()
            .enumerate()
            .find(|(_, &a)| a != 0.0)
            .map(|(i, &a)| LeadingOrder { k: i + 1, coefficient: a })
            .ok_or_else(|| Error::InvalidArgument("potential has no nonzero series coefficient".into()))
    }

    /// Positive classical turning point `u > 0` with `U(xi + u) = energy`.
    pub fn turning_point(&self, energy: f64) -> Result<f64> {
        if !energy.is_finite() {
            return Err(Error::InvalidArgument(format!("energy must be finite, got {energy}")));
        }
        if energy <= 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0;
        while self.shifted(hi) < energy {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::NotFound(format!("no turning point below 1e12 for E = {energy}")));
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.shifted(mid) < energy {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn spec(&self) -> PotentialSpec {
        PotentialSpec::from(self)
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PotentialKind::Harmonic { omega } => write!(f, "HO(omega={omega}, xi={})", self.xi),
            PotentialKind::QuarticAnharmonic { omega, lambda } => {
                write!(f, "AHO(omega={omega}, lambda={lambda}, xi={})", self.xi)
            }
            PotentialKind::EvenPolynomial { ref coeffs } => {
                write!(f, "EvenPoly(coeffs={coeffs:?}, xi={})", self.xi)
            }
        }
    }
}

/// Serialized form of a potential, as accepted by config files and the CLI.
///
/// `{"kind":"aho","omega":1.0,"lambda":0.25,"xi":4.0}`,
/// `{"kind":"ho","omega":1.0}` or `{"kind":"even_poly","coeffs":[0.5,1.0],"xi":0.0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum PotentialSpec {
    #[serde(rename = "ho")]
    Harmonic {
        omega: f64,
        #[serde(default)]
        xi: f64,
    },
    #[serde(rename = "aho")]
    QuarticAnharmonic {
        omega: f64,
        lambda: f64,
        #[serde(default)]
        xi: f64,
    },
    #[serde(rename = "even_poly")]
    EvenPolynomial {
        coeffs: Vec<f64>,
        #[serde(default)]
        xi: f64,
    },
}

impl From<&Potential> for PotentialSpec {
    fn from(p: &Potential) -> Self {
        match p.kind {
            PotentialKind::Harmonic { omega } => PotentialSpec::Harmonic { omega, xi: p.xi },
            PotentialKind::QuarticAnharmonic { omega, lambda } => {
                PotentialSpec::QuarticAnharmonic { omega, lambda, xi: p.xi }
            }
            PotentialKind::EvenPolynomial { ref coeffs } => {
                PotentialSpec::EvenPolynomial { coeffs: coeffs.clone(), xi: p.xi }
            }
        }
    }
}

impl TryFrom<PotentialSpec> for Potential {
    type Error = Error;

    fn try_from(spec: PotentialSpec) -> Result<Self> {
        match spec {
            PotentialSpec::Harmonic { omega, xi } => Potential::harmonic(omega, xi),
            PotentialSpec::QuarticAnharmonic { omega, lambda, xi } => Potential::quartic_anharmonic(omega, lambda, xi),
            PotentialSpec::EvenPolynomial { coeffs, xi } => Potential::even_polynomial(coeffs, xi),
        }
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let spec: PotentialSpec =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(format!("bad potential JSON: {e}")))?;
        Potential::try_from(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aho(omega: f64, lambda: f64, xi: f64) -> Potential {
        Potential::quartic_anharmonic(omega, lambda, xi).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(Potential::harmonic(1.0, 0.0).unwrap().evaluate(0.0), 0.0);
        assert_eq!(aho(1.0, 1.0, 4.0).evaluate(5.0), 1.5);
        assert_eq!(Potential::even_polynomial(vec![0.5], 0.0).unwrap().evaluate(2.0), 2.0);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(aho(1.0, 1.0, 0.0).derivative(1.0), 5.0);
        assert_eq!(Potential::harmonic(2.0, 0.0).unwrap().derivative(3.0), 12.0);
        for p in [
            Potential::harmonic(1.3, -2.0).unwrap(),
            aho(0.7, 2.0, 4.0),
            Potential::even_polynomial(vec![0.0, 1.0, 0.3], 1.5).unwrap(),
        ] {
            assert_eq!(p.derivative(p.xi()), 0.0);
        }
    }

    #[test]
    fn second_derivative_examples() {
        let ho = Potential::harmonic(1.0, 0.0).unwrap();
        for x in [-3.0, 0.0, 2.5] {
            assert_eq!(ho.second_derivative(x), 1.0);
        }
        assert_eq!(aho(1.0, 1.0, 0.0).second_derivative(1.0), 13.0);
        assert_eq!(Potential::even_polynomial(vec![0.5], 0.0).unwrap().second_derivative(0.0), 1.0);
    }

    #[test]
    fn polynomial_matches_builtin_forms() {
        let poly = Potential::even_polynomial(vec![0.5, 0.25], 4.0).unwrap();
        let builtin = aho(1.0, 0.25, 4.0);
        for x in [2.0, 3.3, 4.0, 4.9, 7.0] {
            assert!((poly.evaluate(x) - builtin.evaluate(x)).abs() < 1e-12);
            assert!((poly.derivative(x) - builtin.derivative(x)).abs() < 1e-12);
            assert!((poly.second_derivative(x) - builtin.second_derivative(x)).abs() < 1e-12);
            let u = x - 4.0;
            assert!((poly.radial_force(u) - u * builtin.derivative(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn convexity_examples() {
        let report = aho(1.0, 0.05, 4.0).check_strict_convexity(10.0, 201).unwrap();
        assert!(report.is_strictly_convex);
        assert!(report.witnesses.is_empty());

        let quartic = Potential::even_polynomial(vec![0.0, 1.0], 0.0).unwrap();
        let report = quartic.check_strict_convexity(3.0, 101).unwrap();
        assert!(report.is_strictly_convex);

        assert!(matches!(Potential::even_polynomial(vec![-1.0], 0.0), Err(Error::ConvexityViolation(_))));
    }

    #[test]
    fn convexity_reports_every_witness() {
        // u^2 - u^4 + 0.1 u^6: radial term 2u^2 - 4u^4 + 0.6u^6 dips below zero
        let p = Potential::even_polynomial(vec![1.0, -1.0, 0.1], 0.0).unwrap();
        let report = p.check_strict_convexity(3.0, 301).unwrap();
        assert!(!report.is_strictly_convex);
        assert!(report.witnesses.iter().any(|w| w.condition == ConvexityCondition::Radial && w.radial <= 0.0));
        assert!(report.witnesses.iter().all(|w| w.x != 0.0));
        assert!(matches!(p.ensure_strictly_convex(), Err(Error::ConvexityViolation(_))));
    }

    #[test]
    fn convexity_argument_errors() {
        let p = Potential::harmonic(1.0, 0.0).unwrap();
        assert!(matches!(p.check_strict_convexity(1.0, 2), Err(Error::InvalidArgument(_))));
        assert!(matches!(p.check_strict_convexity(0.0, 10), Err(Error::InvalidArgument(_))));
        assert!(matches!(p.check_strict_convexity(-1.0, 10), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn non_confining_polynomial_rejected() {
        let p = Potential::even_polynomial(vec![1.0, -0.5], 0.0).unwrap();
        assert!(matches!(p.ensure_strictly_convex(), Err(Error::ConvexityViolation(_))));
    }

    #[test]
    fn leading_order_examples() {
        let lo = Potential::harmonic(1.0, 0.0).unwrap().leading_order().unwrap();
        assert_eq!(lo, LeadingOrder { k: 1, coefficient: 0.5 });
        let lo = aho(1.0, 5.0, 0.0).leading_order().unwrap();
        assert_eq!(lo, LeadingOrder { k: 1, coefficient: 0.5 });
        let lo = Potential::even_polynomial(vec![0.0, 3.0], 0.0).unwrap().leading_order().unwrap();
        assert_eq!(lo, LeadingOrder { k: 2, coefficient: 3.0 });
        let zero = Potential::even_polynomial(vec![0.0, 0.0], 0.0).unwrap();
        assert!(matches!(zero.leading_order(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn constructor_rejects_bad_parameters() {
        assert!(Potential::harmonic(0.0, 0.0).is_err());
        assert!(Potential::harmonic(f64::NAN, 0.0).is_err());
        assert!(Potential::quartic_anharmonic(1.0, -0.1, 0.0).is_err());
        assert!(Potential::even_polynomial(vec![], 0.0).is_err());
    }

    #[test]
    fn turning_point_inverts_potential() {
        let ho = Potential::harmonic(1.0, 0.0).unwrap();
        assert!((ho.turning_point(16.5).unwrap() - 33f64.sqrt()).abs() < 1e-12);
        assert_eq!(ho.turning_point(-1.0).unwrap(), 0.0);
    }

    #[test]
    fn json_parse_format() {
        let p: Potential = r#"{"kind":"aho","omega":1.0,"lambda":0.25,"xi":4.0}"#.parse().unwrap();
        assert_eq!(p, aho(1.0, 0.25, 4.0));
        let p: Potential = r#"{"kind":"even_poly","coeffs":[0.5,1.0],"xi":0.0}"#.parse().unwrap();
        assert_eq!(p.series_coefficients(), vec![0.5, 1.0]);
        let p: Potential = r#"{"kind":"ho","omega":2.0}"#.parse().unwrap();
        assert_eq!(p.xi(), 0.0);
        assert!(r#"{"kind":"cubic","omega":1.0}"#.parse::<Potential>().is_err());
        let back: Potential = serde_json::to_string(&p.spec()).unwrap().parse().unwrap();
        assert_eq!(back, p);
    }
}
