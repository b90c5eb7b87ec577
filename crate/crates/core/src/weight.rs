//! The g-function, the normalized virial function `chi_v = N exp(-g)` and the
//! weight `sigma_v = chi_v^2`.
//!
//! `g` is the even antiderivative of `sqrt(u U'(u))` pinned to `g(0) = 0`.
//! `chi_v` satisfies the local virial relation
//! `[(ln chi_v^2)']^2 = 4 u U'(u)` pointwise.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{Potential, PotentialKind};
use crate::quadrature::{self, Interval, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GMode {
    /// `g = omega u^2 / 2`
    ClosedFormHO,
    /// `g = omega^3 / (12 lambda) [(1 + 4 lambda u^2 / omega^2)^(3/2) - 1]`
    ClosedFormAHO,
    /// Tabulated quadrature of `sqrt(u U'(u))`.
    Quadrature,
}

/// Stop tabulating once `g` exceeds this; `exp(-2 g)` is far below any cut.
const TABLE_G_MAX: f64 = 80.0;
const TABLE_MAX_ENTRIES: usize = 1 << 20;
const STEPS_PER_SCALE: f64 = 64.0;

/// Cumulative `g` at `k * step`, refined between knots by one fixed panel.
#[derive(Debug, Clone, PartialEq)]
struct GTable {
    step: f64,
    knots: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GFunction {
    potential: Potential,
    mode: GMode,
    table: Option<GTable>,
}

// Gauss-Legendre 10-point nodes/weights on [-1, 1] (positive half).
const GL10_X: [f64; 5] = [
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.973_906_528_517_171_720_077_964_012_084_452,
];
const GL10_W: [f64; 5] = [
    0.295_524_224_714_752_870_173_892_994_651_338,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.066_671_344_308_688_137_593_568_809_893_332,
];

fn gl10<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let s: f64 = GL10_X.iter().zip(GL10_W.iter()).map(|(&x, &w)| w * (f(c - h * x) + f(c + h * x))).sum();
    s * h
}

impl GFunction {
    /// Picks the closed form for the built-in kinds and quadrature otherwise.
    pub fn build(p: &Potential) -> Result<Self> {
        let mode = match p.kind() {
            PotentialKind::Harmonic { .. } => GMode::ClosedFormHO,
            PotentialKind::QuarticAnharmonic { .. } => GMode::ClosedFormAHO,
            PotentialKind::EvenPolynomial { .. } => GMode::Quadrature,
        };
        Self::with_mode(p, mode)
    }

    pub fn with_mode(p: &Potential, mode: GMode) -> Result<Self> {
        p.ensure_strictly_convex()?;
        match (mode, p.kind()) {
            (GMode::ClosedFormHO, PotentialKind::Harmonic { .. })
            | (GMode::ClosedFormAHO, PotentialKind::QuarticAnharmonic { .. }) => {
                Ok(Self { potential: p.clone(), mode, table: None })
            }
            (GMode::Quadrature, _) => {
                let table = Self::tabulate(p)?;
                Ok(Self { potential: p.clone(), mode, table: Some(table) })
            }
            (mode, _) => Err(Error::InvalidArgument(format!("{mode:?} does not apply to {p}"))),
        }
    }

    fn integrand(p: &Potential, t: f64) -> f64 {
        p.radial_force(t).max(0.0).sqrt()
    }

    fn tabulate(p: &Potential) -> Result<GTable> {
        let spec = QuadratureSpec::default();
        let partial = |s: f64| quadrature::integrate_finite(|t| Self::integrand(p, t), Interval::new(0.0, s)?, &spec);
        // length scale on which g grows by O(1)
        let mut scale = 1.0;
        let mut g = partial(scale)?;
        while g < 0.5 {
            scale *= 2.0;
            if scale > 1e6 {
                return Err(Error::DomainFailure("g stays below 1/2 up to |u| = 1e6".into()));
            }
            g = partial(scale)?;
        }
        while g > 2.0 {
            scale *= 0.5;
            g = partial(scale)?;
        }
        let step = scale / STEPS_PER_SCALE;
        let mut knots = vec![0.0];
        let mut acc = 0.0;
        while acc < TABLE_G_MAX {
            let k = knots.len() - 1;
            let (lo, hi) = (k as f64 * step, (k + 1) as f64 * step);
            acc += gl10(|t| Self::integrand(p, t), lo, hi);
            knots.push(acc);
            if knots.len() > TABLE_MAX_ENTRIES {
                return Err(Error::DomainFailure("g-function table exceeded its size cap".into()));
            }
        }
        Ok(GTable { step, knots })
    }

    pub fn mode(&self) -> GMode {
        self.mode
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// `g(u)` in the shifted frame, `g(0) = 0`.
    pub fn value(&self, u: f64) -> f64 {
        let a = u.abs();
        match (self.mode, self.potential.kind()) {
            (GMode::ClosedFormHO, &PotentialKind::Harmonic { omega }) => 0.5 * omega * a * a,
            (GMode::ClosedFormAHO, &PotentialKind::QuarticAnharmonic { omega, lambda }) => {
                if lambda == 0.0 {
                    0.5 * omega * a * a
                } else {
                    // (1 + x)^(3/2) - 1 without cancellation for small x
                    let x = 4.0 * lambda * a * a / (omega * omega);
                    omega.powi(3) / (12.0 * lambda) * (1.5 * x.ln_1p()).exp_m1()
                }
            }
            _ => {
                let table = self.table.as_ref().expect("quadrature mode carries a table");
                let k = (a / table.step).floor() as usize;
                let p = &self.potential;
                if k < table.knots.len() {
                    let lo = k as f64 * table.step;
                    table.knots[k] + gl10(|t| Self::integrand(p, t), lo, a)
                } else {
                    // past the table: keep stepping with the same panels
                    let last = table.knots.len() - 1;
                    let mut acc = table.knots[last];
                    let mut lo = last as f64 * table.step;
                    while lo + table.step < a {
                        acc += gl10(|t| Self::integrand(p, t), lo, lo + table.step);
                        lo += table.step;
                    }
                    acc + gl10(|t| Self::integrand(p, t), lo, a)
                }
            }
        }
    }

    /// `g'(u) = sign(u) sqrt(u U'(u))`, zero at the origin.
    pub fn derivative(&self, u: f64) -> f64 {
        let r = Self::integrand(&self.potential, u);
        if u < 0.0 {
            -r
        } else {
            r
        }
    }

    /// [`Self::derivative`], failing if the radicand `u U'(u)` is negative.
    pub fn checked_derivative(&self, u: f64) -> Result<f64> {
        let radicand = self.potential.radial_force(u);
        if radicand < 0.0 {
            return Err(Error::ConvexityViolation(format!("u U'(u) = {radicand} < 0 at u = {u}")));
        }
        Ok(self.derivative(u))
    }

    /// `g''(u) = (u U' + u^2 U'') / (2 |u| sqrt(u U'))`, with the limit
    /// `k sqrt(2 k a_k) |u|^(k-1)` at the origin.
    pub fn second_derivative(&self, u: f64) -> f64 {
        let p = &self.potential;
        if u == 0.0 {
            return match p.leading_order() {
                Ok(lo) if lo.k == 1 => (2.0 * lo.coefficient).sqrt(),
                _ => 0.0,
            };
        }
        let radial = p.radial_force(u);
        let num = radial + u * u * p.shifted_second_derivative(u);
        num / (2.0 * u.abs() * radial.sqrt())
    }
}

/// Normalized `chi_v` together with its truncation domain.
#[derive(Debug, Clone, PartialEq)]
pub struct VirialWeight {
    g: GFunction,
    log_norm: f64,
    domain: Interval,
    spec: QuadratureSpec,
}

impl VirialWeight {
    /// Cuts the domain where `exp(-2 g)` falls below the spec threshold and
    /// fixes `N` from `int chi_v^2 = 1`.
    pub fn build(g: GFunction, spec: &QuadratureSpec) -> Result<Self> {
        let domain = quadrature::truncation_domain(|u| (-2.0 * g.value(u)).exp(), spec)?;
        let z = quadrature::integrate_symmetric(|u| (-2.0 * g.value(u)).exp(), domain.hi, spec)?;
        Ok(Self { g, log_norm: -0.5 * z.ln(), domain, spec: *spec })
    }

    /// Shorthand for `build(GFunction::build(p)?, spec)`.
    pub fn for_potential(p: &Potential, spec: &QuadratureSpec) -> Result<Self> {
        Self::build(GFunction::build(p)?, spec)
    }

    pub fn g(&self) -> &GFunction {
        &self.g
    }

    pub fn potential(&self) -> &Potential {
        self.g.potential()
    }

    /// Normalization amplitude `N`.
    pub fn norm(&self) -> f64 {
        self.log_norm.exp()
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn half_width(&self) -> f64 {
        self.domain.hi
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn log_chi_v(&self, u: f64) -> f64 {
        self.log_norm - self.g.value(u)
    }

    pub fn chi_v(&self, u: f64) -> f64 {
        self.log_chi_v(u).exp()
    }

    pub fn sigma_v(&self, u: f64) -> f64 {
        (2.0 * self.log_chi_v(u)).exp()
    }

    /// `int f(u) sigma_v(u) du` over the truncation domain.
    pub fn expectation<F>(&self, f: F, spec: &QuadratureSpec) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        quadrature::integrate_symmetric(|u| f(u) * self.sigma_v(u), self.domain.hi, spec)
    }

    /// Inflection pair `(-u_r, u_r)` of `chi_v`, where `g'^2 = g''`.
    ///
    /// Brackets the first sign change on 1024 samples of `(0, L]` and
    /// bisects it to `1e-10`.
    pub fn inflection_points(&self) -> Result<(f64, f64)> {
        let h = |u: f64| {
            let d = self.g.derivative(u);
            d * d - self.g.second_derivative(u)
        };
        let samples = 1024;
        let step = self.domain.hi / samples as f64;
        let mut prev_u = 0.0;
        let mut prev = h(f64::MIN_POSITIVE.sqrt());
        for i in 1..=samples {
            let u = i as f64 * step;
            let cur = h(u);
            if prev < 0.0 && cur >= 0.0 {
                let (mut lo, mut hi) = (prev_u, u);
                while hi - lo > 1e-10 {
                    let mid = 0.5 * (lo + hi);
                    if h(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let root = 0.5 * (lo + hi);
                return Ok((-root, root));
            }
            prev_u = u;
            prev = cur;
        }
        Err(Error::NotFound(format!("no inflection point of chi_v in (0, {}]", self.domain.hi)))
    }
}
