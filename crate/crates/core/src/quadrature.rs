//! Adaptive Gauss-Kronrod integration on finite intervals and against even,
//! rapidly decaying weights on the real line.
//!
//! Infinite integrals are handled by cutting the weight where it drops below
//! `truncation_threshold` of its peak. The cut is always symmetric and the
//! two halves `[-L, 0]` and `[0, L]` are integrated separately, so the
//! symmetry point sits on a panel boundary and mirrored panels see mirrored
//! nodes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and limits shared by every integral in the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Weight value, relative to its peak, below which the tail is dropped.
    pub truncation_threshold: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 1e-14, truncation_threshold: 1e-18, max_subdivisions: 1 << 14 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in
            [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol), ("truncation_threshold", self.truncation_threshold)]
        {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.max_subdivisions < 2 {
            return Err(Error::InvalidArgument(format!(
                "max_subdivisions must be >= 2, got {}",
                self.max_subdivisions
            )));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// `[-half_width, half_width]`
    pub fn symmetric(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    /// Roundoff floor of the error estimate.
    floor: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let value = kronrod * half;
    Panel { lo, hi, value, error: ((kronrod - gauss) * half).abs(), floor: 50.0 * f64::EPSILON * abs_sum * half.abs() }
}

/// Value and error estimate of a finite integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive 7/15-point Gauss-Kronrod integration.
///
/// Converges once the summed error estimate is at most
/// `max(abs_tol, rel_tol * |value|)`, or once every remaining panel is at its
/// roundoff floor, whichever comes first.
pub fn integrate_finite_estimate<F>(f: F, iv: Interval, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    let first = kronrod_panel(&f, iv.lo, iv.hi);
    let mut value = first.value;
    let mut error = first.error;
    let mut floor = first.floor;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut panels = 1;
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::AccuracyFailure { estimate: value, error_bound: error });
        }
        let tol = spec.abs_tol.max(spec.rel_tol * value.abs());
        if error <= tol || error <= floor {
            return Ok(Estimate { value, error });
        }
        if panels >= spec.max_subdivisions {
            return Err(Error::AccuracyFailure { estimate: value, error_bound: error });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(worst.lo < mid && mid < worst.hi) {
            return Err(Error::AccuracyFailure { estimate: value, error_bound: error });
        }
        let left = kronrod_panel(&f, worst.lo, mid);
        let right = kronrod_panel(&f, mid, worst.hi);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        floor += left.floor + right.floor - worst.floor;
        heap.push(left);
        heap.push(right);
        panels += 1;
        // re-sum periodically so the running totals do not drift
        if panels % 64 == 0 {
            value = heap.iter().map(|p| p.value).sum();
            error = heap.iter().map(|p| p.error).sum();
            floor = heap.iter().map(|p| p.floor).sum();
        }
    }
}

/// `int_lo^hi f`, see [`integrate_finite_estimate`].
pub fn integrate_finite<F>(f: F, iv: Interval, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_finite_estimate(f, iv, spec).map(|e| e.value)
}

const MAX_HALF_WIDTH: f64 = 1e6;

/// Symmetric interval `[-L, L]` with `w(L) = truncation_threshold * w(0)`.
///
/// `w` must be even and decrease away from its maximum at `0`. The crossing
/// is bracketed by doubling from 1 and refined by bisection.
pub fn truncation_domain<W>(w: W, spec: &QuadratureSpec) -> Result<Interval>
where
    W: Fn(f64) -> f64,
{
    spec.validate()?;
    let peak = w(0.0);
    if !(peak > 0.0) || !peak.is_finite() {
        return Err(Error::DomainFailure(format!("weight at the origin is {peak}")));
    }
    let cut = spec.truncation_threshold * peak;
    let below = |u: f64| {
        let v = w(u);
        v.is_nan() || v <= cut
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while !below(hi) {
        lo = hi;
        hi *= 2.0;
        if hi > MAX_HALF_WIDTH {
            return Err(Error::DomainFailure(format!("weight still above {cut:e} at |u| = {MAX_HALF_WIDTH:e}")));
        }
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Interval::symmetric(hi)
}

/// `int_{-L}^{L} f`, split at the origin.
pub fn integrate_symmetric<F>(f: F, half_width: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let left = integrate_finite(&f, Interval::new(-half_width, 0.0)?, spec)?;
    let right = integrate_finite(&f, Interval::new(0.0, half_width)?, spec)?;
    Ok(left + right)
}

/// `int f(u) w(u) du` over the truncation domain of `w`.
pub fn integrate_weighted<F, W>(f: F, w: W, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    let domain = truncation_domain(&w, spec)?;
    integrate_symmetric(|u| f(u) * w(u), domain.hi, spec)
}
