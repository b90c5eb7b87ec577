//! Lowest eigenpairs of a real symmetric band matrix.
//!
//! Eigenvalues come from bisection on the inertia of `A - sigma I`, counted
//! from the pivots of a banded `LDL^T` factorization (Sylvester's law of
//! inertia). Eigenvectors come from inverse iteration with a banded LU that
//! pivots on rows.

use crate::error::{Error, Result};

/// Symmetric matrix with `bands[d][i] = A[i][i + d]` for `d = 0..=bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricBand {
    n: usize,
    bands: Vec<Vec<f64>>,
}

impl SymmetricBand {
    /// `bands[0]` is the diagonal, `bands[d]` the `d`-th superdiagonal of
    /// length `n - d`.
    pub fn new(bands: Vec<Vec<f64>>) -> Result<Self> {
        let n = bands.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidArgument("empty band matrix".into()));
        }
        for (d, band) in bands.iter().enumerate() {
            if band.len() != n.saturating_sub(d) {
                return Err(Error::InvalidArgument(format!(
                    "band {d} has length {}, expected {}",
                    band.len(),
                    n.saturating_sub(d)
                )));
            }
        }
        Ok(Self { n, bands })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bands.len() - 1
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let d = c - r;
        if d > self.bandwidth() {
            0.0
        } else {
            self.bands[d][r]
        }
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let b = self.bandwidth();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.n {
            let radius: f64 =
                (i.saturating_sub(b)..(i + b + 1).min(self.n)).filter(|&j| j != i).map(|j| self.get(i, j).abs()).sum();
            lo = lo.min(self.bands[0][i] - radius);
            hi = hi.max(self.bands[0][i] + radius);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        let b = self.bandwidth();
        let n = self.n;
        // l[i * b + t] holds L[i][i - b + t]
        let mut l = vec![0.0; n * b.max(1)];
        let mut d = vec![0.0; n];
        let tiny = f64::EPSILON * (self.gershgorin_scale() + sigma.abs()).max(f64::MIN_POSITIVE);
        let mut negatives = 0;
        for i in 0..n {
            let j0 = i.saturating_sub(b);
            for j in j0..i {
                let mut s = self.get(i, j);
                let k0 = j0.max(j.saturating_sub(b));
                for k in k0..j {
                    s -= l[i * b + (k + b - i)] * l[j * b + (k + b - j)] * d[k];
                }
                l[i * b + (j + b - i)] = s / d[j];
            }
            let mut s = self.bands[0][i] - sigma;
            for k in j0..i {
                let lik = l[i * b + (k + b - i)];
                s -= lik * lik * d[k];
            }
            if s.abs() < tiny {
                s = -tiny;
            }
            if s < 0.0 {
                negatives += 1;
            }
            d[i] = s;
        }
        negatives
    }

    fn gershgorin_scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.n {
            return Err(Error::InvalidArgument(format!("index {k} out of range for dimension {}", self.n)));
        }
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        lo -= 1e-12 * scale;
        hi += 1e-12 * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * mid.abs().max(f64::EPSILON * scale) {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Unit-norm eigenvector for an eigenvalue `lambda` known to high accuracy.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let lu = BandLu::factor(self, lambda)?;
        let n = self.n;
        // deterministic start with components along every mode
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 101) as f64 / 101.0).collect();
        for _ in 0..4 {
            lu.solve(&mut x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::NumericalBreakdown {
                    n: 0,
                    reason: format!("inverse iteration diverged at eigenvalue {lambda}"),
                });
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(x)
    }
}

/// Banded LU of `A - sigma I` with partial pivoting. Row `i` stores columns
/// `i - b ..= i + 2b`, which is wide enough to absorb pivoting fill.
struct BandLu {
    n: usize,
    b: usize,
    rows: Vec<Vec<f64>>,
    /// multipliers `m[i][t]` eliminating row `i + 1 + t` with pivot row `i`
    mult: Vec<Vec<f64>>,
    perm: Vec<usize>,
}

impl BandLu {
    fn factor(a: &SymmetricBand, sigma: f64) -> Result<Self> {
        let n = a.n;
        let b = a.bandwidth();
        let width = 3 * b + 1;
        let mut rows = vec![vec![0.0; width]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for j in i.saturating_sub(b)..(i + b + 1).min(n) {
                row[j + b - i] = a.get(i, j) - if i == j { sigma } else { 0.0 };
            }
        }
        let col = |i: usize, j: usize| j + b - i; // valid for i - b <= j <= i + 2b
        let tiny = f64::EPSILON * a.gershgorin_scale().max(f64::MIN_POSITIVE);
        let mut mult = vec![vec![0.0; b]; n];
        let mut perm = vec![0; n];
        for i in 0..n {
            let last = (i + b).min(n - 1);
            let p = (i..=last)
                .max_by(|&r, &s| rows[r][col(r, i)].abs().total_cmp(&rows[s][col(s, i)].abs()))
                .expect("non-empty pivot range");
            perm[i] = p;
            if p != i {
                // move row p's entries (columns i..=i+2b) into row i's window
                let mut ri = vec![0.0; width];
                let mut rp = vec![0.0; width];
                for j in i..(i + 2 * b + 1).min(n) {
                    ri[col(i, j)] = rows[p][col(p, j)];
                    rp[col(p, j)] = rows[i][col(i, j)];
                }
                rows[i] = ri;
                rows[p] = rp;
            }
            let mut pivot = rows[i][col(i, i)];
            if pivot.abs() < tiny {
                pivot = if pivot < 0.0 { -tiny } else { tiny };
                rows[i][col(i, i)] = pivot;
            }
            for r in (i + 1)..=last {
                let m = rows[r][col(r, i)] / pivot;
                mult[i][r - i - 1] = m;
                rows[r][col(r, i)] = 0.0;
                if m != 0.0 {
                    for j in (i + 1)..(i + 2 * b + 1).min(n) {
                        let v = rows[i][col(i, j)];
                        rows[r][col(r, j)] -= m * v;
                    }
                }
            }
        }
        Ok(Self { n, b, rows, mult, perm })
    }

    fn solve(&self, x: &mut [f64]) {
        let (n, b) = (self.n, self.b);
        for i in 0..n {
            x.swap(i, self.perm[i]);
            let xi = x[i];
            for r in (i + 1)..=(i + b).min(n - 1) {
                x[r] -= self.mult[i][r - i - 1] * xi;
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..(i + 2 * b + 1).min(n) {
                s -= self.rows[i][j + b - i] * x[j];
            }
            x[i] = s / self.rows[i][b];
        }
    }
}
