use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use virial_ansatz::orthopoly::OrthoBasis;
use virial_ansatz::spectrum;
use virial_ansatz::{Error, Potential, PotentialKind, QuadratureSpec, VirialWeight};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyItem {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl VerifyItem {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub potential: virial_ansatz::PotentialSpec,
    pub items: Vec<VerifyItem>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.items.iter().filter(|i| !i.passed).map(|i| i.name.as_str()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in &self.items {
            let tag = if i.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "{tag} {:<28} {:.3e} (limit {:.0e})", i.name, i.value, i.threshold);
        }
        let _ = writeln!(out, "{}", if self.passed() { "all checks passed" } else { "verification failed" });
        out
    }
}

/// Orthonormal Hermite function of the oscillator with frequency `omega`.
fn hermite_function(omega: f64, n: usize, u: f64) -> f64 {
    let y = omega.sqrt() * u;
    let mut prev = 0.0;
    let mut cur = (omega / std::f64::consts::PI).powf(0.25) * (-0.5 * y * y).exp();
    for k in 0..n {
        let next = (2.0 / (k + 1) as f64).sqrt() * y * cur - (k as f64 / (k + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Builds the basis with `build_spec` and checks every invariant with the
/// default tight quadrature, so a sloppy build shows up as a failure.
pub fn run(p: &Potential, nmax: usize, build_spec: &QuadratureSpec) -> Result<VerifySummary, Error> {
    let check = QuadratureSpec::default();
    let mut items = Vec::new();

    let convexity = p.ensure_strictly_convex()?;
    items.push(VerifyItem {
        name: "strict convexity".into(),
        passed: convexity.is_strictly_convex,
        value: convexity.witnesses.len() as f64,
        threshold: 0.0,
    });

    let weight = Arc::new(VirialWeight::for_potential(p, build_spec)?);
    let g = weight.g();
    let l = weight.half_width();
    let samples = 2001;
    let step = 2.0 * l / (samples - 1) as f64;
    let mut parity = 0.0f64;
    let mut concave_points = 0usize;
    for i in 0..samples {
        let u = -l + i as f64 * step;
        parity = parity.max((g.value(u) - g.value(-u)).abs());
        if u != 0.0 && g.second_derivative(u).partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            concave_points += 1;
        }
    }
    items.push(VerifyItem::at_most("g parity", parity, 0.0));
    items.push(VerifyItem::at_most("g convexity (bad points)", concave_points as f64, 0.0));

    let norm = weight.expectation(|_| 1.0, &check)?;
    items.push(VerifyItem::at_most("normalization", (norm - 1.0).abs(), 1e-10));

    let basis = OrthoBasis::build(weight, nmax, build_spec)?;
    let gram = basis.gram_matrix(&check)?;
    let mut gram_err = 0.0f64;
    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            gram_err = gram_err.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    items.push(VerifyItem::at_most("gram matrix", gram_err, 1e-9));

    let mut condition = 0.0f64;
    let mut theorem = 0.0f64;
    let mut forms = 0.0f64;
    for n in 0..=nmax {
        condition = condition.max(basis.virial_condition_residual(n, &check)?);
        theorem = theorem.max(spectrum::virial_check(&basis, n, &check)?);
        let ev = spectrum::energy_virial(&basis, n, &check)?;
        let eh = spectrum::energy_hamiltonian(&basis, n, &check)?;
        forms = forms.max((ev - eh).abs() / ev.abs().max(f64::MIN_POSITIVE));
    }
    items.push(VerifyItem::at_most("virial condition", condition, 1e-8));
    items.push(VerifyItem::at_most("virial theorem", theorem, 1e-8));
    items.push(VerifyItem::at_most("energy form agreement", forms, 1e-8));

    if let PotentialKind::Harmonic { omega } = *p.kind() {
        let mut worst = 0.0f64;
        let mut energy = 0.0f64;
        for n in 0..=nmax {
            for i in 0..samples {
                let u = -l + i as f64 * step;
                worst = worst.max((spectrum::ansatz_shifted(&basis, n, u)? - hermite_function(omega, n, u)).abs());
            }
            energy = energy.max((spectrum::energy_virial(&basis, n, &check)? - omega * (n as f64 + 0.5)).abs());
        }
        items.push(VerifyItem::at_most("hermite recovery", worst, 1e-9));
        items.push(VerifyItem::at_most("harmonic energies", energy, 1e-9));
    }

    Ok(VerifySummary { potential: p.spec(), items })
}
