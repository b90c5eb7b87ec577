use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use virial_ansatz::orthopoly::MAX_DEGREE;
use virial_ansatz::{Potential, PotentialSpec, QuadratureSpec, ReferenceSolver, Stencil};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Ho,
    Aho,
    #[value(name = "even_poly")]
    EvenPoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StencilArg {
    Second,
    Fourth,
}

impl From<StencilArg> for Stencil {
    fn from(s: StencilArg) -> Self {
        match s {
            StencilArg::Second => Stencil::Second,
            StencilArg::Fourth => Stencil::Fourth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Preset {
    #[value(name = "table1-a")]
    #[serde(rename = "table1-a")]
    A,
    #[value(name = "table1-b")]
    #[serde(rename = "table1-b")]
    B,
    #[value(name = "table1-c")]
    #[serde(rename = "table1-c")]
    C,
    #[value(name = "table1-d")]
    #[serde(rename = "table1-d")]
    D,
    #[value(name = "table1-e")]
    #[serde(rename = "table1-e")]
    E,
    #[value(name = "table1-f")]
    #[serde(rename = "table1-f")]
    F,
}

impl Preset {
    pub const ALL: [Preset; 6] = [Preset::A, Preset::B, Preset::C, Preset::D, Preset::E, Preset::F];

    pub fn lambda(self) -> f64 {
        match self {
            Preset::A => 0.05,
            Preset::B => 0.25,
            Preset::C => 0.5,
            Preset::D => 1.0,
            Preset::E => 2.5,
            Preset::F => 5.0,
        }
    }

    pub fn spec(self) -> PotentialSpec {
        PotentialSpec::QuarticAnharmonic { omega: 1.0, lambda: self.lambda(), xi: 4.0 }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::A => "table1-a",
            Preset::B => "table1-b",
            Preset::C => "table1-c",
            Preset::D => "table1-d",
            Preset::E => "table1-e",
            Preset::F => "table1-f",
        }
    }
}

/// Flags shared by every subcommand. Anything given here overrides the
/// `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Potential family
    #[arg(long, value_enum)]
    pub potential: Option<Kind>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Location of the minimum
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    /// Series coefficients a_1,a_2,... of an even polynomial
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    /// Built-in anharmonic parameter block
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Highest state index (at most 16)
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Interior points of the reference grid
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Half-width of the reference box around the minimum
    #[arg(long)]
    pub domain_halfwidth: Option<f64>,
    /// Skip grid-doubling extrapolation in the reference solver
    #[arg(long)]
    pub no_richardson: bool,
    #[arg(long, value_enum)]
    pub stencil: Option<StencilArg>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the result here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the recurrence coefficients of the basis as JSON
    #[arg(long)]
    pub dump_basis: Option<PathBuf>,
}

/// Contents of a `--config` file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub potential: Option<PotentialSpec>,
    pub preset: Option<Preset>,
    pub nmax: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub grid_points: Option<usize>,
    pub domain_halfwidth: Option<f64>,
    pub richardson: Option<bool>,
    pub stencil: Option<StencilArg>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub nmax: usize,
    pub quadrature: QuadratureSpec,
    pub solver: ReferenceSolver,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub dump_basis: Option<PathBuf>,
}

impl RunConfig {
    pub fn potential(&self) -> Result<Potential, CliError> {
        Potential::try_from(self.potential.clone()).map_err(CliError::Core)
    }
}

fn missing(what: &str, kind: &str) -> CliError {
    CliError::Config(format!("--{what} is required for --potential {kind}"))
}

fn resolve_potential(args: &RunArgs, base: Option<PotentialSpec>) -> Result<PotentialSpec, CliError> {
    let kind = match (args.potential, &base) {
        (Some(k), _) => k,
        (None, Some(PotentialSpec::Harmonic { .. })) => Kind::Ho,
        (None, Some(PotentialSpec::QuarticAnharmonic { .. })) => Kind::Aho,
        (None, Some(PotentialSpec::EvenPolynomial { .. })) => Kind::EvenPoly,
        (None, None) => {
            return Err(CliError::Config("no potential given; use --potential, --preset or --config".into()))
        }
    };
    let (b_omega, b_lambda, b_coeffs, b_xi) = match base {
        Some(PotentialSpec::Harmonic { omega, xi }) => (Some(omega), None, None, Some(xi)),
        Some(PotentialSpec::QuarticAnharmonic { omega, lambda, xi }) => (Some(omega), Some(lambda), None, Some(xi)),
        Some(PotentialSpec::EvenPolynomial { coeffs, xi }) => (None, None, Some(coeffs), Some(xi)),
        None => (None, None, None, None),
    };
    let xi = args.xi.or(b_xi).unwrap_or(0.0);
    let omega = args.omega.or(b_omega).unwrap_or(1.0);
    Ok(match kind {
        Kind::Ho => PotentialSpec::Harmonic { omega, xi },
        Kind::Aho => PotentialSpec::QuarticAnharmonic {
            omega,
            lambda: args.lambda.or(b_lambda).ok_or_else(|| missing("lambda", "aho"))?,
            xi,
        },
        Kind::EvenPoly => PotentialSpec::EvenPolynomial {
            coeffs: args.coeffs.clone().or(b_coeffs).ok_or_else(|| missing("coeffs", "even_poly"))?,
            xi,
        },
    })
}

/// Merges file config, preset and flags (in increasing priority).
pub fn resolve(args: &RunArgs, default_format: Format) -> Result<RunConfig, CliError> {
    let file = match &args.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    // a preset flag beats a potential from the file; a file potential beats a file preset
    let base = match (args.preset, &file.potential) {
        (Some(p), _) => Some(p.spec()),
        (None, Some(spec)) => Some(spec.clone()),
        (None, None) => file.preset.map(Preset::spec),
    };
    let potential = resolve_potential(args, base)?;

    let nmax = args.nmax.or(file.nmax).unwrap_or(5);
    if nmax > MAX_DEGREE {
        return Err(CliError::Config(format!("--nmax must be at most {MAX_DEGREE}, got {nmax}")));
    }
    let mut quadrature = QuadratureSpec::default();
    if let Some(t) = args.rel_tol.or(file.rel_tol) {
        quadrature = quadrature.with_rel_tol(t);
    }
    if let Some(t) = args.abs_tol.or(file.abs_tol) {
        quadrature = quadrature.with_abs_tol(t);
    }
    quadrature.validate().map_err(|e| CliError::Config(e.to_string()))?;

    let solver = ReferenceSolver {
        half_width: args.domain_halfwidth.or(file.domain_halfwidth),
        grid_points: args.grid_points.or(file.grid_points),
        stencil: args.stencil.or(file.stencil).map_or(Stencil::Fourth, Stencil::from),
        richardson: !args.no_richardson && file.richardson.unwrap_or(true),
    };
    Ok(RunConfig {
        potential,
        nmax,
        quadrature,
        solver,
        format: args.format.or(file.format).unwrap_or(default_format),
        output: args.output.clone().or(file.output),
        dump_basis: args.dump_basis.clone(),
    })
}
