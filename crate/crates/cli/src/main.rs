//! `virial`: tables, curve data and invariant checks for the virial ansatz.

mod config;
mod verify;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use virial_ansatz::spectrum::{self, CurveTable, SpectrumReport};
use virial_ansatz::{reference, Error};

use config::{Format, Preset, RunArgs, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Core(Error::InvalidArgument(_)) => 2,
            CliError::Core(Error::ConvexityViolation(_)) => 3,
            CliError::Core(_) | CliError::Io(_) => 4,
            CliError::Verify(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "virial", version, about = "Virial ansatz energies and eigenfunctions for 1-D convex potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ansatz vs reference energies
    Table(RunArgs),
    /// Ansatz and reference eigenfunctions on a uniform grid
    Curves(CurveArgs),
    /// Check the construction invariants
    Verify(RunArgs),
    /// Energy tables for all six built-in presets
    Sweep(RunArgs),
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, allow_hyphen_values = true)]
    xmin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xmax: Option<f64>,
    #[arg(long, default_value_t = 201)]
    points: usize,
}

fn emit(cfg_output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match cfg_output {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render_report(report: &SpectrumReport, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Csv => report.to_csv(),
        Format::Json => to_json(report)?,
        Format::Pretty => report.to_pretty(),
    })
}

fn dump_basis(cfg: &RunConfig, basis: &virial_ansatz::OrthoBasis) -> Result<(), CliError> {
    if let Some(path) = &cfg.dump_basis {
        std::fs::write(path, to_json(&basis.dump())?)?;
    }
    Ok(())
}

fn table(cfg: &RunConfig) -> Result<SpectrumReport, CliError> {
    let p = cfg.potential()?;
    p.ensure_strictly_convex()?;
    let basis = spectrum::build_basis(&p, cfg.nmax, &cfg.quadrature)?;
    dump_basis(cfg, &basis)?;
    let reference = reference::solve(&p, cfg.nmax, &cfg.solver)?;
    Ok(spectrum::report_from_parts(&basis, &reference, &cfg.quadrature)?)
}

fn cmd_table(args: &RunArgs) -> Result<(), CliError> {
    let cfg = config::resolve(args, Format::Csv)?;
    let report = table(&cfg)?;
    emit(cfg.output.as_deref(), &render_report(&report, cfg.format)?)
}

fn cmd_curves(args: &CurveArgs) -> Result<(), CliError> {
    let cfg = config::resolve(&args.run, Format::Csv)?;
    let p = cfg.potential()?;
    p.ensure_strictly_convex()?;
    let basis = spectrum::build_basis(&p, cfg.nmax, &cfg.quadrature)?;
    dump_basis(&cfg, &basis)?;
    let reference = reference::solve(&p, cfg.nmax, &cfg.solver)?;
    let half = basis.weight().half_width().min(reference.half_width);
    let xmin = args.xmin.unwrap_or(p.xi() - half);
    let xmax = args.xmax.unwrap_or(p.xi() + half);
    let curves = CurveTable::sample(&basis, &reference, xmin, xmax, args.points)?;
    let text = match cfg.format {
        Format::Json => to_json(&curves)?,
        Format::Csv | Format::Pretty => curves.to_csv(),
    };
    emit(cfg.output.as_deref(), &text)
}

fn cmd_verify(args: &RunArgs) -> Result<(), CliError> {
    let cfg = config::resolve(args, Format::Pretty)?;
    let p = cfg.potential()?;
    let summary = verify::run(&p, cfg.nmax, &cfg.quadrature)?;
    let text = match cfg.format {
        Format::Json => to_json(&summary)?,
        Format::Csv | Format::Pretty => summary.to_text(),
    };
    emit(cfg.output.as_deref(), &text)?;
    if summary.passed() {
        Ok(())
    } else {
        Err(CliError::Verify(summary.failing().join(", ")))
    }
}

#[derive(Debug, Serialize)]
struct SweepEntry<'a> {
    preset: &'a str,
    report: &'a SpectrumReport,
}

fn cmd_sweep(args: &RunArgs) -> Result<(), CliError> {
    let configs = Preset::ALL
        .iter()
        .map(|&preset| {
            let mut a = args.clone();
            a.preset = Some(preset);
            a.potential = None;
            a.dump_basis = None;
            config::resolve(&a, Format::Csv).map(|c| (preset, c))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<(Preset, SpectrumReport)> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|(preset, cfg)| (*preset, s.spawn(move || table(cfg)))).collect();
        handles
            .into_iter()
            .map(|(preset, h)| h.join().expect("sweep worker panicked").map(|r| (preset, r)))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let format = configs[0].1.format;
    let text = match format {
        Format::Csv => {
            let mut out = format!("preset,{}\n", SpectrumReport::CSV_HEADER);
            for (preset, report) in &reports {
                for line in report.to_csv().lines().skip(1) {
                    out.push_str(preset.name());
                    out.push(',');
                    out.push_str(line);
                    out.push('\n');
                }
            }
            out
        }
        Format::Json => {
            let entries: Vec<SweepEntry> =
                reports.iter().map(|(preset, report)| SweepEntry { preset: preset.name(), report }).collect();
            to_json(&entries)?
        }
        Format::Pretty => reports
            .iter()
            .map(|(preset, report)| format!("[{}]\n{}", preset.name(), report.to_pretty()))
            .collect::<Vec<_>>()
            .join("\n"),
    };
    emit(configs[0].1.output.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Table(args) => cmd_table(args),
        Command::Curves(args) => cmd_curves(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("virial: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
