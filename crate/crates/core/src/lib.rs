//! Parameter-free virial ansatz eigenfunctions and energies for the 1-D
//! Schrödinger equation `[-1/2 d^2/dx^2 + U(x)] psi = E psi` with a symmetric
//! strictly convex potential `U`, plus a finite-difference reference solver
//! to compare them against.
//!
//! The pipeline is
//! [`Potential`] → [`GFunction`] → [`VirialWeight`] → [`OrthoBasis`] →
//! [`AnsatzState`] energies → [`SpectrumReport`].

// NaN-rejecting `!(x > 0.0)` guards and published quadrature digits are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop)]

pub mod banded;
pub mod error;
pub mod orthopoly;
pub mod potential;
pub mod quadrature;
pub mod reference;
pub mod spectrum;
pub mod weight;

pub use error::{Error, Result};
pub use orthopoly::{OrthoBasis, RecurrenceStep};
pub use potential::{ConvexityReport, LeadingOrder, Potential, PotentialKind, PotentialSpec};
pub use quadrature::{Interval, QuadratureSpec};
pub use reference::{ReferenceSolution, ReferenceSolver, Stencil};
pub use spectrum::{AnsatzState, CurveTable, ReportRow, SpectrumReport};
pub use weight::{GFunction, GMode, VirialWeight};
