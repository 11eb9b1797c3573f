//! Quantum polylogarithms and their relatives.
//!
//! Three numeric backends (direct series, shifted-contour quadrature, companion
//! series) cross-check each other; an exact layer over `Q[i, pi, 1/pi]` provides
//! the `Q_m` and quantum Bernoulli polynomials; [`identities`] turns every
//! relation between them into [`types::CheckReport`]s.

pub mod cli;
pub mod closed_form;
pub mod contour;
pub mod conventions;
pub mod error;
pub mod exact;
pub mod identities;
pub mod numeric;
pub mod report;
pub mod series;
pub mod tolerances;
pub mod types;

pub use error::{Error, Result};
pub use types::{Backend, CheckReport, Diagnostics, EvalResult, HbarValue, MultiIndex, C64};
