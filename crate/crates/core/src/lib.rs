//! Simulation of the importance-weighted risk estimator under covariate shift.
//!
//! The crate reproduces a one-dimensional covariate-shift problem (Gaussian
//! source and target marginals sharing a probit posterior) and studies how the
//! importance-weighted risk estimator behaves across repeated small datasets:
//! its unbiasedness, its sampling variance and skewness, and how the skew
//! distorts selection of a regularization parameter.
//!
//! Modules, bottom-up:
//!
//! - [`domain`]: densities, the shared posterior and exact importance weights.
//! - [`sampling`]: seeded dataset generation (ancestral and rejection).
//! - [`risk`]: the linear classifier, quadratic loss and empirical risks.
//! - [`analytic`]: quadrature oracles for the estimator's population moments.
//! - [`stats`]: sample moments, histograms and the body/tail split.
//! - [`selection`]: regularization-parameter selection.
//! - [`experiments`]: the three repetition experiments.
//! - [`output`], [`svg`], [`cli`]: reports and the command-line front end.

pub mod analytic;
pub mod cli;
pub mod domain;
mod error;
pub mod experiments;
pub mod output;
pub mod quadrature;
pub mod risk;
pub mod sampling;
pub mod selection;
pub mod stats;
pub mod svg;

pub use error::{Error, Result};
