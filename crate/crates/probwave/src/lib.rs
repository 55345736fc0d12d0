//! Probability-wave models for cumulative observables over a reinforcement
//! range.
//!
//! The library implements a one-dimensional singular eigenproblem of the form
//!
//! ```text
//! beta * (y psi'' + psi') + [E - U(y)] psi = 0,     U(y) = a_tt |y|,
//! ```
//!
//! posed on the shifted coordinate `y = q - q0`, together with the reference
//! Schrödinger problem `-beta_s psi'' + a_tt |x| psi = E psi` for the same
//! V-shaped potential. Two closed-form solution families are provided
//! (zero-order Bessel and terminating Kummer), plus shooting eigensolvers,
//! a distribution-fitting pipeline for intraday volume-price data, synthetic
//! data generation, and deterministic JSON/CSV report export.
//!
//! Modules:
//!
//! - [`specfun`]: scalar special functions (J0, J1, Kummer polynomials, Airy)
//!   and bisection root finding.
//! - [`wavemodel`]: closed-form wave families, the ODE residual operator,
//!   discrete normalization, and the interaction-conservation diagnostic.
//! - [`eigensolve`]: shooting eigensolvers for both worlds and the spectrum
//!   comparison table.
//! - [`fitkit`]: nonlinear least-squares fitting, goodness of fit, and
//!   AIC-based model selection.
//! - [`dataio`]: trade ingestion, distribution building, synthetic sampling,
//!   and report export.
//! - [`acceptance`]: the end-to-end verification suite run by `probwave
//!   verify` and by the `acceptance` integration test target.
//!
//! ```
//! use probwave::dataio::generate_synthetic;
//! use probwave::fitkit::{select_model, FitOptions};
//! use probwave::wavemodel::{Family, Grid, WaveModel};
//!
//! // Draw a volume profile from a Bessel model and identify it back.
//! let grid = Grid::uniform(99.0, 0.01, 201)?;
//! let model = WaveModel::bessel(100.0, 2.0, 1.0)?;
//! let dist = generate_synthetic(&model, &grid, 20_000, 1)?;
//! let ranked = select_model(&dist, &FitOptions::default())?;
//! assert_eq!(ranked[0].model.family(), Family::BesselJ0);
//! # Ok::<(), probwave::Error>(())
//! ```

// `!(x > 0.0)` in validations is NaN-rejecting on purpose; `x <= 0.0` lets
// NaN through. Full-precision literals are kept for the frozen constants.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod acceptance;
pub mod dataio;
pub mod eigensolve;
mod error;
pub mod fitkit;
pub mod specfun;
pub mod wavemodel;

pub use error::{Error, Result};
