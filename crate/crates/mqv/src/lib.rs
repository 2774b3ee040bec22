//! Numerical toolkit for preparing, evolving and verifying the Gaussian quantum state
//! of a continuously measured mechanical oscillator.
//!
//! Pipeline: [`preparation`] builds the conditional covariance, [`evolution`] carries it
//! through a period of free thermal evolution, and [`verification`] adds the noise of an
//! optimal back-action-evading readout. [`wiener_hopf`] solves the filter equations in
//! general, [`tomography`] reconstructs Wigner functions on a grid and [`entanglement`]
//! handles the two-mirror case.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entanglement;
pub mod error;
pub mod evolution;
pub mod gaussian;
pub mod params;
pub mod preparation;
pub mod quadrature;
pub mod tomography;
pub mod verification;
pub mod wiener_hopf;

pub use error::{Error, Result};
pub use gaussian::{Cov2, GaussianState, NoiseEllipse};
pub use params::{DerivedScales, NoiseBudget};
