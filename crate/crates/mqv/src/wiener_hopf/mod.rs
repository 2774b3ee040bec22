//! Rational-spectrum machinery and the optimal-filter solver built on it.

pub mod factorize;
pub mod poly;
pub mod solve;
pub mod spectrum;
pub mod split;

pub use factorize::spectral_factorize;
pub use solve::{solve_optimal_filters, WHSolution, FREE_MASS_DAMPING};
pub use spectrum::{Constellation, HalfPlane, PartialFractions, Pole, RationalSpectrum};
pub use split::{causal_split, inverse_transform, CausalSplit, TimeSeries};
