//! Capacity per unit energy of peak-constrained Rayleigh flat-fading
//! channels, computed from the fading power spectral density.
//!
//! * [`spectra`]: fading models (density and autocorrelation).
//! * [`capacity`]: `C_p(P)`, `I(P)`, the fourthegy bound `U_p(P)`, closed
//!   forms and per-unit-time bounds.
//! * [`toeplitz`]: brute-force verification engine (log-determinants,
//!   linear prediction, ON-OFF subset functional, coherent divergence).
//! * [`sampling`]: continuous-to-discrete reduction by dyadic sampling.
//!
//! Everything is generic over the scalar type ([`Real`], `f32` or `f64`);
//! the aliases below fix it to `f64`.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod capacity;
pub mod error;
pub mod quadrature;
pub mod real;
pub mod sampling;
pub mod spectra;
pub mod toeplitz;

pub use capacity::{CapacityResult, Extended, LimitConvention, TimeBounds};
pub use error::{Error, Result};
pub use quadrature::{Integral, Quadrature};
pub use real::Real;
pub use sampling::SamplingLimit;
pub use spectra::{ModelKind, SpectralModel, SpectralTable, Support, TimeDomain};
pub use toeplitz::{PredictionTrace, SubsetMinimum, SupportSet, ToeplitzGram};

pub type Spectrum = SpectralModel<f64>;
pub type Table = SpectralTable<f64>;
pub type Capacity = CapacityResult<f64>;
pub type Bounds = TimeBounds<f64>;
pub type Gram = ToeplitzGram<f64>;
pub type Trace = PredictionTrace<f64>;
pub type Sampled = SamplingLimit<f64>;
