//! Attenuation and false-correlation analysis for proxy measurement
//! instruments.
//!
//! A detector whose output `û` correlates `q` with a ground-truth vector `u`
//! lies somewhere on `T^n(q)`, an `(n-3)`-sphere of standardized vectors.
//! When `û` replaces `u` in a downstream correlation with `v`, the expected
//! result shrinks from `r` to `q·r`, and for small `n` the sample correlation
//! can even take the wrong sign. This crate computes those quantities
//! exactly, marginalizes them over the sampling distribution of `q̂`, checks
//! them by Monte Carlo, and measures how well an ensemble of detectors
//! covers `T^n`.

pub mod cli;
pub mod coverage;
pub mod error;
pub mod false_corr;
pub mod geometry;
pub mod io;
pub mod mc;
pub mod quadrature;
pub mod rng;
pub mod soper;
pub mod special;
pub mod synth;
pub mod tsphere;

pub use error::{Error, Result};
pub use geometry::{build_basis, pearson, standardize, tail_coordinates, CorrelationValue, NormalizedVector, OrthonormalBasis};
