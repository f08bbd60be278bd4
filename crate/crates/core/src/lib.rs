//! Binary embeddings of spherical data into the Hamming cube, built from
//! Gaussian circulant matrices and fast Johnson-Lindenstrauss transforms,
//! together with a seeded Monte Carlo laboratory that verifies the variance
//! and covariance behavior of every construction.

pub mod bench;
pub mod bitcode;
pub mod dense;
pub mod embed;
pub mod error;
mod fft;
pub mod jl;
pub mod metrics;
pub mod params;
pub mod points;
pub mod rng;
pub mod statlab;
pub mod suites;
pub mod transforms;

pub use error::{Error, Result};
