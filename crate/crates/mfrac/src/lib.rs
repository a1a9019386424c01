//! Simulation of multifractional Gaussian processes and estimation of their
//! time-varying pointwise Hölder exponent (PHE).
//!
//! The crate provides:
//!
//! * [`increments`] — vanishing-moment sequences and generalized increments;
//! * [`sim`] — Bm/fBm/mBm synthesis by circulant embedding, the transform
//!   catalog `Phi(t, X(t))`, and exact-covariance oracles;
//! * [`estimate`] — the LGQV, classic GQV and oscillation PHE estimators;
//! * [`theory`] — closed-form and quadrature oracles for increment
//!   variances and covariances;
//! * [`bench`] — the Monte-Carlo RMSE benchmark harness;
//! * [`findata`] — financial CSV ingestion and the empirical pipeline
//!   (alignment, rescaling, burn-in, period summaries, Welch tests).
//!
//! All randomness flows from explicit seeds through labelled ChaCha streams
//! ([`seed`]), so every result is reproducible bit-for-bit regardless of
//! parallelism.

pub mod bench;
pub mod error;
pub mod estimate;
pub mod findata;
pub mod holder;
pub mod increments;
pub mod path;
pub mod quad;
pub mod seed;
pub mod sim;
pub mod theory;

pub use error::{Error, Result};
pub use holder::HolderFunction;
pub use path::{PathMeta, SamplePath};
