//! Verified-numerics toolkit for reciprocal-sum tails of Horadam
//! (generalized Fibonacci) subsequences.
//!
//! Computes T(n) = sum_{k>=n} s_k / W_{mk+l}^d to rigorous precision,
//! evaluates the closed-form asymptotic estimates of T(n)^{-1}, and provides
//! a harness that measures convergence of the estimates against the tails.

pub mod binet;
pub mod error;
pub mod estimate;
pub mod harness;
pub mod params;
pub mod real;
pub mod seq;
pub mod tail;
pub mod validate;

pub use error::Error;
pub use params::{Preset, SequenceParams, SubseqQuery};
pub use real::Real;
