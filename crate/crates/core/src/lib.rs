//! Tridiagonal-representation solver for the hyperbolic single-wave
//! potential `U(ξ) = C (tanh ξ + γ) sech² ξ`.
//!
//! All quantities are dimensionless: `ξ = λx`, `ε = E/E₀`, `U = V/E₀` with
//! `E₀ = (λħ)²/2m`. The crate is `no_std` (it needs `alloc`); file formats
//! and the command-line tool live in the `hyperwave` crate.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

mod math;

pub mod boundstate;
pub mod eigen;
pub mod error;
pub mod oracle;
pub mod polyeval;
pub mod potential;
pub mod quadrature;
pub mod spectra;
pub mod waveop;

pub use error::{Error, Result};
pub use potential::PotentialParams;
pub use waveop::{Branch, TridiagMatrix};
