//! Numerical core for SLE(κ;ρ̲): Loewner dynamics in half-plane and strip
//! coordinates, closed-form CFT quantities, left-passage quadrature, Monte
//! Carlo martingale checks, and finite-level Verma-module linear algebra.
//!
//! The crate is `no_std`-compatible (with `alloc`); the default `std`
//! feature only selects the platform math intrinsics over `libm` and enables
//! `std::error::Error` for [`Error`].

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cft;
pub mod chordal;
pub mod strip;
pub mod error;
pub mod math;
pub mod observables;
pub mod quad;
pub mod rng;
pub mod virasoro;

pub use error::{Error, Result};
pub use num_complex::Complex64;
