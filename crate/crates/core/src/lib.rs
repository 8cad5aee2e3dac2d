//! Detection analysis of a multi-antenna covert random-access link.
//!
//! The legitimate receiver detects frame arrival with a data-aided statistic
//! built from a known constant-modulus reference sequence, while a warden runs
//! a radiometer over the whole frame. This crate evaluates the closed-form
//! operating points of both detectors ([`analytic`]) and checks them against a
//! sample-level Rayleigh-fading simulation ([`montecarlo`]). Everything here is
//! `no_std` + `alloc`; IO and the parallel trial engine live in `covert-harness`.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
pub use specfun::Probability;
