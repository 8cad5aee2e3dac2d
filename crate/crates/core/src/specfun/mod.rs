//! Scalar special functions: the standard normal law, the regularized
//! incomplete gamma and beta functions for integer parameters, and their
//! inverses.

mod beta;
mod gamma;
mod normal;

pub use beta::{reg_incomplete_beta, reg_incomplete_beta_complement};
pub use gamma::{gamma_cdf, gamma_cdf_inv, gamma_pdf, gamma_sf, gamma_sf_inv, ln_factorial};
pub use normal::{
    std_normal_cdf, std_normal_pdf, std_normal_quantile, std_normal_tail, std_normal_tail_inv,
};

use crate::error::{Error, Result};
use core::fmt;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain("probability", value))
        }
    }

    /// Requires `0 < value < 1`, the domain of every design target.
    pub fn open(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Probability(value))
        } else {
            Err(Error::domain("probability in (0, 1)", value))
        }
    }

    /// Clamps round-off excursions of a computed probability back into range.
    pub(crate) fn saturating(value: f64) -> Self {
        if value.is_nan() {
            return Probability(f64::NAN);
        }
        Probability(value.clamp(0.0, 1.0))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// `1 - p`.
    pub fn complement(self) -> Self {
        Probability(1.0 - self.0)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}
