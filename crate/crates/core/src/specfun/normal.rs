use crate::error::{Error, Result};
use libm::{exp, log, sqrt};

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_939_946_059_934_381_9;

/// Below this magnitude Φ and Q come from the odd power series, above it
/// from the Mills-ratio continued fraction.
const SERIES_LIMIT: f64 = 3.0;

pub fn std_normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * exp(-0.5 * x * x)
}

/// Σ x^(2k+1) / (1·3·…·(2k+1)); all terms share the sign of x.
fn odd_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut denom = 1.0;
    while term.abs() > sum.abs() * 1e-17 {
        denom += 2.0;
        term *= x2 / denom;
        sum += term;
    }
    sum
}

/// Q(x) for x ≥ 3 by modified Lentz evaluation of
/// φ(x) / (x + 1/(x + 2/(x + 3/(x + …)))).
fn upper_tail_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = n as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    std_normal_pdf(x) / f
}

/// Φ(x), the standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() < SERIES_LIMIT {
        0.5 + std_normal_pdf(x) * odd_series(x)
    } else if x > 0.0 {
        1.0 - upper_tail_cf(x)
    } else {
        upper_tail_cf(-x)
    }
}

/// Q(x) = 1 − Φ(x), accurate in relative terms deep into the upper tail.
pub fn std_normal_tail(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() < SERIES_LIMIT {
        0.5 - std_normal_pdf(x) * odd_series(x)
    } else if x > 0.0 {
        upper_tail_cf(x)
    } else {
        1.0 - upper_tail_cf(-x)
    }
}

/// Q⁻¹(p): the x with Q(x) = p.
///
/// Safeguarded Newton iteration inside a bisection bracket, started from the
/// Abramowitz–Stegun 26.2.23 rational guess.
pub fn std_normal_tail_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("tail probability", p));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    if p > 0.5 {
        return Ok(-upper_quantile(1.0 - p));
    }
    Ok(upper_quantile(p))
}

/// Φ⁻¹(p) = −Q⁻¹(p).
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    std_normal_tail_inv(p).map(|x| -x)
}

/// Solves Q(x) = p for 0 < p < 1/2, so x > 0.
fn upper_quantile(p: f64) -> f64 {
    let t = sqrt(-2.0 * log(p));
    let mut x = t
        - (2.515_517 + 0.802_853 * t + 0.010_328 * t * t)
            / (1.0 + 1.432_788 * t + 0.189_269 * t * t + 0.001_308 * t * t * t);
    // Q(lo) > p > Q(hi)
    let mut lo = 0.0_f64;
    let mut hi = 40.0_f64;
    x = x.clamp(lo, hi);
    for _ in 0..200 {
        let q = std_normal_tail(x);
        let residual = q - p;
        if residual > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if residual == 0.0 {
            return x;
        }
        let density = std_normal_pdf(x);
        let mut next = x + residual / density;
        if !(next > lo && next < hi) || density == 0.0 {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) || hi - lo <= 1e-15 * hi {
            return next;
        }
        x = next;
    }
    x
}
