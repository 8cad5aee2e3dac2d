//! Closed-form operating points of the receiver's reference-sequence detector
//! and the warden's radiometer.
//!
//! Both detectors are set from a common false-alarm target. The receiver's
//! missed-detection probability is a one-dimensional integral over the channel
//! energy `z ~ Gamma(M, 1)`:
//!
//! ```text
//! f_M(x) = ∫_0^∞ z^(M−1) e^(−z) / (M−1)! · Φ((a·x − z) / √(2·x·z)) dz,   x = 1/(ρ·N_RS)
//! ```
//!
//! with `a = F⁻¹(1 − P_FA; M) − M`. Inverting `f_M` gives the smallest
//! transmit power meeting a missed-detection target, and with it the warden's
//! detection probability as a function of frame length and antenna count.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::specfun::{
    gamma_pdf, gamma_sf, gamma_sf_inv, std_normal_cdf, std_normal_quantile, std_normal_tail,
    std_normal_tail_inv, Probability,
};
use libm::{exp, sqrt};

const QUAD_ABS_TOL: f64 = 1e-10;
const QUAD_MAX_PANELS: usize = 4000;

/// Scenario scalars shared by both receivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    n_total: u32,
    n_rs: u32,
    m_antennas: u32,
    noise_power: f64,
    tx_power: f64,
}

impl SystemParams {
    pub fn new(n_total: u32, n_rs: u32, m_antennas: u32, noise_power: f64, tx_power: f64) -> Result<Self> {
        if n_rs == 0 || n_rs > n_total {
            return Err(Error::domain("reference length", f64::from(n_rs)));
        }
        if m_antennas == 0 {
            return Err(Error::domain("antenna count", 0.0));
        }
        if !(noise_power > 0.0 && noise_power.is_finite()) {
            return Err(Error::domain("noise power", noise_power));
        }
        if !(tx_power >= 0.0 && tx_power.is_finite()) {
            return Err(Error::domain("transmit power", tx_power));
        }
        Ok(SystemParams { n_total, n_rs, m_antennas, noise_power, tx_power })
    }

    /// Builds the parameters from a training proportion; `alpha · n_total`
    /// must be an integer.
    pub fn with_alpha(n_total: u32, alpha: f64, m_antennas: u32, noise_power: f64, tx_power: f64) -> Result<Self> {
        let n_rs = reference_length(n_total, alpha)?;
        Self::new(n_total, n_rs, m_antennas, noise_power, tx_power)
    }

    pub fn n_total(&self) -> u32 {
        self.n_total
    }

    pub fn n_rs(&self) -> u32 {
        self.n_rs
    }

    pub fn m_antennas(&self) -> u32 {
        self.m_antennas
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    /// α = N_RS / N.
    pub fn alpha(&self) -> f64 {
        f64::from(self.n_rs) / f64::from(self.n_total)
    }

    /// ρ = P_T / σ_n².
    pub fn snr(&self) -> f64 {
        self.tx_power / self.noise_power
    }

    /// Per-sample variance at the warden under H1, σ_w² = P_T + σ_n².
    pub fn warden_variance(&self) -> f64 {
        self.tx_power + self.noise_power
    }

    pub fn with_tx_power(self, tx_power: f64) -> Result<Self> {
        Self::new(self.n_total, self.n_rs, self.m_antennas, self.noise_power, tx_power)
    }

    pub fn with_noise_power(self, noise_power: f64) -> Result<Self> {
        Self::new(self.n_total, self.n_rs, self.m_antennas, noise_power, self.tx_power)
    }
}

/// `alpha · n_total` as an integer reference length.
pub fn reference_length(n_total: u32, alpha: f64) -> Result<u32> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain("training proportion", alpha));
    }
    let exact = alpha * f64::from(n_total);
    let rounded = libm::round(exact);
    if (exact - rounded).abs() > 1e-9 * exact.max(1.0) || rounded < 1.0 {
        return Err(Error::domain("alpha * n_total (must be a positive integer)", exact));
    }
    Ok(rounded as u32)
}

/// Receiver threshold η_B together with a saturation marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobThreshold {
    pub eta: f64,
    /// Set when η_B ≥ 1: the statistic never exceeds the threshold, so the
    /// receiver misses every frame.
    pub saturated: bool,
}

/// Detector operating points derived from one false-alarm target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub eta_b: f64,
    pub eta_w: f64,
    pub target_fap: Probability,
    pub eta_b_saturated: bool,
}

impl Thresholds {
    pub fn design(p_fa: Probability, m: u32, n_rs: u32, n_total: u32) -> Result<Self> {
        let bob = bob_threshold(p_fa, m, n_rs)?;
        let eta_w = willie_threshold(p_fa, m, n_total)?;
        Ok(Thresholds { eta_b: bob.eta, eta_w, target_fap: p_fa, eta_b_saturated: bob.saturated })
    }
}

/// Shape of the missed-detection integrand,
/// `Φ((a_shift·x_arg − z) / √(2·x_arg·z))` weighted by the Gamma(M, 1) density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MdpIntegrandParams {
    pub a_shift: f64,
    pub x_arg: f64,
    pub m_antennas: u32,
}

impl MdpIntegrandParams {
    /// Φ factor at channel energy `z`; the z = 0 value is the one-sided limit.
    pub fn phi_factor(&self, z: f64) -> f64 {
        let y = self.a_shift * self.x_arg - z;
        if z <= 0.0 {
            return if y > 0.0 {
                1.0
            } else if y < 0.0 {
                0.0
            } else {
                0.5
            };
        }
        std_normal_cdf(y / sqrt(2.0 * self.x_arg * z))
    }

    pub fn integrand(&self, z: f64) -> f64 {
        gamma_pdf(z, self.m_antennas) * self.phi_factor(z)
    }

    /// Upper limit beyond which the Gamma(M, 1) mass is below 1e-14.
    pub fn z_max(&self) -> f64 {
        let m = f64::from(self.m_antennas);
        m + 12.0 * sqrt(m) + 40.0
    }

    pub fn integrate(&self) -> Result<Probability> {
        if !(self.x_arg > 0.0) {
            return Err(Error::domain("integrand scale x", self.x_arg));
        }
        let top = self.z_max();
        let step = self.a_shift * self.x_arg;
        let r = quadrature::integrate(|z| self.integrand(z), 0.0, top, &[step], QUAD_ABS_TOL, QUAD_MAX_PANELS)?;
        Ok(Probability::saturating(r.value))
    }
}

fn check_open(p: Probability, what: &'static str) -> Result<()> {
    if p.get() > 0.0 && p.get() < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(what, p.get()))
    }
}

/// a = F⁻¹(1 − P_FA; M) − M.
pub fn mdp_shift(p_fa: Probability, m: u32) -> Result<f64> {
    check_open(p_fa, "false-alarm target")?;
    Ok(gamma_sf_inv(p_fa.get(), m)? - f64::from(m))
}

/// η_B = F⁻¹(1 − P_FA; M) / (M·N_RS).
pub fn bob_threshold(p_fa: Probability, m: u32, n_rs: u32) -> Result<BobThreshold> {
    check_open(p_fa, "false-alarm target")?;
    if n_rs == 0 {
        return Err(Error::domain("reference length", 0.0));
    }
    let eta = gamma_sf_inv(p_fa.get(), m)? / (f64::from(m) * f64::from(n_rs));
    Ok(BobThreshold { eta, saturated: eta >= 1.0 })
}

/// 1 − F(η_B·M·N_RS; M).
pub fn bob_fap(eta_b: f64, m: u32, n_rs: u32) -> Result<Probability> {
    if !(eta_b > 0.0) {
        return Err(Error::domain("receiver threshold", eta_b));
    }
    Ok(Probability::saturating(gamma_sf(eta_b * f64::from(m) * f64::from(n_rs), m)?))
}

fn check_mdp_args(eta_b: f64, rho: f64, n_rs: u32) -> Result<()> {
    if !(eta_b > 0.0) {
        return Err(Error::domain("receiver threshold", eta_b));
    }
    if !(rho > 0.0) {
        return Err(Error::domain("snr", rho));
    }
    if n_rs == 0 {
        return Err(Error::domain("reference length", 0.0));
    }
    Ok(())
}

/// Receiver missed-detection probability at threshold `eta_b` and SNR `rho`.
///
/// The threshold enters through `y(z) = (M/ρ)(η_B − 1/N_RS) − z` and
/// `V(z) = 2z/(ρ·N_RS)`, i.e. the reduced form in which the receiver MDP at
/// the false-alarm-designed threshold is exactly `f_M(1/(ρ·N_RS))`. See
/// [`bob_mdp_scaled`] for the form that keeps the `(1 − η_B)` factors.
pub fn bob_mdp(eta_b: f64, rho: f64, m: u32, n_rs: u32) -> Result<Probability> {
    check_mdp_args(eta_b, rho, n_rs)?;
    if eta_b >= 1.0 {
        return Ok(Probability::ONE);
    }
    let mf = f64::from(m);
    MdpIntegrandParams {
        a_shift: eta_b * mf * f64::from(n_rs) - mf,
        x_arg: 1.0 / (rho * f64::from(n_rs)),
        m_antennas: m,
    }
    .integrate()
}

/// Receiver missed-detection probability with
/// `y(z) = (M/ρ)(η_B − 1/N_RS) − (1 − η_B)z` and
/// `V(z) = 2(1 − η_B)²z/(ρ·N_RS)`.
///
/// Dividing through by `(1 − η_B)` shows this is the [`bob_mdp`] integral with
/// the shift scaled by `1/(1 − η_B)`.
pub fn bob_mdp_scaled(eta_b: f64, rho: f64, m: u32, n_rs: u32) -> Result<Probability> {
    check_mdp_args(eta_b, rho, n_rs)?;
    if eta_b >= 1.0 {
        return Ok(Probability::ONE);
    }
    let mf = f64::from(m);
    MdpIntegrandParams {
        a_shift: (eta_b * mf * f64::from(n_rs) - mf) / (1.0 - eta_b),
        x_arg: 1.0 / (rho * f64::from(n_rs)),
        m_antennas: m,
    }
    .integrate()
}

/// f_M(x) at the false-alarm target `p_fa`.
pub fn f_m(x: f64, m: u32, p_fa: Probability) -> Result<Probability> {
    if !(x > 0.0) {
        return Err(Error::domain("f_M argument", x));
    }
    MdpIntegrandParams { a_shift: mdp_shift(p_fa, m)?, x_arg: x, m_antennas: m }.integrate()
}

/// x with f_M(x) = p_md, found by doubling an upper bracket from 1 and then
/// bisecting down to 1e-12 relative width.
pub fn f_m_inv(p_md: Probability, m: u32, p_fa: Probability) -> Result<f64> {
    check_open(p_md, "missed-detection target")?;
    let a_shift = mdp_shift(p_fa, m)?;
    let eval = |x: f64| MdpIntegrandParams { a_shift, x_arg: x, m_antennas: m }.integrate().map(Probability::get);
    let target = p_md.get();

    let mut lo = 1e-12_f64;
    if eval(lo)? > target {
        return Err(Error::Unrepresentable { target, limit: lo });
    }
    let mut hi = 1.0_f64;
    const LIMIT: f64 = (1u64 << 60) as f64;
    while eval(hi)? <= target {
        lo = lo.max(hi);
        hi *= 2.0;
        if hi > LIMIT {
            return Err(Error::Unrepresentable { target, limit: LIMIT });
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = if hi > 4.0 * lo { sqrt(lo * hi) } else { 0.5 * (lo + hi) };
        if eval(mid)? > target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Smallest transmit power meeting `p_md` at the receiver:
/// σ_n² / (f_M⁻¹(P_MD)·N_RS).
pub fn min_transmit_power(p_md: Probability, p_fa: Probability, m: u32, n_rs: u32, noise_power: f64) -> Result<f64> {
    if !(noise_power >= 0.0) {
        return Err(Error::domain("noise power", noise_power));
    }
    if n_rs == 0 {
        return Err(Error::domain("reference length", 0.0));
    }
    let x = f_m_inv(p_md, m, p_fa)?;
    Ok(noise_power / (x * f64::from(n_rs)))
}

/// η_W = Q⁻¹(P_FA)/√(M·N).
pub fn willie_threshold(p_fa: Probability, m: u32, n_total: u32) -> Result<f64> {
    check_open(p_fa, "false-alarm target")?;
    Ok(std_normal_tail_inv(p_fa.get())? / sqrt(f64::from(m) * f64::from(n_total)))
}

/// Q(√(M·N)·η_W).
pub fn willie_fap(eta_w: f64, m: u32, n_total: u32) -> Probability {
    Probability::saturating(std_normal_tail(sqrt(f64::from(m) * f64::from(n_total)) * eta_w))
}

/// Q(√(M·N)·(η_W − ρ)).
pub fn willie_dp(eta_w: f64, rho: f64, m: u32, n_total: u32) -> Result<Probability> {
    if !(rho >= 0.0) {
        return Err(Error::domain("snr", rho));
    }
    Ok(Probability::saturating(std_normal_tail(
        sqrt(f64::from(m) * f64::from(n_total)) * (eta_w - rho),
    )))
}

/// Everything the warden formulas need from one design point, with
/// `f_M⁻¹(P_MD)` evaluated once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WardenDesign {
    pub p_fa: Probability,
    pub p_md: Probability,
    pub m: u32,
    pub n_total: u32,
    pub alpha: f64,
    /// Q⁻¹(P_FA).
    pub q_inv_fa: f64,
    /// f_M⁻¹(P_MD).
    pub f_inv: f64,
}

impl WardenDesign {
    pub fn new(p_fa: Probability, p_md: Probability, m: u32, n_total: u32, alpha: f64) -> Result<Self> {
        let f_inv = f_m_inv(p_md, m, p_fa)?;
        Self::with_f_inv(p_fa, p_md, m, n_total, alpha, f_inv)
    }

    pub fn with_f_inv(p_fa: Probability, p_md: Probability, m: u32, n_total: u32, alpha: f64, f_inv: f64) -> Result<Self> {
        check_open(p_fa, "false-alarm target")?;
        check_open(p_md, "missed-detection target")?;
        if n_total == 0 {
            return Err(Error::domain("frame length", 0.0));
        }
        reference_length(n_total, alpha)?;
        Ok(WardenDesign { p_fa, p_md, m, n_total, alpha, q_inv_fa: std_normal_tail_inv(p_fa.get())?, f_inv })
    }

    /// √M / (α·f_M⁻¹(P_MD)·√N), the drop of the radiometer's normalized
    /// threshold caused by the designed power.
    fn shift(&self) -> f64 {
        sqrt(f64::from(self.m)) / (self.alpha * self.f_inv * sqrt(f64::from(self.n_total)))
    }

    pub fn dp(&self) -> Probability {
        Probability::saturating(std_normal_tail(self.q_inv_fa - self.shift()))
    }

    pub fn dp_taylor(&self) -> Probability {
        let slope = exp(-0.5 * self.q_inv_fa * self.q_inv_fa) / sqrt(core::f64::consts::TAU);
        Probability::saturating(self.p_fa.get() + slope * self.shift())
    }

    pub fn dp_asymptotic(&self) -> Result<Probability> {
        let z = std_normal_quantile(self.p_md.get())?;
        let mn = f64::from(self.m) * f64::from(self.n_total);
        Ok(Probability::saturating(std_normal_tail(self.q_inv_fa - 2.0 * z * z / (self.alpha * sqrt(mn)))))
    }
}

/// Warden detection probability at the designed transmit power:
/// Q(Q⁻¹(P_FA) − √M/(α·f_M⁻¹(P_MD)·√N)).
pub fn willie_dp_design(p_fa: Probability, p_md: Probability, m: u32, n_total: u32, alpha: f64) -> Result<Probability> {
    Ok(WardenDesign::new(p_fa, p_md, m, n_total, alpha)?.dp())
}

/// First-order expansion of [`willie_dp_design`] in 1/√N.
pub fn willie_dp_taylor(p_fa: Probability, p_md: Probability, m: u32, n_total: u32, alpha: f64) -> Result<Probability> {
    Ok(WardenDesign::new(p_fa, p_md, m, n_total, alpha)?.dp_taylor())
}

/// [`willie_dp_design`] with f_M⁻¹(P_MD) replaced by its large-M limit
/// M/(2·Φ⁻¹(P_MD)²).
pub fn willie_dp_asymptotic(p_fa: Probability, p_md: Probability, m: u32, n_total: u32, alpha: f64) -> Result<Probability> {
    WardenDesign::with_f_inv(p_fa, p_md, m, n_total, alpha, f64::NAN)?.dp_asymptotic()
}

/// Large-M limit of f_M⁻¹(P_MD): M / (2·Φ⁻¹(P_MD)²).
pub fn f_m_inv_limit(p_md: Probability, m: u32) -> Result<f64> {
    check_open(p_md, "missed-detection target")?;
    let z = std_normal_quantile(p_md.get())?;
    Ok(f64::from(m) / (2.0 * z * z))
}
