use crate::error::{Error, Result};
use crate::specfun::{gamma_sf, reg_incomplete_beta, reg_incomplete_beta_complement, Probability};

/// Exact false-alarm probability of the receiver statistic: under H0,
/// Λ_B ~ Beta(M, M(N_RS − 1)), so the tail is 1 − I_η(M, M(N_RS − 1)).
pub fn bob_exact_fap_oracle(eta_b: f64, m: u32, n_rs: u32) -> Result<Probability> {
    if !(0.0..=1.0).contains(&eta_b) {
        return Err(Error::domain("receiver threshold", eta_b));
    }
    if m == 0 || n_rs == 0 {
        return Err(Error::domain("antennas or reference length", 0.0));
    }
    if n_rs == 1 {
        // Λ_B ≡ 1
        return Ok(if eta_b < 1.0 { Probability::ONE } else { Probability::ZERO });
    }
    Probability::new(reg_incomplete_beta_complement(eta_b, m, m * (n_rs - 1))?)
}

/// Exact missed-detection probability of the receiver statistic under
/// Rayleigh fading at SNR `rho`.
///
/// Projecting each antenna onto the reference leaves `|u_j|² ~
/// (P_T·N_RS + σ_n²)·Exp(1)` independently of the orthogonal energy
/// `σ_n²·Gamma(M(N_RS − 1), 1)`, so Λ_B ≤ η exactly when a Beta(M, M(N_RS − 1))
/// variable is at most c/(1 + c) with c = η / ((1 − η)(1 + ρ·N_RS)).
pub fn bob_exact_mdp_oracle(eta_b: f64, rho: f64, m: u32, n_rs: u32) -> Result<Probability> {
    if !(0.0..=1.0).contains(&eta_b) {
        return Err(Error::domain("receiver threshold", eta_b));
    }
    if !(rho >= 0.0 && rho.is_finite()) {
        return Err(Error::domain("snr", rho));
    }
    if m == 0 || n_rs == 0 {
        return Err(Error::domain("antennas or reference length", 0.0));
    }
    if eta_b == 1.0 {
        return Ok(Probability::ONE);
    }
    if n_rs == 1 {
        return Ok(Probability::ZERO);
    }
    let spread = (1.0 - eta_b) * (1.0 + rho * f64::from(n_rs));
    Probability::new(reg_incomplete_beta(eta_b / (eta_b + spread), m, m * (n_rs - 1))?)
}

/// Exact false-alarm probability of the radiometer: under H0,
/// Tr(rᴴr)/σ_n² ~ Gamma(M·N, 1).
pub fn willie_exact_fap_oracle(eta_w: f64, m: u32, n_total: u32) -> Result<Probability> {
    if !(eta_w > -1.0) {
        return Err(Error::domain("radiometer threshold", eta_w));
    }
    let shape = m
        .checked_mul(n_total)
        .filter(|&s| s > 0)
        .ok_or(Error::domain("antennas times frame length", f64::from(m) * f64::from(n_total)))?;
    let mn = f64::from(shape);
    Probability::new(gamma_sf(mn * (1.0 + eta_w), shape)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{bob_fap, bob_mdp, bob_threshold, willie_fap, willie_threshold};
    use libm::exp;

    #[test]
    fn bob_oracle_endpoints_and_uniform_case() {
        assert_eq!(bob_exact_fap_oracle(0.0, 4, 32).unwrap().get(), 1.0);
        assert_eq!(bob_exact_fap_oracle(1.0, 4, 32).unwrap().get(), 0.0);
        for x in [0.1, 0.45, 0.8] {
            assert!((bob_exact_fap_oracle(x, 1, 2).unwrap().get() - (1.0 - x)).abs() < 1e-14);
        }
        assert!(bob_exact_fap_oracle(1.5, 1, 2).is_err());
    }

    #[test]
    fn bob_approximation_improves_with_reference_length() {
        let p = Probability::new(1e-3).unwrap();
        let mut last = f64::INFINITY;
        for n_rs in [32, 128, 512] {
            let eta = bob_threshold(p, 16, n_rs).unwrap().eta;
            let gap = (bob_fap(eta, 16, n_rs).unwrap().get() - bob_exact_fap_oracle(eta, 16, n_rs).unwrap().get()).abs();
            assert!(gap < last, "n_rs = {n_rs}: {gap} vs {last}");
            last = gap;
        }
    }

    #[test]
    fn willie_oracle_special_cases() {
        assert!((willie_exact_fap_oracle(-1.0 + 1e-12, 4, 64).unwrap().get() - 1.0).abs() < 1e-9);
        for eta in [-0.5, 0.0, 1.3] {
            assert!((willie_exact_fap_oracle(eta, 1, 1).unwrap().get() - exp(-(1.0 + eta))).abs() < 1e-15);
        }
        assert!(willie_exact_fap_oracle(-1.0, 1, 1).is_err());
    }

    #[test]
    fn willie_clt_converges() {
        let p = Probability::new(1e-3).unwrap();
        let mut last = f64::INFINITY;
        for (m, n) in [(16, 16), (16, 256), (16, 4096)] {
            let eta = willie_threshold(p, m, n).unwrap();
            let gap = (willie_fap(eta, m, n).get() - willie_exact_fap_oracle(eta, m, n).unwrap().get()).abs();
            assert!(gap < last);
            last = gap;
        }
    }

    #[test]
    fn exact_mdp_limits_and_frozen_values() {
        // zero SNR: H1 has the H0 law
        let eta = 0.02;
        let mdp = bob_exact_mdp_oracle(eta, 0.0, 16, 128).unwrap().get();
        let fap = bob_exact_fap_oracle(eta, 16, 128).unwrap().get();
        assert!((mdp + fap - 1.0).abs() < 1e-14);
        assert_eq!(bob_exact_mdp_oracle(1.0, 3.0, 4, 32).unwrap().get(), 1.0);
        assert_eq!(bob_exact_mdp_oracle(0.0, 3.0, 4, 32).unwrap().get(), 0.0);
        assert!(bob_exact_mdp_oracle(0.5, -1.0, 4, 32).is_err());
        // designed operating points, independently evaluated
        let rho = 3.030_808_233_773_310_5e-2;
        let eta = bob_threshold(Probability::new(1e-3).unwrap(), 16, 128).unwrap().eta;
        let v = bob_exact_mdp_oracle(eta, rho, 16, 128).unwrap().get();
        assert!((v - 1.098_488_743_731_276_5e-3).abs() / v < 1e-6, "{v}");
    }

    #[test]
    fn approximate_mdp_tightens_with_reference_length() {
        let p = Probability::new(1e-3).unwrap();
        let mut prev = f64::INFINITY;
        for n_rs in [32, 128, 512, 2048] {
            let eta = bob_threshold(p, 16, n_rs).unwrap().eta;
            let rho = 0.25 / f64::from(n_rs).sqrt();
            let gap = (bob_exact_mdp_oracle(eta, rho, 16, n_rs).unwrap().get() - bob_mdp(eta, rho, 16, n_rs).unwrap().get()).abs();
            assert!(gap < prev, "n_rs = {n_rs}: {gap} vs {prev}");
            prev = gap;
        }
    }
}
