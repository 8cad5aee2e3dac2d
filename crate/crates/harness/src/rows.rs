//! One design point per output row: analytic columns always, empirical
//! columns when a trial plan is given.

use std::fmt;

use covert_core::analytic::{
    bob_fap, bob_mdp, bob_mdp_scaled, reference_length, willie_dp, willie_fap, SystemParams, Thresholds,
    WardenDesign, f_m_inv,
};
use covert_core::montecarlo::{
    bob_exact_fap_oracle, bob_exact_mdp_oracle, willie_exact_fap_oracle, BobExperiment, EmpiricalRate, Hypothesis, TrialPlan,
    WillieExperiment,
};
use covert_core::Probability;

use crate::engine::Engine;
use crate::error::HarnessError;

/// Common false-alarm and missed-detection targets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Targets {
    pub p_fa: Probability,
    pub p_md: Probability,
}

impl Targets {
    pub fn new(p_fa: f64, p_md: f64) -> Result<Self, HarnessError> {
        let p_fa = Probability::open(p_fa).map_err(|_| HarnessError::Config(format!("pfa must lie in (0, 1), got {p_fa}")))?;
        let p_md = Probability::open(p_md).map_err(|_| HarnessError::Config(format!("pmd must lie in (0, 1), got {p_md}")))?;
        Ok(Targets { p_fa, p_md })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerSource {
    /// P_T = σ_n² / (f_M⁻¹(P_MD)·N_RS).
    Design,
    /// P_T set from an explicit SNR.
    Override,
}

impl PowerSource {
    pub fn as_str(self) -> &'static str {
        match self {
            PowerSource::Design => "design",
            PowerSource::Override => "override",
        }
    }
}

impl fmt::Display for PowerSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PowerSource {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "design" => Ok(PowerSource::Design),
            "override" => Ok(PowerSource::Override),
            other => Err(HarnessError::Config(format!("unknown power source {other:?}"))),
        }
    }
}

/// Parameters, thresholds and transmit power at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignPoint {
    pub targets: Targets,
    pub params: SystemParams,
    pub thresholds: Thresholds,
    pub alpha: f64,
    /// f_M⁻¹(P_MD) at this antenna count.
    pub f_inv: f64,
    pub power_source: PowerSource,
}

/// Thresholds from `p_fa` and the minimal transmit power meeting `p_md`.
///
/// `alpha · n_total` must be an integer; anything else is a configuration
/// error rather than something to round away.
pub fn design_point(targets: Targets, n_total: u32, alpha: f64, m: u32, noise_power: f64) -> Result<DesignPoint, HarnessError> {
    if m == 0 {
        return Err(HarnessError::Config("antenna count must be positive".into()));
    }
    if !(noise_power > 0.0 && noise_power.is_finite()) {
        return Err(HarnessError::Config(format!("noise power must be positive, got {noise_power}")));
    }
    let n_rs = reference_length(n_total, alpha)
        .map_err(|_| HarnessError::Config(format!("alpha * n = {alpha} * {n_total} is not a positive integer")))?;
    let thresholds = Thresholds::design(targets.p_fa, m, n_rs, n_total)?;
    let f_inv = f_m_inv(targets.p_md, m, targets.p_fa)?;
    let tx_power = noise_power / (f_inv * f64::from(n_rs));
    let params = SystemParams::new(n_total, n_rs, m, noise_power, tx_power)?;
    Ok(DesignPoint { targets, params, thresholds, alpha, f_inv, power_source: PowerSource::Design })
}

impl DesignPoint {
    /// Replaces the designed power by `σ_n² · 10^(snr_db/10)`.
    pub fn with_snr_db(self, snr_db: f64) -> Result<Self, HarnessError> {
        if !snr_db.is_finite() {
            return Err(HarnessError::Config(format!("snr-db must be finite, got {snr_db}")));
        }
        let tx = self.params.noise_power() * 10f64.powf(snr_db / 10.0);
        Ok(DesignPoint { params: self.params.with_tx_power(tx)?, power_source: PowerSource::Override, ..self })
    }
}

/// Estimate and interval of one empirical rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateColumns {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl From<EmpiricalRate> for RateColumns {
    fn from(r: EmpiricalRate) -> Self {
        RateColumns { estimate: r.estimate.get(), ci_low: r.ci_low.get(), ci_high: r.ci_high.get() }
    }
}

/// Columns filled by simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalColumns {
    pub bob_fap: RateColumns,
    pub bob_mdp: RateColumns,
    pub willie_fap: RateColumns,
    pub willie_dp: RateColumns,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n_total: u32,
    pub n_rs: Option<u32>,
    pub alpha: f64,
    pub m_antennas: u32,
    pub noise_power: f64,
    pub tx_power: Option<f64>,
    pub snr: Option<f64>,
    pub p_fa: f64,
    pub p_md: f64,
    pub eta_b: Option<f64>,
    pub eta_w: Option<f64>,
    pub power_source: PowerSource,
    pub bob_fap: Option<f64>,
    pub bob_mdp: Option<f64>,
    pub bob_mdp_scaled: Option<f64>,
    pub bob_exact_fap: Option<f64>,
    pub bob_exact_mdp: Option<f64>,
    pub willie_fap: Option<f64>,
    pub willie_exact_fap: Option<f64>,
    pub willie_dp: Option<f64>,
    pub willie_dp_design: Option<f64>,
    pub willie_dp_taylor: Option<f64>,
    pub willie_dp_asymptotic: Option<f64>,
    pub empirical: Option<EmpiricalColumns>,
    pub error: Option<String>,
}

impl ResultRow {
    /// A row that records why a point could not be evaluated.
    pub fn failed(targets: Targets, n_total: u32, alpha: f64, m: u32, noise_power: f64, power_source: PowerSource, err: &HarnessError) -> Self {
        ResultRow {
            n_total,
            n_rs: None,
            alpha,
            m_antennas: m,
            noise_power,
            tx_power: None,
            snr: None,
            p_fa: targets.p_fa.get(),
            p_md: targets.p_md.get(),
            eta_b: None,
            eta_w: None,
            power_source,
            bob_fap: None,
            bob_mdp: None,
            bob_mdp_scaled: None,
            bob_exact_fap: None,
            bob_exact_mdp: None,
            willie_fap: None,
            willie_exact_fap: None,
            willie_dp: None,
            willie_dp_design: None,
            willie_dp_taylor: None,
            willie_dp_asymptotic: None,
            empirical: None,
            error: Some(err.to_string()),
        }
    }

    /// All closed-form columns at `point`.
    pub fn analytic(point: &DesignPoint) -> Result<Self, HarnessError> {
        let p = &point.params;
        let t = &point.thresholds;
        let (m, n, n_rs) = (p.m_antennas(), p.n_total(), p.n_rs());
        let rho = p.snr();
        let warden = WardenDesign::with_f_inv(point.targets.p_fa, point.targets.p_md, m, n, point.alpha, point.f_inv)?;
        let mdp = |f: fn(f64, f64, u32, u32) -> covert_core::Result<Probability>| -> Result<f64, HarnessError> {
            if rho > 0.0 {
                Ok(f(t.eta_b, rho, m, n_rs)?.get())
            } else {
                Ok(1.0)
            }
        };
        Ok(ResultRow {
            n_total: n,
            n_rs: Some(n_rs),
            alpha: point.alpha,
            m_antennas: m,
            noise_power: p.noise_power(),
            tx_power: Some(p.tx_power()),
            snr: Some(rho),
            p_fa: point.targets.p_fa.get(),
            p_md: point.targets.p_md.get(),
            eta_b: Some(t.eta_b),
            eta_w: Some(t.eta_w),
            power_source: point.power_source,
            bob_fap: Some(bob_fap(t.eta_b, m, n_rs)?.get()),
            bob_mdp: Some(mdp(bob_mdp)?),
            bob_mdp_scaled: Some(mdp(bob_mdp_scaled)?),
            bob_exact_fap: Some(bob_exact_fap_oracle(t.eta_b, m, n_rs)?.get()),
            bob_exact_mdp: Some(bob_exact_mdp_oracle(t.eta_b, rho, m, n_rs)?.get()),
            willie_fap: Some(willie_fap(t.eta_w, m, n).get()),
            willie_exact_fap: Some(willie_exact_fap_oracle(t.eta_w, m, n)?.get()),
            willie_dp: Some(willie_dp(t.eta_w, rho, m, n)?.get()),
            willie_dp_design: Some(warden.dp().get()),
            willie_dp_taylor: Some(warden.dp_taylor().get()),
            willie_dp_asymptotic: Some(warden.dp_asymptotic()?.get()),
            empirical: None,
            error: None,
        })
    }
}

/// Seed of one of the four experiments at a point, so that they use
/// unrelated random streams.
fn experiment_seed(master: u64, slot: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master.wrapping_add(slot.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs the receiver under both hypotheses and the warden under both.
pub fn simulate(point: &DesignPoint, plan: &TrialPlan, engine: &Engine) -> Result<EmpiricalColumns, HarnessError> {
    let p = point.params;
    let t = &point.thresholds;
    let sub = |slot| TrialPlan { master_seed: experiment_seed(plan.master_seed, slot), ..*plan };

    let bob_h0 = BobExperiment::new(p, t.eta_b, Hypothesis::H0, sub(0).master_seed)?;
    let bob_fap = engine.run(&bob_h0, &sub(0))?;
    let bob_h1 = BobExperiment::new(p, t.eta_b, Hypothesis::H1, sub(1).master_seed)?;
    let bob_mdp = engine.run(&bob_h1, &sub(1))?;
    let willie_h0 = WillieExperiment::new(p, t.eta_w, Hypothesis::H0, sub(2).master_seed)?;
    let willie_fap = engine.run(&willie_h0, &sub(2))?;
    let willie_h1 = WillieExperiment::new(p, t.eta_w, Hypothesis::H1, sub(3).master_seed)?;
    let willie_dp = engine.run(&willie_h1, &sub(3))?;

    Ok(EmpiricalColumns {
        bob_fap: bob_fap.into(),
        bob_mdp: bob_mdp.into(),
        willie_fap: willie_fap.into(),
        willie_dp: willie_dp.into(),
        trials: plan.n_trials,
        seed: plan.master_seed,
        confidence: plan.confidence_level,
    })
}

/// Analytic row at `point`, plus empirical columns when `plan` is given.
/// Failures are recorded in the row's error column.
pub fn evaluate(point: &DesignPoint, plan: Option<&TrialPlan>, engine: &Engine) -> ResultRow {
    let fail = |e: &HarnessError| {
        ResultRow::failed(point.targets, point.params.n_total(), point.alpha, point.params.m_antennas(), point.params.noise_power(), point.power_source, e)
    };
    let mut row = match ResultRow::analytic(point) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if let Some(plan) = plan {
        match simulate(point, plan, engine) {
            Ok(emp) => row.empirical = Some(emp),
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}
