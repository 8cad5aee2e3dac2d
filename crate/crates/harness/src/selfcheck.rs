//! Fast internal consistency checks behind `covert selfcheck`.

use covert_core::analytic::{bob_fap, willie_fap, willie_threshold, SystemParams, Thresholds, WardenDesign};
use covert_core::montecarlo::{
    bob_exact_fap_oracle, willie_exact_fap_oracle, BobExperiment, Hypothesis, TrialPlan, WillieExperiment,
};
use covert_core::specfun::{gamma_sf, gamma_sf_inv, reg_incomplete_beta, std_normal_tail, std_normal_tail_inv};
use covert_core::Probability;

use crate::engine::Engine;
use crate::error::HarnessError;
use crate::rows::{design_point, Targets};

pub const DEFAULT_TRIALS: u64 = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = Result<(bool, String), HarnessError>;
type Named<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn prob(p: f64) -> Probability {
    Probability::new(p).expect("literal probability")
}

fn special_functions() -> Outcome {
    let refl = (std_normal_tail(1.7) + std_normal_tail(-1.7) - 1.0).abs();
    let inv = (std_normal_tail_inv(std_normal_tail(2.0))? - 2.0).abs();
    let g = gamma_sf(gamma_sf_inv(1e-3, 16)?, 16)?;
    let b = reg_incomplete_beta(0.3, 4, 9)? + reg_incomplete_beta(0.7, 9, 4)?;
    let ok = refl < 1e-15 && inv < 1e-9 && (g - 1e-3).abs() < 1e-12 && (b - 1.0).abs() < 1e-14;
    Ok((ok, format!("reflection {refl:.1e}, Q inverse {inv:.1e}, gamma inverse {:.1e}, beta symmetry {:.1e}", (g - 1e-3).abs(), (b - 1.0).abs())))
}

fn design_closure() -> Outcome {
    let targets = Targets { p_fa: prob(1e-3), p_md: prob(1e-3) };
    let p = design_point(targets, 256, 0.5, 16, 1.0)?;
    let row = crate::rows::ResultRow::analytic(&p)?;
    let fap = row.bob_fap.unwrap_or(f64::NAN);
    let mdp = row.bob_mdp.unwrap_or(f64::NAN);
    let ok = (fap - 1e-3).abs() <= 1e-12 && (mdp - 1e-3).abs() <= 1e-6;
    Ok((ok, format!("receiver false alarm {fap:.6e}, miss {mdp:.6e}, power {:.6e}", p.params.tx_power())))
}

fn warden_design() -> Outcome {
    let (p_fa, p_md) = (prob(1e-3), prob(1e-3));
    let eta = willie_threshold(p_fa, 16, 256)?;
    let fap = willie_fap(eta, 16, 256).get();
    let base = WardenDesign::new(p_fa, p_md, 16, 256, 0.5)?;
    let mut prev = f64::INFINITY;
    let mut ok = (fap - 1e-3).abs() < 1e-12;
    for k in 6..=20 {
        let dp = WardenDesign::with_f_inv(p_fa, p_md, 16, 1 << k, 0.5, base.f_inv)?.dp().get();
        ok &= dp >= 1e-3 && dp < prev;
        prev = dp;
    }
    Ok((ok, format!("false alarm at threshold {fap:.6e}; detection falls to {prev:.6e} at N = 2^20")))
}

fn bob_false_alarm(trials: u64, seed: u64, engine: &Engine) -> Outcome {
    let params = SystemParams::new(64, 32, 4, 1.0, 0.0)?;
    let t = Thresholds::design(prob(0.1), 4, 32, 64)?;
    let plan = TrialPlan::new(trials, seed, 0.999)?;
    let rate = engine.run(&BobExperiment::new(params, t.eta_b, Hypothesis::H0, seed)?, &plan)?;
    let exact = bob_exact_fap_oracle(t.eta_b, 4, 32)?.get();
    let approx = bob_fap(t.eta_b, 4, 32)?.get();
    Ok((rate.contains(exact), format!("empirical {:.5} [{:.5}, {:.5}], exact {exact:.5}, approximation {approx:.5}", rate.estimate.get(), rate.ci_low.get(), rate.ci_high.get())))
}

fn willie_false_alarm(trials: u64, seed: u64, engine: &Engine) -> Outcome {
    let params = SystemParams::new(64, 32, 4, 1.0, 0.0)?;
    let t = Thresholds::design(prob(0.05), 4, 32, 64)?;
    let plan = TrialPlan::new(trials, seed, 0.999)?;
    let rate = engine.run(&WillieExperiment::new(params, t.eta_w, Hypothesis::H0, seed)?, &plan)?;
    let exact = willie_exact_fap_oracle(t.eta_w, 4, 64)?.get();
    Ok((rate.contains(exact), format!("empirical {:.5} [{:.5}, {:.5}], exact {exact:.5}", rate.estimate.get(), rate.ci_low.get(), rate.ci_high.get())))
}

fn thread_invariance(seed: u64, engine: &Engine) -> Outcome {
    let params = SystemParams::new(64, 32, 4, 1.0, 0.05)?;
    let t = Thresholds::design(prob(0.1), 4, 32, 64)?;
    let exp = BobExperiment::new(params, t.eta_b, Hypothesis::H1, seed)?;
    let n = 5000;
    let serial = Engine::new(Some(1))?.statistics(&exp, n)?;
    let parallel = engine.statistics(&exp, n)?;
    let same = serial.iter().zip(&parallel).all(|(a, b)| a.to_bits() == b.to_bits()) && serial.len() == parallel.len();
    Ok((same, format!("{n} statistics, 1 thread vs {}", engine.threads())))
}

/// Runs every check; Monte Carlo checks use `trials` trials.
pub fn run(trials: u64, seed: u64, engine: &Engine) -> Vec<CheckResult> {
    let checks: Vec<Named<'_>> = vec![
        ("special functions", Box::new(special_functions)),
        ("receiver design closure", Box::new(design_closure)),
        ("warden threshold and detection", Box::new(warden_design)),
        ("receiver false alarm vs exact", Box::new(move || bob_false_alarm(trials, seed, engine))),
        ("warden false alarm vs exact", Box::new(move || willie_false_alarm(trials, seed, engine))),
        ("thread-count invariance", Box::new(move || thread_invariance(seed, engine))),
    ];
    checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok((passed, detail)) => CheckResult { name, passed, detail },
            Err(e) => CheckResult { name, passed: false, detail: e.to_string() },
        })
        .collect()
}
