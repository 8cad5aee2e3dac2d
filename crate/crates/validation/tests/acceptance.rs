//! Acceptance criteria A1–A8, one PASS/FAIL line each. Exits nonzero if any
//! criterion fails.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use covert_core::analytic::{
    bob_fap, bob_mdp, bob_threshold, min_transmit_power, willie_fap, willie_threshold, SystemParams, WardenDesign,
};
use covert_core::montecarlo::{
    bob_exact_mdp_oracle, ks_critical_value, ks_statistic, willie_exact_fap_oracle, BobExperiment, Hypothesis,
    TrialPlan, WillieExperiment,
};
use covert_core::specfun::{gamma_cdf, reg_incomplete_beta};
use covert_core::Probability;
use covert_harness::engine::Engine;
use covert_harness::{design_point, run_sweep, SweepSpec, SweepVariable, Targets};

const P_FA: f64 = 1e-3;
const P_MD: f64 = 1e-3;
const ALPHA: f64 = 0.5;
const M: u32 = 16;
const SEED: u64 = 20_240_601;

type Check = Result<(bool, String), String>;
type Criterion<'a> = (&'static str, &'static str, Duration, Box<dyn Fn() -> Check + 'a>);

fn prob(p: f64) -> Probability {
    Probability::new(p).unwrap()
}

fn targets() -> Targets {
    Targets::new(P_FA, P_MD).unwrap()
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn a1() -> Check {
    let n_rs = 128;
    let t = bob_threshold(prob(P_FA), M, n_rs).map_err(err)?;
    let tx = min_transmit_power(prob(P_MD), prob(P_FA), M, n_rs, 1.0).map_err(err)?;
    let fap = bob_fap(t.eta, M, n_rs).map_err(err)?.get();
    let mdp = bob_mdp(t.eta, tx, M, n_rs).map_err(err)?.get();
    let ok = (fap - P_FA).abs() <= 1e-6 && (mdp - P_MD).abs() <= 1e-6;
    Ok((ok, format!("eta_b {:.6e}, P_T {tx:.6e}, bob_fap {fap:.9e}, bob_mdp {mdp:.9e}", t.eta)))
}

fn a2(engine: &Engine) -> Check {
    let n = 256;
    let eta_w = willie_threshold(prob(P_FA), M, n).map_err(err)?;
    let params = SystemParams::new(n, 128, M, 1.0, 0.0).map_err(err)?;
    let plan = TrialPlan::new(1_000_000, SEED, 0.99).map_err(err)?;
    let exp = WillieExperiment::new(params, eta_w, Hypothesis::H0, SEED).map_err(err)?;
    let rate = engine.run(&exp, &plan).map_err(err)?;
    let exact = willie_exact_fap_oracle(eta_w, M, n).map_err(err)?.get();
    let clt = willie_fap(eta_w, M, n).get();
    let rel = (clt - exact).abs() / exact;
    let ok = rate.contains(exact) && rel < 0.2;
    Ok((
        ok,
        format!(
            "empirical {:.5e} CI [{:.5e}, {:.5e}], exact {exact:.5e}; |clt - exact|/exact = {rel:.3} at MN = {}",
            rate.estimate.get(),
            rate.ci_low.get(),
            rate.ci_high.get(),
            M * n
        ),
    ))
}

fn a3(engine: &Engine) -> Check {
    let mut detail = String::new();
    let mut ok = true;
    let mut exact_dev = Vec::new();
    for (n, n_rs) in [(256u32, 128u32), (1024, 512)] {
        let point = design_point(targets(), n, ALPHA, M, 1.0).map_err(err)?;
        let plan = TrialPlan::new(100_000, SEED + u64::from(n), 0.99).map_err(err)?;
        let exp = BobExperiment::new(point.params, point.thresholds.eta_b, Hypothesis::H1, plan.master_seed).map_err(err)?;
        let rate = engine.run(&exp, &plan).map_err(err)?;
        let exact = bob_exact_mdp_oracle(point.thresholds.eta_b, point.params.snr(), M, n_rs).map_err(err)?.get();
        exact_dev.push((exact - P_MD).abs());
        let near_target = rate.overlaps(0.75 * P_MD, 1.25 * P_MD);
        // the simulation must also agree with the exact law it samples
        let consistent = rate.contains(exact);
        ok &= near_target && consistent;
        let _ = write!(
            detail,
            "N_RS {n_rs}: empirical {:.4e} CI [{:.4e}, {:.4e}], exact {exact:.4e}; ",
            rate.estimate.get(),
            rate.ci_low.get(),
            rate.ci_high.get()
        );
    }
    let shrinks = exact_dev[1] < exact_dev[0];
    ok &= shrinks;
    let _ = write!(detail, "deviation from P_MD {:.3e} -> {:.3e}", exact_dev[0], exact_dev[1]);
    Ok((ok, detail))
}

fn a4(engine: &Engine) -> Check {
    let mut gaps = Vec::new();
    let mut detail = String::new();
    let mut within = true;
    for n in [256u32, 1024] {
        let point = design_point(targets(), n, ALPHA, M, 1.0).map_err(err)?;
        let analytic = WardenDesign::with_f_inv(prob(P_FA), prob(P_MD), M, n, ALPHA, point.f_inv).map_err(err)?.dp().get();
        let plan = TrialPlan::new(100_000, SEED + 7 * u64::from(n), 0.99).map_err(err)?;
        let exp = WillieExperiment::new(point.params, point.thresholds.eta_w, Hypothesis::H1, plan.master_seed).map_err(err)?;
        let rate = engine.run(&exp, &plan).map_err(err)?;
        let gap = (rate.estimate.get() - analytic).abs();
        let tol = (0.02_f64).max(0.15 * analytic);
        if n == 256 {
            within = gap <= tol;
        }
        gaps.push(gap);
        let _ = write!(detail, "N {n}: empirical {:.4e} vs analytic {analytic:.4e}, gap {gap:.4e} (tol {tol:.4e}); ", rate.estimate.get());
    }
    let shrinks = gaps[1] < gaps[0];
    let _ = write!(detail, "tolerance {}, gap shrinks {shrinks}", if within { "met" } else { "exceeded at N 256" });
    Ok((within && shrinks, detail))
}

fn sweep(variable: SweepVariable, values: Vec<u32>) -> Result<Vec<covert_harness::ResultRow>, String> {
    let spec = SweepSpec { variable, values, targets: targets(), n_total: 256, m_antennas: M, alpha: ALPHA, noise_power: 1.0, snr_db: None, plan: None };
    let rows = run_sweep(&spec, &Engine::new(Some(1)).map_err(err)?).map_err(err)?;
    if let Some(e) = rows.iter().find_map(|r| r.error.clone()) {
        return Err(e);
    }
    Ok(rows)
}

fn a5() -> Check {
    let ns = [64u32, 256, 1024, 4096, 16384];
    let rows = sweep(SweepVariable::FrameLength, ns.to_vec())?;
    let dp: Vec<f64> = rows.iter().map(|r| r.willie_dp_design.unwrap_or(f64::NAN)).collect();
    let decreasing = dp.windows(2).all(|w| w[1] < w[0]);
    let above = dp.iter().all(|&v| v > P_FA);
    let scaled: Vec<f64> = dp[2..].iter().zip(&ns[2..]).map(|(v, &n)| (v - P_FA) * f64::from(n).sqrt()).collect();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let spread = (hi - lo) / lo;
    let ok = decreasing && above && spread < 0.1;
    Ok((
        ok,
        format!(
            "dp {:?}; decreasing {decreasing}, above P_FA {above}; (dp - P_FA)·√N over top three {:?}, spread {spread:.3}",
            dp.iter().map(|v| format!("{v:.4e}")).collect::<Vec<_>>(),
            scaled.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        ),
    ))
}

fn a6() -> Check {
    let rows = sweep(SweepVariable::Antennas, vec![4, 16, 64])?;
    let dp: Vec<f64> = rows.iter().map(|r| r.willie_dp_design.unwrap_or(f64::NAN)).collect();
    let gap: Vec<f64> = rows
        .iter()
        .map(|r| {
            let d = r.willie_dp_design.unwrap_or(f64::NAN);
            (r.willie_dp_asymptotic.unwrap_or(f64::NAN) - d).abs() / d
        })
        .collect();
    let decreasing = dp.windows(2).all(|w| w[1] < w[0]);
    let shrinking = gap.windows(2).all(|w| w[1] < w[0]);
    Ok((
        decreasing && shrinking,
        format!("dp {:?}, relative asymptotic gap {:?}", fmt_all(&dp), fmt_all(&gap)),
    ))
}

fn fmt_all(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| format!("{x:.4e}")).collect()
}

fn a7(engine: &Engine) -> Check {
    let (m, n_rs, n) = (4u32, 32u32, 64u32);
    let trials = 100_000u64;
    let crit = ks_critical_value(trials as usize, 0.01);
    let params = SystemParams::new(n, n_rs, m, 1.0, 0.0).map_err(err)?;
    let bob = BobExperiment::new(params, 0.5, Hypothesis::H0, SEED).map_err(err)?;
    let mut lambda = engine.statistics(&bob, trials).map_err(err)?;
    let d_bob = ks_statistic(&mut lambda, |x| reg_incomplete_beta(x.clamp(0.0, 1.0), m, m * (n_rs - 1)).unwrap_or(f64::NAN));
    let willie = WillieExperiment::new(params, 0.0, Hypothesis::H0, SEED + 1).map_err(err)?;
    let mn = m * n;
    let mut energy: Vec<f64> = engine.statistics(&willie, trials).map_err(err)?.into_iter().map(|t| f64::from(mn) * (t + 1.0)).collect();
    let d_willie = ks_statistic(&mut energy, |x| gamma_cdf(x.max(0.0), mn).unwrap_or(f64::NAN));
    Ok((
        d_bob < crit && d_willie < crit,
        format!("KS receiver {d_bob:.5}, warden {d_willie:.5}, 1% critical value {crit:.5}"),
    ))
}

fn a8() -> Check {
    let dir = std::env::temp_dir().join(format!("covert-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(err)?;
    let runs: [(&str, Vec<&str>); 2] = [
        ("simulate", vec!["simulate", "--trials", "20000", "--seed", "3"]),
        ("sweep", vec!["sweep", "--var", "n", "--values", "64,128,256", "--m", "4", "--trials", "5000", "--seed", "4"]),
    ];
    let mut detail = String::new();
    let mut ok = true;
    for (label, args) in runs {
        let mut outputs = Vec::new();
        for threads in ["1", "4", "16"] {
            let out = dir.join(format!("{label}-{threads}.csv"));
            let out_s = out.to_string_lossy().into_owned();
            let mut full = vec!["covert"];
            full.extend(&args);
            full.extend(["--threads", threads, "--out", &out_s]);
            let code = covert_harness::cli::run(full);
            if code != 0 {
                return Err(format!("{label} with {threads} threads exited {code}"));
            }
            outputs.push(std::fs::read(&out).map_err(err)?);
        }
        let same = outputs.windows(2).all(|w| w[0] == w[1]);
        ok &= same && !outputs[0].is_empty();
        let _ = write!(detail, "{label}: {} bytes, identical across 1/4/16 threads {same}; ", outputs[0].len());
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok((ok, detail.trim_end_matches("; ").to_owned()))
}

fn main() {
    let engine = Engine::new(None).expect("thread pool");
    let criteria: Vec<Criterion<'_>> = vec![
        ("A1", "design closure", Duration::from_secs(1), Box::new(a1)),
        ("A2", "warden false alarm", Duration::from_secs(120), Box::new(|| a2(&engine))),
        ("A3", "receiver miss rate", Duration::from_secs(300), Box::new(|| a3(&engine))),
        ("A4", "warden detection", Duration::from_secs(300), Box::new(|| a4(&engine))),
        ("A5", "frame-length law", Duration::from_secs(10), Box::new(a5)),
        ("A6", "antenna law", Duration::from_secs(30), Box::new(a6)),
        ("A7", "exact-law KS suite", Duration::from_secs(60), Box::new(|| a7(&engine))),
        ("A8", "determinism", Duration::from_secs(300), Box::new(a8)),
    ];
    let mut failed = 0;
    for (id, name, budget, f) in criteria {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok((ok, detail)) => (ok && elapsed <= budget, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{id} {} {name}: {detail} [{:.2}s, budget {}s]",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
