use covert_core::analytic::{SystemParams, Thresholds};
use covert_core::montecarlo::{run_bob_trials, BobExperiment, Hypothesis, TrialPlan, WillieExperiment};
use covert_core::Probability;
use covert_harness::engine::Engine;

#[test]
fn thread_count_does_not_change_results() {
    let params = SystemParams::new(128, 64, 4, 1.0, 0.04).unwrap();
    let t = Thresholds::design(Probability::new(0.01).unwrap(), 4, 64, 128).unwrap();
    let plan = TrialPlan::new(10_001, 17, 0.99).unwrap();
    let bob = BobExperiment::new(params, t.eta_b, Hypothesis::H1, plan.master_seed).unwrap();
    let willie = WillieExperiment::new(params, t.eta_w, Hypothesis::H1, plan.master_seed).unwrap();
    let sequential = run_bob_trials(params, &t, Hypothesis::H1, &plan).unwrap();
    for threads in [1, 4, 16] {
        let engine = Engine::new(Some(threads)).unwrap();
        assert_eq!(engine.threads(), threads);
        assert_eq!(engine.run(&bob, &plan).unwrap(), sequential);
        let stats = engine.statistics(&willie, 5000).unwrap();
        let reference = Engine::new(Some(1)).unwrap().statistics(&willie, 5000).unwrap();
        assert!(stats.iter().map(|x| x.to_bits()).eq(reference.iter().map(|x| x.to_bits())));
    }
}

#[test]
fn zero_threads_is_rejected() {
    assert!(Engine::new(Some(0)).is_err());
    assert!(Engine::new(None).unwrap().threads() >= 1);
}
