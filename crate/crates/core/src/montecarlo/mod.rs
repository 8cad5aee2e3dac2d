//! Sample-level simulation of the frame-detection link under flat Rayleigh
//! fading.
//!
//! Every trial owns independent random streams addressed by
//! `(master_seed, trial_index, stream)`, so any partition of a trial range
//! across workers reproduces the sequential counts exactly.

mod oracle;
mod rng;
mod signal;
mod stats;
mod trials;

pub use oracle::{bob_exact_fap_oracle, bob_exact_mdp_oracle, willie_exact_fap_oracle};
pub use rng::{Stream, StreamKey};
pub use signal::{
    bob_statistic, gen_frame, gen_reference_sequence, willie_statistic, ChannelDraw, ReceivedBlock,
    ReferenceSequence,
};
pub use stats::{ks_critical_value, ks_statistic, two_proportion_z, EmpiricalRate};
pub use trials::{
    run_bob_trials, run_willie_trials, BobExperiment, Hypothesis, TrialExperiment, TrialOutcome,
    TrialPlan, WillieExperiment,
};
