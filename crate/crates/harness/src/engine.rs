use covert_core::montecarlo::{EmpiricalRate, TrialExperiment, TrialPlan};
use rayon::prelude::*;

use crate::error::HarnessError;

/// Trials per work item. Fixed, so the partition never depends on the
/// number of threads.
const CHUNK: u64 = 2048;

/// Data-parallel trial runner. Counts are summed as integers, so results
/// are identical for any thread count.
pub struct Engine {
    pool: rayon::ThreadPool,
}

impl Engine {
    /// `threads = None` uses rayon's default.
    pub fn new(threads: Option<usize>) -> Result<Self, HarnessError> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            if n == 0 {
                return Err(HarnessError::Config("threads must be positive".into()));
            }
            builder = builder.num_threads(n);
        }
        Ok(Engine { pool: builder.build()? })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn count_events<E: TrialExperiment>(&self, exp: &E, n_trials: u64) -> Result<u64, HarnessError> {
        let chunks = n_trials.div_ceil(CHUNK);
        let events = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| exp.count_events(c * CHUNK..((c + 1) * CHUNK).min(n_trials)))
                .try_reduce(|| 0, |a, b| Ok(a + b))
        })?;
        Ok(events)
    }

    pub fn run<E: TrialExperiment>(&self, exp: &E, plan: &TrialPlan) -> Result<EmpiricalRate, HarnessError> {
        let events = self.count_events(exp, plan.n_trials)?;
        Ok(EmpiricalRate::wilson(events, plan.n_trials, plan.confidence_level)?)
    }

    /// Per-trial statistics in trial order.
    pub fn statistics<E: TrialExperiment>(&self, exp: &E, n_trials: u64) -> Result<Vec<f64>, HarnessError> {
        let chunks = n_trials.div_ceil(CHUNK);
        let parts: Result<Vec<Vec<f64>>, _> = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| exp.statistics(c * CHUNK..((c + 1) * CHUNK).min(n_trials)))
                .collect()
        });
        Ok(parts?.concat())
    }
}
