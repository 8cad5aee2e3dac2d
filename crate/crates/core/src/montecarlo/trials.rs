use alloc::vec::Vec;
use core::ops::Range;
use num_complex::Complex64;

use super::rng::{Stream, StreamKey};
use super::signal::{bob_statistic, gen_frame, willie_statistic, ChannelDraw, ReceivedBlock, ReferenceSequence};
use super::stats::EmpiricalRate;
use crate::analytic::{SystemParams, Thresholds};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// No transmission.
    H0,
    /// A frame is present at the correct timing point.
    H1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPlan {
    pub n_trials: u64,
    pub master_seed: u64,
    pub confidence_level: f64,
}

impl TrialPlan {
    pub const DEFAULT_CONFIDENCE: f64 = 0.99;

    pub fn new(n_trials: u64, master_seed: u64, confidence_level: f64) -> Result<Self> {
        if n_trials == 0 {
            return Err(Error::domain("trial count", 0.0));
        }
        if !(confidence_level > 0.0 && confidence_level < 1.0) {
            return Err(Error::domain("confidence level", confidence_level));
        }
        Ok(TrialPlan { n_trials, master_seed, confidence_level })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub statistic: f64,
    pub decided_present: bool,
}

/// A detector simulated under one hypothesis. Trials are pure functions of
/// their index.
pub trait TrialExperiment: Sync {
    fn new_scratch(&self) -> ReceivedBlock;

    fn trial(&self, index: u64, scratch: &mut ReceivedBlock) -> Result<TrialOutcome>;

    /// The counted event: a miss for the receiver under H1, a positive
    /// decision otherwise.
    fn is_event(&self, outcome: &TrialOutcome) -> bool;

    fn count_events(&self, range: Range<u64>) -> Result<u64> {
        let mut scratch = self.new_scratch();
        let mut events = 0;
        for i in range {
            let outcome = self.trial(i, &mut scratch)?;
            events += u64::from(self.is_event(&outcome));
        }
        Ok(events)
    }

    fn statistics(&self, range: Range<u64>) -> Result<Vec<f64>> {
        let mut scratch = self.new_scratch();
        range.map(|i| self.trial(i, &mut scratch).map(|o| o.statistic)).collect()
    }
}

/// Receiver trials over the N_RS training rows.
#[derive(Debug, Clone)]
pub struct BobExperiment {
    params: SystemParams,
    eta_b: f64,
    hypothesis: Hypothesis,
    key: StreamKey,
    reference: ReferenceSequence,
}

impl BobExperiment {
    pub fn new(params: SystemParams, eta_b: f64, hypothesis: Hypothesis, master_seed: u64) -> Result<Self> {
        if hypothesis == Hypothesis::H1 && !(params.tx_power() > 0.0) {
            return Err(Error::domain("transmit power under H1", params.tx_power()));
        }
        let reference = super::signal::gen_reference_sequence(params.n_rs() as usize, master_seed)?;
        Ok(BobExperiment { params, eta_b, hypothesis, key: StreamKey::new(master_seed), reference })
    }

    pub fn reference(&self) -> &ReferenceSequence {
        &self.reference
    }
}

impl TrialExperiment for BobExperiment {
    fn new_scratch(&self) -> ReceivedBlock {
        ReceivedBlock::zeros(self.params.n_rs() as usize, self.params.m_antennas() as usize)
    }

    fn trial(&self, index: u64, block: &mut ReceivedBlock) -> Result<TrialOutcome> {
        let mut noise = self.key.stream(index, Stream::Noise);
        match self.hypothesis {
            Hypothesis::H0 => block.fill(&mut noise, self.params.noise_power(), None),
            Hypothesis::H1 => {
                let mut ch = self.key.stream(index, Stream::Channel);
                let h = ChannelDraw::rayleigh(&mut ch, self.params.m_antennas() as usize);
                let amp = libm::sqrt(self.params.tx_power());
                block.fill(&mut noise, self.params.noise_power(), Some((self.reference.symbols(), &h.gains, amp)));
            }
        }
        let statistic = bob_statistic(block, &self.reference)?;
        Ok(TrialOutcome { statistic, decided_present: statistic > self.eta_b })
    }

    fn is_event(&self, outcome: &TrialOutcome) -> bool {
        match self.hypothesis {
            Hypothesis::H0 => outcome.decided_present,
            Hypothesis::H1 => !outcome.decided_present,
        }
    }
}

/// Radiometer trials over the whole N-sample frame.
#[derive(Debug, Clone)]
pub struct WillieExperiment {
    params: SystemParams,
    eta_w: f64,
    hypothesis: Hypothesis,
    key: StreamKey,
    frame: Vec<Complex64>,
}

impl WillieExperiment {
    pub fn new(params: SystemParams, eta_w: f64, hypothesis: Hypothesis, master_seed: u64) -> Result<Self> {
        let frame = gen_frame(params.n_total() as usize, master_seed)?;
        Ok(WillieExperiment { params, eta_w, hypothesis, key: StreamKey::new(master_seed), frame })
    }
}

impl TrialExperiment for WillieExperiment {
    fn new_scratch(&self) -> ReceivedBlock {
        ReceivedBlock::zeros(self.params.n_total() as usize, self.params.m_antennas() as usize)
    }

    fn trial(&self, index: u64, block: &mut ReceivedBlock) -> Result<TrialOutcome> {
        let mut noise = self.key.stream(index, Stream::Noise);
        match self.hypothesis {
            Hypothesis::H0 => block.fill(&mut noise, self.params.noise_power(), None),
            Hypothesis::H1 => {
                let mut ch = self.key.stream(index, Stream::Channel);
                let h = ChannelDraw::rayleigh(&mut ch, self.params.m_antennas() as usize);
                let amp = libm::sqrt(self.params.tx_power());
                block.fill(&mut noise, self.params.noise_power(), Some((&self.frame, &h.gains, amp)));
            }
        }
        let statistic = willie_statistic(block, self.params.noise_power())?;
        Ok(TrialOutcome { statistic, decided_present: statistic > self.eta_w })
    }

    fn is_event(&self, outcome: &TrialOutcome) -> bool {
        outcome.decided_present
    }
}

/// Empirical receiver rate, sequentially: the miss rate under H1, the
/// false-alarm rate under H0.
pub fn run_bob_trials(params: SystemParams, thresholds: &Thresholds, hypothesis: Hypothesis, plan: &TrialPlan) -> Result<EmpiricalRate> {
    let exp = BobExperiment::new(params, thresholds.eta_b, hypothesis, plan.master_seed)?;
    let events = exp.count_events(0..plan.n_trials)?;
    EmpiricalRate::wilson(events, plan.n_trials, plan.confidence_level)
}

/// Empirical radiometer rate, sequentially: detection under H1, false alarm
/// under H0.
pub fn run_willie_trials(params: SystemParams, thresholds: &Thresholds, hypothesis: Hypothesis, plan: &TrialPlan) -> Result<EmpiricalRate> {
    let exp = WillieExperiment::new(params, thresholds.eta_w, hypothesis, plan.master_seed)?;
    let events = exp.count_events(0..plan.n_trials)?;
    EmpiricalRate::wilson(events, plan.n_trials, plan.confidence_level)
}
