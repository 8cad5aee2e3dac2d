use std::str::FromStr;

use covert_core::montecarlo::TrialPlan;

use crate::engine::Engine;
use crate::error::HarnessError;
use crate::rows::{design_point, evaluate, ResultRow, Targets};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Frame length N.
    FrameLength,
    /// Antenna count M.
    Antennas,
}

impl SweepVariable {
    pub fn default_values(self) -> Vec<u32> {
        match self {
            SweepVariable::FrameLength => (6..=13).map(|k| 1 << k).collect(),
            SweepVariable::Antennas => (1..=6).map(|k| 1 << k).collect(),
        }
    }
}

impl FromStr for SweepVariable {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n" | "N" => Ok(SweepVariable::FrameLength),
            "m" | "M" => Ok(SweepVariable::Antennas),
            other => Err(HarnessError::Config(format!("sweep variable must be n or m, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<u32>,
    pub targets: Targets,
    /// Frame length when sweeping M.
    pub n_total: u32,
    /// Antenna count when sweeping N.
    pub m_antennas: u32,
    pub alpha: f64,
    pub noise_power: f64,
    /// Fixed SNR instead of the designed power.
    pub snr_db: Option<f64>,
    /// Empirical columns are filled only when set.
    pub plan: Option<TrialPlan>,
}

impl SweepSpec {
    /// Rejects empty, unsorted or zero value lists.
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.values.is_empty() {
            return Err(HarnessError::Config("sweep has no values".into()));
        }
        if self.values.contains(&0) {
            return Err(HarnessError::Config("sweep values must be positive".into()));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HarnessError::Config("sweep values must be strictly increasing".into()));
        }
        Ok(())
    }

    fn point(&self, value: u32) -> (u32, u32) {
        match self.variable {
            SweepVariable::FrameLength => (value, self.m_antennas),
            SweepVariable::Antennas => (self.n_total, value),
        }
    }
}

/// One row per value, in order. A point that cannot be designed becomes a
/// row with its error column set; the sweep continues.
pub fn run_sweep(spec: &SweepSpec, engine: &Engine) -> Result<Vec<ResultRow>, HarnessError> {
    spec.validate()?;
    Ok(spec
        .values
        .iter()
        .map(|&v| {
            let (n, m) = spec.point(v);
            let point = design_point(spec.targets, n, spec.alpha, m, spec.noise_power)
                .and_then(|p| match spec.snr_db {
                    Some(db) => p.with_snr_db(db),
                    None => Ok(p),
                });
            match point {
                Ok(p) => evaluate(&p, spec.plan.as_ref(), engine),
                Err(e) => {
                    let source = if spec.snr_db.is_some() { crate::PowerSource::Override } else { crate::PowerSource::Design };
                    ResultRow::failed(spec.targets, n, spec.alpha, m, spec.noise_power, source, &e)
                }
            }
        })
        .collect())
}
