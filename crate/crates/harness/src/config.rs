//! Run settings from command-line flags and an optional `key = value`
//! params file. Flags win over the file; the file wins over defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use covert_core::montecarlo::TrialPlan;

use crate::error::HarnessError;
use crate::rows::Targets;
use crate::sweep::SweepVariable;

pub const DEFAULT_P_FA: f64 = 1e-3;
pub const DEFAULT_P_MD: f64 = 1e-3;
pub const DEFAULT_M: u32 = 16;
pub const DEFAULT_N: u32 = 256;
pub const DEFAULT_ALPHA: f64 = 0.5;
pub const DEFAULT_NOISE_POWER: f64 = 1.0;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 1_000_000;

const KEYS: [&str; 14] = [
    "pfa", "pmd", "m", "n", "alpha", "noise-power", "snr-db", "out", "trials", "seed", "confidence", "threads", "var",
    "values",
];

/// Parsed `key = value` lines. Blank lines and `#` comments are skipped;
/// `_` and `-` are interchangeable in keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamsFile {
    entries: BTreeMap<String, String>,
}

impl ParamsFile {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(HarnessError::Config(format!("params line {}: expected key = value", lineno + 1)));
            };
            let key = k.trim().replace('_', "-").to_ascii_lowercase();
            if !KEYS.contains(&key.as_str()) {
                return Err(HarnessError::Config(format!("params line {}: unknown key {key:?}", lineno + 1)));
            }
            if entries.insert(key.clone(), v.trim().to_owned()).is_some() {
                return Err(HarnessError::Config(format!("params line {}: duplicate key {key:?}", lineno + 1)));
            }
        }
        Ok(ParamsFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError> {
        self.entries
            .get(key)
            .map(|v| v.parse().map_err(|_| HarnessError::Config(format!("params: cannot parse {key} = {v:?}"))))
            .transpose()
    }
}

/// Settings as given, before defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawSettings {
    pub pfa: Option<f64>,
    pub pmd: Option<f64>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub alpha: Option<f64>,
    pub noise_power: Option<f64>,
    pub snr_db: Option<f64>,
    pub out: Option<PathBuf>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub confidence: Option<f64>,
    pub threads: Option<usize>,
    pub var: Option<String>,
    pub values: Option<String>,
}

impl RawSettings {
    /// Fills every unset field from `file`.
    pub fn or_file(self, file: &ParamsFile) -> Result<Self, HarnessError> {
        Ok(RawSettings {
            pfa: self.pfa.or(file.get("pfa")?),
            pmd: self.pmd.or(file.get("pmd")?),
            m: self.m.or(file.get("m")?),
            n: self.n.or(file.get("n")?),
            alpha: self.alpha.or(file.get("alpha")?),
            noise_power: self.noise_power.or(file.get("noise-power")?),
            snr_db: self.snr_db.or(file.get("snr-db")?),
            out: self.out.or(file.get("out")?),
            trials: self.trials.or(file.get("trials")?),
            seed: self.seed.or(file.get("seed")?),
            confidence: self.confidence.or(file.get("confidence")?),
            threads: self.threads.or(file.get("threads")?),
            var: self.var.or(file.get("var")?),
            values: self.values.or(file.get("values")?),
        })
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub targets: Targets,
    pub n_total: u32,
    pub m_antennas: u32,
    pub alpha: f64,
    pub noise_power: f64,
    pub snr_db: Option<f64>,
    pub out: Option<PathBuf>,
    /// Trial count if one was given.
    pub trials: Option<u64>,
    pub seed: u64,
    pub confidence: f64,
    pub threads: Option<usize>,
    pub var: SweepVariable,
    /// Explicit sweep values; `None` means the defaults for `var`.
    pub values: Option<Vec<u32>>,
}

/// Comma-separated positive integers.
pub fn parse_values(s: &str) -> Result<Vec<u32>, HarnessError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| HarnessError::Config(format!("bad sweep value {t:?}"))))
        .collect()
}

impl Settings {
    pub fn resolve(raw: RawSettings) -> Result<Self, HarnessError> {
        let var = match &raw.var {
            Some(v) => v.parse()?,
            None => SweepVariable::FrameLength,
        };
        let values = raw.values.as_deref().map(parse_values).transpose()?;
        let confidence = raw.confidence.unwrap_or(TrialPlan::DEFAULT_CONFIDENCE);
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(HarnessError::Config(format!("confidence must lie in (0, 1), got {confidence}")));
        }
        if raw.trials == Some(0) {
            return Err(HarnessError::Config("trials must be positive".into()));
        }
        if raw.threads == Some(0) {
            return Err(HarnessError::Config("threads must be positive".into()));
        }
        Ok(Settings {
            targets: Targets::new(raw.pfa.unwrap_or(DEFAULT_P_FA), raw.pmd.unwrap_or(DEFAULT_P_MD))?,
            n_total: raw.n.unwrap_or(DEFAULT_N),
            m_antennas: raw.m.unwrap_or(DEFAULT_M),
            alpha: raw.alpha.unwrap_or(DEFAULT_ALPHA),
            noise_power: raw.noise_power.unwrap_or(DEFAULT_NOISE_POWER),
            snr_db: raw.snr_db,
            out: raw.out,
            trials: raw.trials,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
            confidence,
            threads: raw.threads,
            var,
            values,
        })
    }

    /// Trial plan with `default_trials` when none was given.
    pub fn plan_or(&self, default_trials: u64) -> Result<TrialPlan, HarnessError> {
        Ok(TrialPlan::new(self.trials.unwrap_or(default_trials), self.seed, self.confidence)?)
    }

    /// Trial plan only if a trial count was given.
    pub fn plan(&self) -> Result<Option<TrialPlan>, HarnessError> {
        self.trials.map(|t| Ok(TrialPlan::new(t, self.seed, self.confidence)?)).transpose()
    }
}
