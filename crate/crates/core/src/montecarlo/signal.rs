use alloc::vec::Vec;
use num_complex::Complex64;
use rand_core::RngCore;

use super::rng::{complex_gaussian, uniform, Stream, StreamKey};
use crate::error::{Error, Result};

/// Known unit-modulus training prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSequence {
    symbols: Vec<Complex64>,
}

impl ReferenceSequence {
    pub fn new(symbols: Vec<Complex64>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::domain("reference length", 0.0));
        }
        if let Some(bad) = symbols.iter().find(|s| (s.norm_sqr() - 1.0).abs() > 1e-9) {
            return Err(Error::domain("reference symbol modulus", libm::sqrt(bad.norm_sqr())));
        }
        Ok(ReferenceSequence { symbols })
    }

    pub fn symbols(&self) -> &[Complex64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

fn unit_phasor(u: f64) -> Complex64 {
    let (s, c) = libm::sincos(core::f64::consts::TAU * u);
    Complex64::new(c, s)
}

/// Constant-modulus frame of length `n_total`; symbol k depends only on
/// `(seed, k)`, so the first `n_rs` symbols equal
/// [`gen_reference_sequence`]`(n_rs, seed)`.
pub fn gen_frame(n_total: usize, seed: u64) -> Result<Vec<Complex64>> {
    if n_total == 0 {
        return Err(Error::domain("frame length", 0.0));
    }
    let mut rng = StreamKey::new(seed).stream(0, Stream::Symbols);
    Ok((0..n_total).map(|_| unit_phasor(uniform(&mut rng))).collect())
}

/// Pseudo-random unit-modulus reference sequence of length `n_rs`.
pub fn gen_reference_sequence(n_rs: usize, seed: u64) -> Result<ReferenceSequence> {
    if n_rs == 0 {
        return Err(Error::domain("reference length", 0.0));
    }
    Ok(ReferenceSequence { symbols: gen_frame(n_rs, seed)? })
}

/// Channel gains from the transmit antenna to each of M receive antennas.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub gains: Vec<Complex64>,
}

impl ChannelDraw {
    /// i.i.d. CN(0, 1) gains.
    pub fn rayleigh<R: RngCore>(rng: &mut R, m: usize) -> Self {
        ChannelDraw { gains: (0..m).map(|_| complex_gaussian(rng, 1.0)).collect() }
    }

    /// ‖h‖².
    pub fn energy(&self) -> f64 {
        self.gains.iter().map(|g| g.norm_sqr()).sum()
    }
}

/// Time × antenna sample matrix, stored antenna by antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    rows: usize,
    cols: usize,
    samples: Vec<Complex64>,
}

impl ReceivedBlock {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ReceivedBlock { rows, cols, samples: alloc::vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Builds a block from antenna columns of equal length.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::Dimension { expected_rows: rows, expected_cols: columns.len(), rows: c.len(), cols: columns.len() });
        }
        let samples = columns.iter().flat_map(|c| c.iter().copied()).collect();
        Ok(ReceivedBlock { rows, cols: columns.len(), samples })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.samples[col * self.rows + row]
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.samples[col * self.rows..(col + 1) * self.rows]
    }

    pub fn column_mut(&mut self, col: usize) -> &mut [Complex64] {
        &mut self.samples[col * self.rows..(col + 1) * self.rows]
    }

    /// ‖r‖_F², equal to Tr(rᴴr).
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Overwrites the block with `√P · s hᵀ + noise`; `gains = None` leaves
    /// pure noise. Noise is drawn column by column from `noise`.
    pub(crate) fn fill<R: RngCore>(
        &mut self,
        noise: &mut R,
        noise_power: f64,
        signal: Option<(&[Complex64], &[Complex64], f64)>,
    ) {
        let rows = self.rows;
        for (c, col) in self.samples.chunks_exact_mut(rows).enumerate() {
            for s in col.iter_mut() {
                *s = complex_gaussian(noise, noise_power);
            }
            if let Some((frame, gains, amplitude)) = signal {
                let g = gains[c] * amplitude;
                for (s, x) in col.iter_mut().zip(frame) {
                    *s += *x * g;
                }
            }
        }
    }
}

/// Λ_B = ‖s_RSᴴ r‖² / (N_RS ‖r‖_F²), in [0, 1].
pub fn bob_statistic(block: &ReceivedBlock, s_rs: &ReferenceSequence) -> Result<f64> {
    if block.rows != s_rs.len() || block.cols == 0 {
        return Err(Error::Dimension { expected_rows: s_rs.len(), expected_cols: block.cols.max(1), rows: block.rows, cols: block.cols });
    }
    let total = block.energy();
    if total == 0.0 {
        return Err(Error::Degenerate("all-zero received block"));
    }
    let projected: f64 = (0..block.cols)
        .map(|c| {
            block
                .column(c)
                .iter()
                .zip(s_rs.symbols())
                .fold(Complex64::new(0.0, 0.0), |acc, (r, s)| acc + s.conj() * r)
                .norm_sqr()
        })
        .sum();
    Ok((projected / (s_rs.len() as f64 * total)).clamp(0.0, 1.0))
}

/// T_W = Tr(rᴴr)/(M·N·σ_n²) − 1; the warden declares a frame when T_W > η_W.
pub fn willie_statistic(block: &ReceivedBlock, noise_power: f64) -> Result<f64> {
    if !(noise_power > 0.0) {
        return Err(Error::domain("noise power", noise_power));
    }
    if block.rows == 0 || block.cols == 0 {
        return Err(Error::Dimension { expected_rows: block.rows.max(1), expected_cols: block.cols.max(1), rows: block.rows, cols: block.cols });
    }
    Ok(block.energy() / ((block.rows * block.cols) as f64 * noise_power) - 1.0)
}
