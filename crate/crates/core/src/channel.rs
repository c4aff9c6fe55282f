//! BPSK over the binary-input AWGN channel, all-zero codeword only.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_rate(rate: f64) -> Result<()> {
    if rate.is_finite() && rate > 0.0 && rate <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate(rate))
    }
}

/// Noise standard deviation per real dimension for unit-energy BPSK:
/// `sigma^2 = 1 / (2 * rate * 10^(ebn0_db / 10))`.
pub fn sigma_from_ebn0(ebn0_db: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    if !ebn0_db.is_finite() {
        return Err(Error::InvalidParameters(format!("Eb/N0 must be finite, got {ebn0_db}")));
    }
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    Ok((1.0 / (2.0 * rate * ebn0)).sqrt())
}

/// Channel reliability `2 / sigma^2` at a design operating point.
pub fn lc_for_design_point(design_ebn0_db: f64, rate: f64) -> Result<f64> {
    check_rate(rate)?;
    if !design_ebn0_db.is_finite() {
        return Err(Error::InvalidParameters(format!(
            "design Eb/N0 must be finite, got {design_ebn0_db}"
        )));
    }
    Ok(4.0 * rate * 10f64.powf(design_ebn0_db / 10.0))
}

/// How the LLR scale follows the operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ReliabilityMode {
    /// `lc = 2 / sigma^2` at the actual operating point.
    #[default]
    Matched,
    /// `lc` frozen at a design Eb/N0 (dB) regardless of the actual one.
    Fixed { design_ebn0_db: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
    pub lc: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64, mode: ReliabilityMode) -> Result<Self> {
        let sigma = sigma_from_ebn0(ebn0_db, rate)?;
        let lc = match mode {
            ReliabilityMode::Matched => 2.0 / (sigma * sigma),
            ReliabilityMode::Fixed { design_ebn0_db } => lc_for_design_point(design_ebn0_db, rate)?,
        };
        Ok(Self { ebn0_db, rate, sigma, lc })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedWord {
    pub y: Vec<f64>,
    pub llr: Vec<f64>,
}

/// Sends the all-zero codeword (every symbol `+1`) and returns the channel
/// outputs with their LLRs `lc * y`.
pub fn transmit_all_zero<R: Rng + ?Sized>(n: usize, params: &ChannelParams, rng: &mut R) -> ReceivedWord {
    let y: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            1.0 + params.sigma * z
        })
        .collect();
    let llr = y.iter().map(|&v| v * params.lc).collect();
    ReceivedWord { y, llr }
}

/// Independent generator for one simulated codeword. The ChaCha key holds
/// `(master_seed, point)` and the stream id is the codeword index, so the
/// noise of a codeword never depends on which worker draws it.
pub fn codeword_rng(master_seed: u64, point: u64, codeword: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&master_seed.to_le_bytes());
    key[8..16].copy_from_slice(&point.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(codeword);
    rng
}
