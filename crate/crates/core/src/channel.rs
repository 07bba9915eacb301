//! BPSK over AWGN and channel LLRs.
//!
//! Bits map to `0 -> +1`, `1 -> -1`; positive LLRs favour bit 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelConfig {
    /// `sigma^2 = 1 / (2 R Eb/N0)` with `Eb/N0` converted from dB.
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Config(format!("code rate {rate} outside (0, 1]")));
        }
        if !ebn0_db.is_finite() {
            return Err(Error::Config(format!("Eb/N0 {ebn0_db} dB is not finite")));
        }
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        let sigma = (1.0 / (2.0 * rate * ebn0)).sqrt();
        Ok(ChannelConfig { ebn0_db, rate, sigma })
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

pub fn modulate(c: &BitVector) -> Vec<f64> {
    c.bipolar()
}

/// Adds independent `N(0, sigma^2)` noise to every symbol.
pub fn transmit<R: Rng + ?Sized>(x: &[f64], cfg: &ChannelConfig, rng: &mut R) -> Vec<f64> {
    x.iter()
        .map(|&s| {
            let z: f64 = rng.sample(StandardNormal);
            s + cfg.sigma * z
        })
        .collect()
}

/// `l_i = 2 y_i / sigma^2`.
pub fn llr(y: &[f64], cfg: &ChannelConfig) -> Vec<f64> {
    let scale = 2.0 / cfg.variance();
    y.iter().map(|&v| scale * v).collect()
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream for one Monte-Carlo trial.
///
/// The ChaCha key is derived from `(master_seed, point)` and the stream id is
/// the trial index, so every trial draws from its own sequence and results do
/// not depend on how trials are scheduled across threads.
pub fn trial_rng(master_seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut state = master_seed ^ point.wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}
