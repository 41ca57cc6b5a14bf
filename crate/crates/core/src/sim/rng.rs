//! Counter-based random streams. Every (node, round, purpose) triple gets
//! its own ChaCha stream under the scenario seed, so adding a node or a
//! round leaves every other draw untouched.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::scenario::{LossModel, PcdErrorModel};
use crate::NodeId;

/// Lower bound on an estimated contact duration, seconds.
pub const MIN_ESTIMATED_PCD_S: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Purpose {
    PcdError = 1,
    Loss = 2,
    Delivery = 3,
}

pub(crate) fn stream(seed: u64, node: NodeId, round: usize, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let round = (round as u64) & 0x00ff_ffff;
    rng.set_stream((u64::from(node.0) << 32) | (round << 8) | purpose as u64);
    rng
}

/// Seed for the `index`-th member of a batch of runs derived from `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Stream 0 is never used by `stream` (purposes start at 1).
    rng.set_stream(0);
    rng.set_word_pos(u128::from(index) * 2);
    rng.random()
}

/// Estimated contact duration: the true one plus a normal error, floored
/// at [`MIN_ESTIMATED_PCD_S`]. Without an error model the input is returned.
pub fn estimate_pcd<R: Rng + ?Sized>(true_duration: f64, model: Option<&PcdErrorModel>, rng: &mut R) -> f64 {
    match model {
        None => true_duration,
        Some(m) => {
            let error = if m.stddev > 0.0 {
                Normal::new(m.mean, m.stddev).expect("validated stddev").sample(rng)
            } else {
                m.mean
            };
            (true_duration + error).max(MIN_ESTIMATED_PCD_S)
        }
    }
}

/// Goodput of an upload link with loss probability `p`.
pub fn effective_upload_rate(nominal_mbps: f64, loss_probability: f64) -> f64 {
    nominal_mbps * (1.0 - loss_probability)
}

pub(crate) fn draw_loss<R: Rng + ?Sized>(model: Option<&LossModel>, rng: &mut R) -> f64 {
    match model {
        None => 0.0,
        Some(m) if m.hi > m.lo => rng.random_range(m.lo..=m.hi),
        Some(m) => m.lo,
    }
}
