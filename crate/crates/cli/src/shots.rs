//! Finite-shot measurement emulation.
//!
//! A trajectory sample's excited-state population is an expectation value;
//! a benchtop readout estimates it from `N` projective shots. This module
//! draws the shot count from a binomial distribution and reports the
//! empirical mean with its binomial standard error, using a counter-based
//! generator so a fixed seed reproduces the byte stream exactly.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};

/// Name of the generator recorded in `summary.json` so artifacts are
/// self-describing.
pub const RNG_ALGORITHM: &str = "chacha12";

/// Deterministic generator for a run, built from the resolved seed.
pub fn rng_from_seed(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Finite-shot estimate of a population.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasurementSample {
    /// Empirical excited fraction `k / N`.
    pub mean: f64,
    /// Binomial standard error `sqrt(mean (1 - mean) / N)`.
    pub std: f64,
}

/// Draw `shots` projective measurements of a state with excited-state
/// probability `p` (clamped into `[0, 1]` to absorb numerical dust).
pub fn emulate_shots(p: f64, shots: u64, rng: &mut ChaCha12Rng) -> MeasurementSample {
    assert!(shots >= 1, "shot count must be at least 1");
    let p = if p.is_finite() { p.clamp(0.0, 1.0) } else { 0.0 };
    let dist = Binomial::new(shots, p).expect("clamped probability is always valid");
    let k = dist.sample(rng);
    let n = shots as f64;
    let mean = k as f64 / n;
    MeasurementSample {
        mean,
        std: (mean * (1.0 - mean) / n).sqrt(),
    }
}
