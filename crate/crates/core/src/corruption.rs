//! Corruption models that produce (observed signal, mask) pairs from a clean
//! signal: clipping, random missing samples, and additive Gaussian noise.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::ObservationMask;

/// One corruption to apply to a clean signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorruptionSpec {
    /// Saturate at ±level; clipped samples are recorded as missing.
    Clip { level: f64 },
    /// Drop exactly ⌊rate·N⌋ samples chosen uniformly without replacement.
    RandomMissing { rate: f64, seed: u64 },
    /// Add i.i.d. Gaussian noise; every sample stays observed.
    AdditiveNoise { std: f64, seed: u64 },
}

impl CorruptionSpec {
    pub fn apply(&self, clean: &[f64]) -> Result<(Vec<f64>, ObservationMask)> {
        match *self {
            CorruptionSpec::Clip { level } => clip(clean, level),
            CorruptionSpec::RandomMissing { rate, seed } => random_missing(clean, rate, seed),
            CorruptionSpec::AdditiveNoise { std, seed } => {
                let noisy = add_noise(clean, std, seed)?;
                let mask = ObservationMask::full(clean.len());
                Ok((noisy, mask))
            }
        }
    }
}

/// Clip to [−c, c]. Samples outside the range are saturated in the output
/// and marked missing; Ω = {n : −c ≤ clean[n] ≤ c}. The saturated values
/// are kept in the returned signal for display only and are excluded from
/// every reconstruction through the mask.
pub fn clip(clean: &[f64], c: f64) -> Result<(Vec<f64>, ObservationMask)> {
    if !(c > 0.0) {
        return Err(Error::Parameter(String::from(
            "clip level must be positive",
        )));
    }
    let clipped: Vec<f64> = clean.iter().map(|&v| v.clamp(-c, c)).collect();
    let observed: Vec<bool> = clean.iter().map(|&v| (-c..=c).contains(&v)).collect();
    Ok((clipped, ObservationMask::new(observed)))
}

/// Remove exactly ⌊rate·N⌋ samples chosen uniformly without replacement.
/// Unobserved values are zeroed and never read downstream.
pub fn random_missing(clean: &[f64], rate: f64, seed: u64) -> Result<(Vec<f64>, ObservationMask)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::Parameter(String::from(
            "missing rate must lie in [0, 1)",
        )));
    }
    let n = clean.len();
    let n_missing = (rate * n as f64).floor() as usize;
    if n - n_missing < 2 {
        return Err(Error::TooFewObserved {
            needed: 2,
            actual: n - n_missing,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let missing = rand::seq::index::sample(&mut rng, n, n_missing);
    let mut observed = alloc::vec![true; n];
    for idx in missing.iter() {
        observed[idx] = false;
    }
    let y: Vec<f64> = clean
        .iter()
        .zip(&observed)
        .map(|(&v, &o)| if o { v } else { 0.0 })
        .collect();
    Ok((y, ObservationMask::new(observed)))
}

/// Add i.i.d. N(0, std²) noise.
pub fn add_noise(clean: &[f64], std: f64, seed: u64) -> Result<Vec<f64>> {
    if std < 0.0 {
        return Err(Error::Parameter(String::from(
            "noise standard deviation must be nonnegative",
        )));
    }
    if std == 0.0 {
        return Ok(clean.to_vec());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(clean
        .iter()
        .map(|&v| v + std * standard_normal(&mut rng))
        .collect())
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u1: f64 = rng.gen();
        if u1 > 0.0 {
            let u2: f64 = rng.gen();
            return (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos();
        }
    }
}
