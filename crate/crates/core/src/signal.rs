//! Synthetic test-signal generators: sine, Gaussian-windowed wavelet, and
//! linear chirp.

use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};

const TAU: f64 = 2.0 * core::f64::consts::PI;

/// Description of a synthetic signal; frequencies are in cycles per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SignalSpec {
    Sine {
        n: usize,
        frequency: f64,
        amplitude: f64,
        phase: f64,
    },
    /// Gaussian-windowed cosine centered at `center` with envelope standard
    /// deviation `width`.
    Wavelet {
        n: usize,
        frequency: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// Linear chirp with instantaneous frequency `start_frequency + rate·i`.
    Chirp {
        n: usize,
        start_frequency: f64,
        rate: f64,
        amplitude: f64,
    },
}

impl SignalSpec {
    pub fn n(&self) -> usize {
        match *self {
            SignalSpec::Sine { n, .. }
            | SignalSpec::Wavelet { n, .. }
            | SignalSpec::Chirp { n, .. } => n,
        }
    }

    fn validate(&self) -> Result<()> {
        let check_len = |n: usize| -> Result<()> {
            if n < 2 {
                return Err(Error::Dimension {
                    what: "signal length",
                    expected: 2,
                    actual: n,
                });
            }
            Ok(())
        };
        let check_freq = |f: f64| -> Result<()> {
            if !(0.0..0.5).contains(&f) || f == 0.0 {
                return Err(Error::Parameter(String::from(
                    "frequency must lie in (0, 0.5) cycles per sample",
                )));
            }
            Ok(())
        };
        match *self {
            SignalSpec::Sine { n, frequency, .. } => {
                check_len(n)?;
                check_freq(frequency)
            }
            SignalSpec::Wavelet {
                n,
                frequency,
                width,
                ..
            } => {
                check_len(n)?;
                check_freq(frequency)?;
                if !(width > 0.0) {
                    return Err(Error::Parameter(String::from(
                        "wavelet width must be positive",
                    )));
                }
                Ok(())
            }
            SignalSpec::Chirp {
                n,
                start_frequency,
                rate,
                ..
            } => {
                check_len(n)?;
                check_freq(start_frequency)?;
                let end = start_frequency + rate * (n - 1) as f64;
                if !(0.0 < end && end < 0.5) {
                    return Err(Error::Parameter(String::from(
                        "chirp instantaneous frequency must stay in (0, 0.5)",
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Evaluate the closed-form signal described by `spec`.
pub fn generate(spec: &SignalSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let out = match *spec {
        SignalSpec::Sine {
            n,
            frequency,
            amplitude,
            phase,
        } => (0..n)
            .map(|i| amplitude * (TAU * frequency * i as f64 + phase).sin())
            .collect(),
        SignalSpec::Wavelet {
            n,
            frequency,
            amplitude,
            center,
            width,
        } => (0..n)
            .map(|i| {
                let d = i as f64 - center;
                amplitude * (-d * d / (2.0 * width * width)).exp() * (TAU * frequency * d).cos()
            })
            .collect(),
        SignalSpec::Chirp {
            n,
            start_frequency,
            rate,
            amplitude,
        } => (0..n)
            .map(|i| {
                let t = i as f64;
                amplitude * (TAU * (start_frequency * t + 0.5 * rate * t * t)).sin()
            })
            .collect(),
    };
    Ok(out)
}
