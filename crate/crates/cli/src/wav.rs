//! PCM WAV ingestion and emission.
//!
//! Input: 8/16/24/32-bit integer or 32-bit float PCM, any sample rate;
//! multichannel files are averaged down to mono and integer samples are
//! scaled by 2^(bits−1) into [−1, 1]. Output is always 16-bit PCM.

use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedWav {
    pub samples: Vec<f64>,
    pub sample_rate: u32,
}

pub fn load_wav(path: &Path) -> Result<LoadedWav, CliError> {
    let mut reader = hound::WavReader::open(path)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
    let spec = reader.spec();
    let channels = spec.channels as usize;
    if channels == 0 {
        return Err(CliError::io(format!(
            "{}: zero channels",
            path.display()
        )));
    }
    let interleaved: Vec<f64> = match spec.sample_format {
        hound::SampleFormat::Float => {
            if spec.bits_per_sample != 32 {
                return Err(CliError::io(format!(
                    "{}: unsupported float width {} (expected 32)",
                    path.display(),
                    spec.bits_per_sample
                )));
            }
            reader
                .samples::<f32>()
                .map(|s| s.map(f64::from))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?
        }
        hound::SampleFormat::Int => {
            let bits = spec.bits_per_sample;
            if !(1..=32).contains(&bits) {
                return Err(CliError::io(format!(
                    "{}: unsupported integer width {bits}",
                    path.display()
                )));
            }
            let scale = 1.0 / f64::from(1u32 << (bits - 1));
            reader
                .samples::<i32>()
                .map(|s| s.map(|v| f64::from(v) * scale))
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?
        }
    };
    let frames = interleaved.len() / channels;
    let mut samples = Vec::with_capacity(frames);
    for frame in 0..frames {
        let start = frame * channels;
        let sum: f64 = interleaved[start..start + channels].iter().sum();
        samples.push(sum / channels as f64);
    }
    Ok(LoadedWav {
        samples,
        sample_rate: spec.sample_rate,
    })
}

/// Write 16-bit PCM; samples are quantized by rounding x·32768 and values
/// outside [−1, 1] saturate at the integer range.
pub fn write_wav(path: &Path, samples: &[f64], sample_rate: u32) -> Result<(), CliError> {
    let spec = hound::WavSpec {
        channels: 1,
        sample_rate,
        bits_per_sample: 16,
        sample_format: hound::SampleFormat::Int,
    };
    let mut writer = hound::WavWriter::create(path, spec)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
    for &x in samples {
        let q = (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        writer
            .write_sample(q)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    }
    writer
        .finalize()
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    Ok(())
}
