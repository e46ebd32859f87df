//! RMS-based dBFS metering and gain normalization.
//!
//! "Loudness" here is `20·log10(rms)` over all samples of all channels. It
//! is not a K-weighted (BS.1770) measurement.

use rand::Rng;

use super::buffer::AudioBuffer;
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Mean energy a window must reach to count as active.
pub const ACTIVE_ENERGY_THRESHOLD: f64 = 0.001;

/// Random offsets tried by [`find_active_segment`] before giving up.
pub const ACTIVE_SEGMENT_ATTEMPTS: usize = 100;

/// Anything quieter than this (RMS dBFS) is treated as silence.
pub const SILENCE_FLOOR_DBFS: f64 = -100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoudnessStats {
    pub loudness_dbfs: f64,
    pub peak_dbfs: f64,
    pub rms_linear: f64,
}

pub fn amplitude_to_db(amplitude: f64) -> f64 {
    20.0 * amplitude.log10()
}

pub fn db_to_amplitude(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

pub fn measure_loudness_dbfs(buffer: &AudioBuffer) -> Result<LoudnessStats> {
    if buffer.is_empty() {
        return Err(Error::InvalidBuffer("empty buffer".into()));
    }
    let rms = buffer.mean_energy().sqrt();
    if rms == 0.0 {
        return Err(Error::SilentAudio);
    }
    Ok(LoudnessStats {
        loudness_dbfs: amplitude_to_db(rms),
        peak_dbfs: amplitude_to_db(buffer.peak()),
        rms_linear: rms,
    })
}

/// True when the buffer is empty or its RMS level is below [`SILENCE_FLOOR_DBFS`].
pub fn is_effectively_silent(buffer: &AudioBuffer) -> bool {
    buffer.is_empty() || buffer.mean_energy().sqrt() < db_to_amplitude(SILENCE_FLOOR_DBFS)
}

/// Gain that moves `buffer` to `target_dbfs`.
pub fn normalization_gain(buffer: &AudioBuffer, target_dbfs: f64) -> Result<f64> {
    let stats = measure_loudness_dbfs(buffer)?;
    // target/rms directly rather than through dB keeps the round trip tight
    Ok(db_to_amplitude(target_dbfs) / stats.rms_linear)
}

pub fn normalize_loudness(buffer: &AudioBuffer, target_dbfs: f64) -> Result<AudioBuffer> {
    Ok(buffer.scaled(normalization_gain(buffer, target_dbfs)?))
}

/// Mean energy of the window `[offset, offset + length)` across all channels.
pub fn window_energy(buffer: &AudioBuffer, offset: usize, length: usize) -> f64 {
    let total: f64 = buffer
        .channels()
        .iter()
        .map(|c| c[offset..offset + length].iter().map(|x| x * x).sum::<f64>())
        .sum();
    total / (length * buffer.num_channels()) as f64
}

/// Draw seeded random offsets until a window of `length` samples has mean
/// energy of at least [`ACTIVE_ENERGY_THRESHOLD`].
pub fn find_active_segment(buffer: &AudioBuffer, length: usize, rng_seed: u64) -> Result<usize> {
    if length == 0 || buffer.len() < length {
        return Err(Error::SignalTooShort {
            len: buffer.len(),
            needed: length.max(1),
        });
    }
    let mut rng = seeded(rng_seed);
    let max_offset = buffer.len() - length;
    for _ in 0..ACTIVE_SEGMENT_ATTEMPTS {
        let offset = rng.gen_range(0..=max_offset);
        if window_energy(buffer, offset, length) >= ACTIVE_ENERGY_THRESHOLD {
            return Ok(offset);
        }
    }
    Err(Error::NoActiveSegment(ACTIVE_SEGMENT_ATTEMPTS))
}
