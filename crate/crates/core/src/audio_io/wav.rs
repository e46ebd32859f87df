//! RIFF/WAV reading and writing on top of `hound`.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};

use super::buffer::{AudioBuffer, SAMPLE_RATE};
use crate::error::{Error, Result};

const PCM16_FULL_SCALE: f64 = 32_768.0;
const PCM24_FULL_SCALE: f64 = 8_388_608.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Float32,
}

/// What happened during a write that the caller may want to know about.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WriteReport {
    /// Samples that exceeded full scale and were clipped (PCM16 only).
    pub clipped_samples: usize,
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioBuffer> {
    let path = path.as_ref();
    let wav_err = |source| Error::Wav {
        path: path.to_path_buf(),
        source,
    };
    let reader = WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    if spec.sample_rate != SAMPLE_RATE {
        return Err(Error::UnsupportedSampleRate(spec.sample_rate));
    }
    let num_channels = spec.channels as usize;
    if !(1..=2).contains(&num_channels) {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            detail: format!("{num_channels} channels"),
        });
    }

    let interleaved: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<Result<_, _>>()
            .map_err(wav_err)?,
        (SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| f64::from(v) / PCM16_FULL_SCALE))
            .collect::<Result<_, _>>()
            .map_err(wav_err)?,
        (SampleFormat::Int, 24) => reader
            .into_samples::<i32>()
            .map(|s| s.map(|v| f64::from(v) / PCM24_FULL_SCALE))
            .collect::<Result<_, _>>()
            .map_err(wav_err)?,
        (format, bits) => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                detail: format!("{bits}-bit {format:?}"),
            })
        }
    };
    if !interleaved.len().is_multiple_of(num_channels) {
        return Err(Error::UnsupportedFormat {
            path: path.to_path_buf(),
            detail: "truncated final frame".into(),
        });
    }

    let frames = interleaved.len() / num_channels;
    let mut channels = vec![Vec::with_capacity(frames); num_channels];
    for frame in interleaved.chunks_exact(num_channels) {
        for (ch, &s) in channels.iter_mut().zip(frame) {
            ch.push(s);
        }
    }
    AudioBuffer::new(channels, spec.sample_rate)
}

/// Quantize one sample to PCM16, returning whether it clipped.
pub fn quantize_pcm16(x: f64) -> (i16, bool) {
    let scaled = (x * PCM16_FULL_SCALE).round();
    if scaled > f64::from(i16::MAX) {
        (i16::MAX, scaled > PCM16_FULL_SCALE)
    } else if scaled < f64::from(i16::MIN) {
        (i16::MIN, true)
    } else {
        (scaled as i16, false)
    }
}

pub fn write_wav(buffer: &AudioBuffer, path: impl AsRef<Path>, format: WavFormat) -> Result<WriteReport> {
    let path = path.as_ref();
    let wav_err = |source| Error::Wav {
        path: path.to_path_buf(),
        source,
    };
    let spec = WavSpec {
        channels: buffer.num_channels() as u16,
        sample_rate: buffer.sample_rate(),
        bits_per_sample: match format {
            WavFormat::Pcm16 => 16,
            WavFormat::Float32 => 32,
        },
        sample_format: match format {
            WavFormat::Pcm16 => SampleFormat::Int,
            WavFormat::Float32 => SampleFormat::Float,
        },
    };
    let mut writer = WavWriter::create(path, spec).map_err(wav_err)?;
    let mut report = WriteReport::default();
    for i in 0..buffer.len() {
        for ch in buffer.channels() {
            match format {
                WavFormat::Float32 => writer.write_sample(ch[i] as f32).map_err(wav_err)?,
                WavFormat::Pcm16 => {
                    let (q, clipped) = quantize_pcm16(ch[i]);
                    report.clipped_samples += usize::from(clipped);
                    writer.write_sample(q).map_err(wav_err)?;
                }
            }
        }
    }
    writer.finalize().map_err(wav_err)?;
    if report.clipped_samples > 0 {
        log::warn!(
            "{}: clipped {} samples to PCM16 full scale",
            path.display(),
            report.clipped_samples
        );
    }
    Ok(report)
}
