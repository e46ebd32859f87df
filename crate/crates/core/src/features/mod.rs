//! Audio-feature transforms describing dynamics (RMS, crest factor),
//! spatialization (stereo width, stereo imbalance) and spectrum (log Bark
//! spectrum).

mod bark;
mod stft;

pub use bark::{
    bark_to_hz, build_bark_filterbank, default_filterbank, hz_to_bark, BarkFilterbank, BARK_BANDS, BARK_MIN_HZ,
};
pub use stft::{hann_window, stft_magnitude, Spectrogram};

use crate::audio_io::AudioBuffer;
use crate::error::{Error, Result};

/// Numerical-stability constant inside logs and energy ratios.
pub const EPSILON: f64 = 1e-8;

/// STFT size used for the Bark spectrum.
pub const BARK_WINDOW: usize = 2048;
pub const BARK_HOP: usize = 512;

pub fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

pub fn peak(x: &[f64]) -> f64 {
    x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Peak-to-RMS ratio in dB.
pub fn crest_factor(x: &[f64]) -> Result<f64> {
    let r = rms(x);
    if r == 0.0 {
        return Err(Error::SilentAudio);
    }
    Ok(20.0 * (peak(x) / r).log10())
}

/// Log Bark-band energies, `frames × 24`, frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BarkSpectrum {
    values: Vec<f64>,
    frames: usize,
}

impl BarkSpectrum {
    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn bands(&self) -> usize {
        BARK_BANDS
    }

    pub fn frame(&self, index: usize) -> &[f64] {
        &self.values[index * BARK_BANDS..(index + 1) * BARK_BANDS]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, frame: usize, band: usize) -> f64 {
        self.values[frame * BARK_BANDS + band]
    }
}

/// `log(FB · |STFT(x)| + ε)` with a 2048-point Hann STFT, hop 512.
pub fn bark_spectrum(x: &[f64]) -> Result<BarkSpectrum> {
    bark_spectrum_with(x, default_filterbank())
}

pub fn bark_spectrum_with(x: &[f64], fb: &BarkFilterbank) -> Result<BarkSpectrum> {
    let spec = stft_magnitude(x, BARK_WINDOW, BARK_HOP)?;
    let mut values = vec![0.0; spec.frames() * BARK_BANDS];
    for (f, out) in values.chunks_exact_mut(BARK_BANDS).enumerate() {
        fb.apply(spec.frame(f), out);
        for v in out.iter_mut() {
            *v = (*v + EPSILON).ln();
        }
    }
    Ok(BarkSpectrum {
        values,
        frames: spec.frames(),
    })
}

fn mean_square(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>() / x.len().max(1) as f64
}

/// Side-to-mid energy ratio of a stereo buffer.
pub fn stereo_width(mix: &AudioBuffer) -> Result<f64> {
    mix.require_stereo()?;
    let (l, r) = (mix.left(), mix.right());
    let n = l.len().max(1) as f64;
    let side: f64 = l.iter().zip(r).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n;
    let mid: f64 = l.iter().zip(r).map(|(a, b)| (a + b) * (a + b)).sum::<f64>() / n;
    Ok(side / (mid + EPSILON))
}

/// Right-minus-left energy balance in `[-1, 1]`.
pub fn stereo_imbalance(mix: &AudioBuffer) -> Result<f64> {
    mix.require_stereo()?;
    let (el, er) = (mean_square(mix.left()), mean_square(mix.right()));
    Ok((er - el) / (er + el + EPSILON))
}

/// Per-channel feature set.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelFeatures {
    pub rms: f64,
    /// 0 dB for a silent channel.
    pub crest_factor_db: f64,
    pub bark: BarkSpectrum,
}

impl ChannelFeatures {
    pub fn extract(x: &[f64]) -> Result<Self> {
        Ok(Self {
            rms: rms(x),
            crest_factor_db: crest_factor(x).unwrap_or(0.0),
            bark: bark_spectrum(x)?,
        })
    }
}

/// Every feature of a stereo mix.
#[derive(Debug, Clone, PartialEq)]
pub struct MixFeatures {
    pub channels: [ChannelFeatures; 2],
    pub stereo_width: f64,
    pub stereo_imbalance: f64,
}

impl MixFeatures {
    pub fn extract(mix: &AudioBuffer) -> Result<Self> {
        mix.require_stereo()?;
        Ok(Self {
            channels: [
                ChannelFeatures::extract(mix.left())?,
                ChannelFeatures::extract(mix.right())?,
            ],
            stereo_width: stereo_width(mix)?,
            stereo_imbalance: stereo_imbalance(mix)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn unit_sine(len: usize) -> Vec<f64> {
        // 441 Hz: exactly 100 samples per period
        (0..len)
            .map(|n| (2.0 * PI * 441.0 * n as f64 / 44_100.0).sin())
            .collect()
    }

    fn impulse_among_zeros() -> Vec<f64> {
        let mut x = vec![0.0; 100];
        x[37] = 1.0;
        x
    }

    #[test]
    fn rms_examples() {
        assert!((rms(&[0.5; 64]) - 0.5).abs() < 1e-15);
        assert!((rms(&unit_sine(44_100)) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
        assert!((rms(&impulse_among_zeros()) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn crest_factor_examples() {
        assert!(crest_factor(&[0.3; 10]).unwrap().abs() < 1e-12);
        assert!((crest_factor(&unit_sine(44_100)).unwrap() - 3.0103).abs() < 0.01);
        assert!((crest_factor(&impulse_among_zeros()).unwrap() - 20.0).abs() < 1e-9);
        assert!(matches!(crest_factor(&[0.0; 8]), Err(Error::SilentAudio)));
    }

    #[test]
    fn bark_of_zeros_is_log_epsilon() {
        let bs = bark_spectrum(&vec![0.0; 4096]).unwrap();
        assert_eq!((bs.frames(), bs.bands()), (5, 24));
        assert!(bs.values().iter().all(|&v| v == EPSILON.ln()));
    }

    #[test]
    fn bark_rises_bounded_under_gain() {
        let x: Vec<f64> = (0..8192).map(|n| ((n * 7919 % 257) as f64 / 128.0 - 1.0) * 0.1).collect();
        let loud: Vec<f64> = x.iter().map(|v| v * 10.0).collect();
        let (a, b) = (bark_spectrum(&x).unwrap(), bark_spectrum(&loud).unwrap());
        for (lo, hi) in a.values().iter().zip(b.values()) {
            let d = hi - lo;
            assert!(d > 0.0 && d <= 10f64.ln() + 1e-12);
        }
    }

    #[test]
    fn bark_rejects_short_signal() {
        assert!(matches!(bark_spectrum(&[0.1; 2000]), Err(Error::SignalTooShort { .. })));
    }

    #[test]
    fn width_examples() {
        let x = unit_sine(1000);
        let same = AudioBuffer::stereo(x.clone(), x.clone()).unwrap();
        assert_eq!(stereo_width(&same).unwrap(), 0.0);
        let left_only = AudioBuffer::stereo(x.clone(), vec![0.0; 1000]).unwrap();
        assert!((stereo_width(&left_only).unwrap() - 1.0).abs() < 1e-6);
        let inverted = AudioBuffer::stereo(x.clone(), x.iter().map(|v| -v).collect()).unwrap();
        // mid energy is exactly 0, so the ratio is side / ε
        let side = 4.0 * rms(&x).powi(2);
        assert!((stereo_width(&inverted).unwrap() - side / EPSILON).abs() < 1e-3 * side / EPSILON);
        assert!(stereo_width(&inverted).unwrap() >= 1e6);
    }

    #[test]
    fn imbalance_examples() {
        let x = unit_sine(1000);
        let same = AudioBuffer::stereo(x.clone(), x.clone()).unwrap();
        assert_eq!(stereo_imbalance(&same).unwrap(), 0.0);
        let right_only = AudioBuffer::stereo(vec![0.0; 1000], x.clone()).unwrap();
        assert!((stereo_imbalance(&right_only).unwrap() - 1.0).abs() < 1e-6);
        let left_only = AudioBuffer::stereo(x, vec![0.0; 1000]).unwrap();
        assert!((stereo_imbalance(&left_only).unwrap() + 1.0).abs() < 1e-6);
    }

    #[test]
    fn pair_features_need_stereo() {
        let m = AudioBuffer::mono(vec![0.1; 10]);
        assert!(matches!(stereo_width(&m), Err(Error::NotStereo(1))));
        assert!(matches!(stereo_imbalance(&m), Err(Error::NotStereo(1))));
    }
}
