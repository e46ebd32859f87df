//! Style objectives: the weighted audio-feature (AF) loss and the
//! multi-resolution STFT loss.

use serde::{Deserialize, Serialize};

use crate::audio_io::AudioBuffer;
use crate::error::{Error, Result};
use crate::features::{stft_magnitude, BarkSpectrum, MixFeatures, Spectrogram, BARK_BANDS, EPSILON};

/// Weights for RMS, crest factor, Bark spectrum, stereo width and stereo
/// imbalance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfLossConfig {
    pub w_rms: f64,
    pub w_cf: f64,
    pub w_bs: f64,
    pub w_sw: f64,
    pub w_si: f64,
}

impl Default for AfLossConfig {
    fn default() -> Self {
        Self {
            w_rms: 0.1,
            w_cf: 0.001,
            w_bs: 0.1,
            w_sw: 1.0,
            w_si: 1.0,
        }
    }
}

impl AfLossConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [self.w_rms, self.w_cf, self.w_bs, self.w_sw, self.w_si];
        if all.iter().all(|w| w.is_finite() && *w > 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidConfig("AF loss weights must be positive".into()))
        }
    }
}

/// Weighted per-feature distances; `total` is their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureDistanceReport {
    #[serde(rename = "RMS")]
    pub rms: f64,
    #[serde(rename = "CF")]
    pub cf: f64,
    #[serde(rename = "SW")]
    pub sw: f64,
    #[serde(rename = "SI")]
    pub si: f64,
    #[serde(rename = "BS")]
    pub bs: f64,
    #[serde(rename = "AF_loss")]
    pub total: f64,
}

/// Mean squared difference over the first `frames` Bark frames.
fn bark_mse(a: &BarkSpectrum, b: &BarkSpectrum) -> f64 {
    let frames = a.frames().min(b.frames());
    let n = frames * BARK_BANDS;
    if n == 0 {
        return 0.0;
    }
    a.values()[..n]
        .iter()
        .zip(&b.values()[..n])
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / n as f64
}

/// AF loss between already extracted feature sets.
///
/// Per-channel features are averaged over the two channels; stereo width
/// and imbalance are pair features and enter once.
pub fn af_loss_from_features(pred: &MixFeatures, reference: &MixFeatures, cfg: &AfLossConfig) -> FeatureDistanceReport {
    let mut rms = 0.0;
    let mut cf = 0.0;
    let mut bs = 0.0;
    for (p, r) in pred.channels.iter().zip(&reference.channels) {
        rms += 0.5 * (p.rms - r.rms).powi(2);
        cf += 0.5 * (p.crest_factor_db - r.crest_factor_db).powi(2);
        bs += 0.5 * bark_mse(&p.bark, &r.bark);
    }
    let report = FeatureDistanceReport {
        rms: cfg.w_rms * rms,
        cf: cfg.w_cf * cf,
        sw: cfg.w_sw * (pred.stereo_width - reference.stereo_width).powi(2),
        si: cfg.w_si * (pred.stereo_imbalance - reference.stereo_imbalance).powi(2),
        bs: cfg.w_bs * bs,
        total: 0.0,
    };
    FeatureDistanceReport {
        total: report.rms + report.cf + report.sw + report.si + report.bs,
        ..report
    }
}

fn require_audible_stereo(x: &AudioBuffer) -> Result<()> {
    x.require_stereo()?;
    if x.channels().iter().flatten().all(|&v| v == 0.0) {
        return Err(Error::SilentAudio);
    }
    Ok(())
}

/// AF loss between two stereo mixes. Lengths may differ; Bark frames are
/// compared up to the shorter frame count.
pub fn af_loss(pred: &AudioBuffer, reference: &AudioBuffer, cfg: &AfLossConfig) -> Result<FeatureDistanceReport> {
    require_audible_stereo(pred)?;
    require_audible_stereo(reference)?;
    if pred.sample_rate() != reference.sample_rate() {
        return Err(Error::InvalidConfig("sample rates differ".into()));
    }
    Ok(af_loss_from_features(
        &MixFeatures::extract(pred)?,
        &MixFeatures::extract(reference)?,
        cfg,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrstftConfig {
    pub window_sizes: Vec<usize>,
    pub epsilon: f64,
}

impl Default for MrstftConfig {
    fn default() -> Self {
        Self {
            window_sizes: vec![512, 2048, 8192],
            epsilon: EPSILON,
        }
    }
}

impl MrstftConfig {
    pub fn hop(window_size: usize) -> usize {
        window_size / 2
    }

    pub fn max_window(&self) -> usize {
        self.window_sizes.iter().copied().max().unwrap_or(0)
    }
}

/// Magnitude spectrograms of each channel at each resolution,
/// indexed `[resolution][channel]`.
pub fn mrstft_spectra(x: &AudioBuffer, cfg: &MrstftConfig) -> Result<Vec<Vec<Spectrogram>>> {
    if cfg.window_sizes.is_empty() {
        return Err(Error::InvalidConfig("MRSTFT needs at least one resolution".into()));
    }
    cfg.window_sizes
        .iter()
        .map(|&w| {
            x.channels()
                .iter()
                .map(|ch| stft_magnitude(ch, w, MrstftConfig::hop(w)))
                .collect()
        })
        .collect()
}

fn spectral_distance(a: &Spectrogram, b: &Spectrogram, eps: f64) -> f64 {
    let n = a.magnitudes().len() as f64;
    let (lin, log) = a
        .magnitudes()
        .iter()
        .zip(b.magnitudes())
        .fold((0.0, 0.0), |(lin, log), (&x, &y)| {
            (lin + (x - y).abs(), log + ((x + eps).ln() - (y + eps).ln()).abs())
        });
    lin / n + log / n
}

/// MRSTFT loss between precomputed spectra of equal-length signals.
pub fn mrstft_from_spectra(pred: &[Vec<Spectrogram>], reference: &[Vec<Spectrogram>], cfg: &MrstftConfig) -> f64 {
    let channels = pred[0].len();
    let mut total = 0.0;
    for (p_res, r_res) in pred.iter().zip(reference) {
        for (p, r) in p_res.iter().zip(r_res) {
            total += spectral_distance(p, r, cfg.epsilon);
        }
    }
    total / channels as f64
}

/// Sum over resolutions of mean linear plus mean log magnitude L1
/// distances, averaged over channels.
pub fn mrstft_loss(pred: &AudioBuffer, reference: &AudioBuffer, cfg: &MrstftConfig) -> Result<f64> {
    pred.require_stereo()?;
    reference.require_stereo()?;
    if pred.len() != reference.len() {
        return Err(Error::LengthMismatch(pred.len(), reference.len()));
    }
    if pred.len() < cfg.max_window() {
        return Err(Error::SignalTooShort {
            len: pred.len(),
            needed: cfg.max_window(),
        });
    }
    Ok(mrstft_from_spectra(
        &mrstft_spectra(pred, cfg)?,
        &mrstft_spectra(reference, cfg)?,
        cfg,
    ))
}
