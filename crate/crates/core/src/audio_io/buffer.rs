use crate::error::{Error, Result};

/// The only sample rate this crate processes.
pub const SAMPLE_RATE: u32 = 44_100;

/// Planar (non-interleaved) audio with one or two channels at 44.1 kHz.
///
/// Samples are nominally in `[-1, 1]` but nothing clips them; only PCM16
/// export does.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    channels: Vec<Vec<f64>>,
    sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self> {
        if sample_rate != SAMPLE_RATE {
            return Err(Error::UnsupportedSampleRate(sample_rate));
        }
        if channels.is_empty() || channels.len() > 2 {
            return Err(Error::InvalidBuffer(format!(
                "{} channels (expected 1 or 2)",
                channels.len()
            )));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::InvalidBuffer("channels differ in length".into()));
        }
        Ok(Self {
            channels,
            sample_rate,
        })
    }

    pub fn mono(samples: Vec<f64>) -> Self {
        Self {
            channels: vec![samples],
            sample_rate: SAMPLE_RATE,
        }
    }

    pub fn stereo(left: Vec<f64>, right: Vec<f64>) -> Result<Self> {
        Self::new(vec![left, right], SAMPLE_RATE)
    }

    pub fn silence(num_channels: usize, len: usize) -> Result<Self> {
        Self::new(vec![vec![0.0; len]; num_channels], SAMPLE_RATE)
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn is_mono(&self) -> bool {
        self.channels.len() == 1
    }

    pub fn is_stereo(&self) -> bool {
        self.channels.len() == 2
    }

    /// Number of samples per channel.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    pub fn left(&self) -> &[f64] {
        &self.channels[0]
    }

    /// Right channel; for mono buffers this is the only channel.
    pub fn right(&self) -> &[f64] {
        &self.channels[self.channels.len() - 1]
    }

    pub fn require_stereo(&self) -> Result<()> {
        if self.is_stereo() {
            Ok(())
        } else {
            Err(Error::NotStereo(self.num_channels()))
        }
    }

    pub fn require_mono(&self) -> Result<()> {
        if self.is_mono() {
            Ok(())
        } else {
            Err(Error::NotMono(self.num_channels()))
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|x| x * factor)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            channels: self
                .channels
                .iter()
                .map(|c| c.iter().map(|&x| f(x)).collect())
                .collect(),
            sample_rate: self.sample_rate,
        }
    }

    /// Copy of `len` samples starting at `start`, zero-filled past the end.
    pub fn segment(&self, start: usize, len: usize) -> Self {
        let channels = self
            .channels
            .iter()
            .map(|c| {
                let mut out = vec![0.0; len];
                if start < c.len() {
                    let end = (start + len).min(c.len());
                    out[..end - start].copy_from_slice(&c[start..end]);
                }
                out
            })
            .collect();
        Self {
            channels,
            sample_rate: self.sample_rate,
        }
    }

    pub fn peak(&self) -> f64 {
        self.channels
            .iter()
            .flatten()
            .fold(0.0_f64, |m, &x| m.max(x.abs()))
    }

    /// Mean of `x²` over every sample of every channel.
    pub fn mean_energy(&self) -> f64 {
        let total: f64 = self.channels.iter().flatten().map(|x| x * x).sum();
        total / (self.len() * self.num_channels()).max(1) as f64
    }

    pub fn max_abs_diff(&self, other: &AudioBuffer) -> f64 {
        self.channels
            .iter()
            .zip(&other.channels)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}
