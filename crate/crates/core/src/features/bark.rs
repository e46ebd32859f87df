//! Triangular filterbank on the Bark axis.

use std::sync::OnceLock;

use crate::audio_io::SAMPLE_RATE;

pub const BARK_BANDS: usize = 24;

/// Lowest frequency covered by the band layout.
pub const BARK_MIN_HZ: f64 = 20.0;

/// Zwicker's arctan approximation of the Bark scale.
pub fn hz_to_bark(f: f64) -> f64 {
    13.0 * (0.00076 * f).atan() + 3.5 * (f / 7500.0).powi(2).atan()
}

/// Inverse of [`hz_to_bark`] by bisection (the map is strictly increasing).
pub fn bark_to_hz(z: f64, max_hz: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, max_hz);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if hz_to_bark(mid) < z {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `band_count × bins` weights, with each band's non-zero span cached.
#[derive(Debug, Clone, PartialEq)]
pub struct BarkFilterbank {
    weights: Vec<f64>,
    spans: Vec<(usize, usize)>,
    bins: usize,
}

impl BarkFilterbank {
    pub fn band_count(&self) -> usize {
        self.spans.len()
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn weight(&self, band: usize, bin: usize) -> f64 {
        self.weights[band * self.bins + bin]
    }

    pub fn row(&self, band: usize) -> &[f64] {
        &self.weights[band * self.bins..(band + 1) * self.bins]
    }

    /// `FB · magnitudes` for one spectrum frame, written into `out`.
    pub fn apply(&self, magnitudes: &[f64], out: &mut [f64]) {
        debug_assert_eq!(magnitudes.len(), self.bins);
        for (band, (&(start, end), slot)) in self.spans.iter().zip(out.iter_mut()).enumerate() {
            let row = &self.row(band)[start..end];
            *slot = row.iter().zip(&magnitudes[start..end]).map(|(w, m)| w * m).sum();
        }
    }
}

/// 24 triangles with centres evenly spaced in Bark between 20 Hz and
/// Nyquist. Each triangle reaches zero at its neighbours' centres. The
/// first band stays at 1 below its centre and the last band stays at 1
/// above its centre, so every bin from DC to Nyquist is covered.
pub fn build_bark_filterbank(window_size: usize, sample_rate: f64) -> BarkFilterbank {
    let bins = window_size / 2 + 1;
    let nyquist = sample_rate / 2.0;
    let (z_lo, z_hi) = (hz_to_bark(BARK_MIN_HZ), hz_to_bark(nyquist));
    let step = (z_hi - z_lo) / (BARK_BANDS + 1) as f64;
    let edges: Vec<f64> = (0..BARK_BANDS + 2)
        .map(|k| match k {
            0 => BARK_MIN_HZ,
            k if k == BARK_BANDS + 1 => nyquist,
            k => bark_to_hz(z_lo + k as f64 * step, nyquist),
        })
        .collect();

    let mut weights = vec![0.0; BARK_BANDS * bins];
    let mut spans = Vec::with_capacity(BARK_BANDS);
    for band in 0..BARK_BANDS {
        let (lo, centre, hi) = (edges[band], edges[band + 1], edges[band + 2]);
        let row = &mut weights[band * bins..(band + 1) * bins];
        for (bin, w) in row.iter_mut().enumerate() {
            let f = bin as f64 * sample_rate / window_size as f64;
            *w = if f <= centre {
                if band == 0 {
                    1.0
                } else {
                    ((f - lo) / (centre - lo)).max(0.0)
                }
            } else if band == BARK_BANDS - 1 {
                1.0
            } else {
                ((hi - f) / (hi - centre)).max(0.0)
            };
        }
        let start = row.iter().position(|&w| w > 0.0).unwrap_or(0);
        let end = row.iter().rposition(|&w| w > 0.0).map_or(start, |e| e + 1);
        spans.push((start, end));
    }
    BarkFilterbank {
        weights,
        spans,
        bins,
    }
}

/// Shared filterbank for the 2048-point, 44.1 kHz analysis.
pub fn default_filterbank() -> &'static BarkFilterbank {
    static FB: OnceLock<BarkFilterbank> = OnceLock::new();
    FB.get_or_init(|| build_bark_filterbank(super::BARK_WINDOW, f64::from(SAMPLE_RATE)))
}
