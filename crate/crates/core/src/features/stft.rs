use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use realfft::{RealFftPlanner, RealToComplex};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<RealFftPlanner<f64>> = RefCell::new(RealFftPlanner::new());
}

fn plan(window_size: usize) -> Arc<dyn RealToComplex<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(window_size))
}

/// Periodic Hann window.
pub fn hann_window(size: usize) -> Vec<f64> {
    (0..size)
        .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / size as f64).cos())
        .collect()
}

/// Magnitude STFT, stored frame-major (`frames × bins`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    magnitudes: Vec<f64>,
    frames: usize,
    bins: usize,
    window_size: usize,
    hop: usize,
}

impl Spectrogram {
    pub fn frames(&self) -> usize {
        self.frames
    }

    /// `window_size / 2 + 1`.
    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn frame(&self, index: usize) -> &[f64] {
        &self.magnitudes[index * self.bins..(index + 1) * self.bins]
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }
}

/// Hann-windowed magnitude spectra of every complete frame; a trailing
/// partial frame is dropped.
pub fn stft_magnitude(x: &[f64], window_size: usize, hop: usize) -> Result<Spectrogram> {
    if window_size == 0 || hop == 0 {
        return Err(Error::InvalidConfig("window and hop must be positive".into()));
    }
    if x.len() < window_size {
        return Err(Error::SignalTooShort {
            len: x.len(),
            needed: window_size,
        });
    }
    let fft = plan(window_size);
    let window = hann_window(window_size);
    let frames = (x.len() - window_size) / hop + 1;
    let bins = window_size / 2 + 1;

    let mut input = fft.make_input_vec();
    let mut spectrum = fft.make_output_vec();
    let mut scratch = fft.make_scratch_vec();
    let mut magnitudes = Vec::with_capacity(frames * bins);
    for f in 0..frames {
        let start = f * hop;
        for ((dst, &s), &w) in input.iter_mut().zip(&x[start..start + window_size]).zip(&window) {
            *dst = s * w;
        }
        fft.process_with_scratch(&mut input, &mut spectrum, &mut scratch)
            .expect("buffer sizes come from the plan");
        magnitudes.extend(spectrum.iter().map(|c| (c.re * c.re + c.im * c.im).sqrt()));
    }
    Ok(Spectrogram {
        magnitudes,
        frames,
        bins,
        window_size,
        hop,
    })
}
