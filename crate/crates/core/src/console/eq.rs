//! Four-band parametric EQ built from RBJ cookbook biquads.

use std::f64::consts::PI;

use super::params::{EqBandKind, EqBandParams, EqParams};
use crate::audio_io::AudioBuffer;
use crate::error::{Error, Result};

/// Biquad coefficients normalized so that `a0 == 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiquadCoefficients {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl BiquadCoefficients {
    pub const IDENTITY: Self = Self {
        b0: 1.0,
        b1: 0.0,
        b2: 0.0,
        a1: 0.0,
        a2: 0.0,
    };

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Complex response `H(e^{jω})` at normalized angular frequency `omega`, as (re, im).
    pub fn response(&self, omega: f64) -> (f64, f64) {
        // z^-1 = e^{-jω}
        let (c1, s1) = (omega.cos(), -omega.sin());
        let (c2, s2) = ((2.0 * omega).cos(), -(2.0 * omega).sin());
        let num = (self.b0 + self.b1 * c1 + self.b2 * c2, self.b1 * s1 + self.b2 * s2);
        let den = (1.0 + self.a1 * c1 + self.a2 * c2, self.a1 * s1 + self.a2 * s2);
        let d = den.0 * den.0 + den.1 * den.1;
        (
            (num.0 * den.0 + num.1 * den.1) / d,
            (num.1 * den.0 - num.0 * den.1) / d,
        )
    }

    pub fn magnitude(&self, freq_hz: f64, sample_rate: f64) -> f64 {
        let (re, im) = self.response(2.0 * PI * freq_hz / sample_rate);
        re.hypot(im)
    }
}

pub fn design_biquad(band: &EqBandParams, sample_rate: f64) -> Result<BiquadCoefficients> {
    let nyquist = sample_rate / 2.0;
    if !(band.center_hz > 0.0 && band.center_hz < nyquist) {
        return Err(Error::AboveNyquist {
            freq_hz: band.center_hz,
            nyquist_hz: nyquist,
        });
    }
    // 0 dB cancels every pole against a zero
    if band.gain_db == 0.0 {
        return Ok(BiquadCoefficients::IDENTITY);
    }

    let a = 10f64.powf(band.gain_db / 40.0);
    let w0 = 2.0 * PI * band.center_hz / sample_rate;
    let (sin_w0, cos_w0) = w0.sin_cos();
    let alpha = sin_w0 / (2.0 * band.effective_q());
    let sqrt_a_alpha = 2.0 * a.sqrt() * alpha;

    let (b0, b1, b2, a0, a1, a2) = match band.kind {
        EqBandKind::Peak => (
            1.0 + alpha * a,
            -2.0 * cos_w0,
            1.0 - alpha * a,
            1.0 + alpha / a,
            -2.0 * cos_w0,
            1.0 - alpha / a,
        ),
        EqBandKind::LowShelf => (
            a * ((a + 1.0) - (a - 1.0) * cos_w0 + sqrt_a_alpha),
            2.0 * a * ((a - 1.0) - (a + 1.0) * cos_w0),
            a * ((a + 1.0) - (a - 1.0) * cos_w0 - sqrt_a_alpha),
            (a + 1.0) + (a - 1.0) * cos_w0 + sqrt_a_alpha,
            -2.0 * ((a - 1.0) + (a + 1.0) * cos_w0),
            (a + 1.0) + (a - 1.0) * cos_w0 - sqrt_a_alpha,
        ),
        EqBandKind::HighShelf => (
            a * ((a + 1.0) + (a - 1.0) * cos_w0 + sqrt_a_alpha),
            -2.0 * a * ((a - 1.0) + (a + 1.0) * cos_w0),
            a * ((a + 1.0) + (a - 1.0) * cos_w0 - sqrt_a_alpha),
            (a + 1.0) - (a - 1.0) * cos_w0 + sqrt_a_alpha,
            2.0 * ((a - 1.0) - (a + 1.0) * cos_w0),
            (a + 1.0) - (a - 1.0) * cos_w0 - sqrt_a_alpha,
        ),
    };
    Ok(BiquadCoefficients {
        b0: b0 / a0,
        b1: b1 / a0,
        b2: b2 / a0,
        a1: a1 / a0,
        a2: a2 / a0,
    })
}

/// Filter `x` in place, Direct Form II transposed, zero initial state.
pub fn filter_in_place(c: &BiquadCoefficients, x: &mut [f64]) {
    if c.is_identity() {
        return;
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    for sample in x.iter_mut() {
        let input = *sample;
        let y = c.b0 * input + s1;
        s1 = c.b1 * input - c.a1 * y + s2;
        s2 = c.b2 * input - c.a2 * y;
        *sample = y;
    }
}

/// Run `x` through a chain of biquads, all stages per sample. Identity
/// stages are skipped. Matches applying [`filter_in_place`] stage by stage.
pub fn filter_cascade_in_place(stages: &[BiquadCoefficients], x: &mut [f64]) {
    let active: Vec<BiquadCoefficients> = stages.iter().filter(|c| !c.is_identity()).copied().collect();
    match active.as_slice() {
        [] => {}
        [c] => filter_in_place(c, x),
        _ => {
            let mut state = vec![(0.0, 0.0); active.len()];
            for sample in x.iter_mut() {
                let mut v = *sample;
                for (c, (s1, s2)) in active.iter().zip(state.iter_mut()) {
                    let y = c.b0 * v + *s1;
                    *s1 = c.b1 * v - c.a1 * y + *s2;
                    *s2 = c.b2 * v - c.a2 * y;
                    v = y;
                }
                *sample = v;
            }
        }
    }
}

pub fn design_eq(bands: &EqParams, sample_rate: f64) -> Result<[BiquadCoefficients; 4]> {
    Ok([
        design_biquad(&bands[0], sample_rate)?,
        design_biquad(&bands[1], sample_rate)?,
        design_biquad(&bands[2], sample_rate)?,
        design_biquad(&bands[3], sample_rate)?,
    ])
}

/// Run every channel through the four bands in order.
pub fn apply_eq(x: &AudioBuffer, bands: &EqParams) -> Result<AudioBuffer> {
    let coeffs = design_eq(bands, f64::from(x.sample_rate()))?;
    let channels = x
        .channels()
        .iter()
        .map(|ch| {
            let mut out = ch.clone();
            for c in &coeffs {
                filter_in_place(c, &mut out);
            }
            out
        })
        .collect();
    AudioBuffer::new(channels, x.sample_rate())
}
