//! Synthetic multitrack corpora shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::Path;

use mixmatch::audio_io::{write_wav, AudioBuffer, WavFormat, SAMPLE_RATE};
use mixmatch::rng::seeded;
use rand::Rng;

pub mod oracle;

const SR: f64 = SAMPLE_RATE as f64;

/// Kinds of synthetic source, cycled through by [`write_corpus`].
#[derive(Debug, Clone, Copy)]
pub enum Source {
    Bass,
    Pad,
    Lead,
    Hats,
    Kick,
    Noise,
}

const SOURCES: [Source; 6] = [Source::Bass, Source::Pad, Source::Lead, Source::Hats, Source::Kick, Source::Noise];

/// Render one mono source. Every source keeps a low broadband floor so no
/// window of it is digitally silent.
pub fn render_source(kind: Source, len: usize, seed: u64) -> Vec<f64> {
    let mut rng = seeded(seed);
    let f0 = 55.0 * 2f64.powf(rng.gen_range(0.0..12.0) / 12.0);
    let mut out = Vec::with_capacity(len);
    let mut lp = 0.0;
    for n in 0..len {
        let t = n as f64 / SR;
        let white: f64 = rng.gen_range(-1.0..1.0);
        let s = match kind {
            Source::Bass => {
                let env = 0.6 + 0.4 * (2.0 * PI * 2.0 * t).sin().abs();
                env * ((2.0 * PI * f0 * t).sin() + 0.3 * (2.0 * PI * 2.0 * f0 * t).sin())
            }
            Source::Pad => (1..6).map(|h| (2.0 * PI * 4.0 * f0 * h as f64 * t).sin() / h as f64).sum::<f64>() * 0.5,
            Source::Lead => {
                let vib = 1.0 + 0.01 * (2.0 * PI * 5.0 * t).sin();
                let f = 8.0 * f0 * vib;
                (2.0 * PI * f * t).sin() + 0.5 * (2.0 * PI * 3.0 * f * t).sin()
            }
            Source::Hats => {
                let phase = (t * 8.0).fract();
                let env = (-phase * 40.0).exp();
                lp = 0.3 * lp + 0.7 * white;
                (white - lp) * env
            }
            Source::Kick => {
                let phase = (t * 2.0).fract();
                let env = (-phase * 12.0).exp();
                env * (2.0 * PI * (50.0 + 80.0 * (-phase * 30.0).exp()) * phase).sin()
            }
            Source::Noise => {
                lp = 0.95 * lp + 0.05 * white;
                lp * 4.0
            }
        };
        out.push(0.3 * s + 1e-3 * white);
    }
    out
}

/// Write `n_tracks` mono float WAVs of `secs` seconds into `dir`.
pub fn write_corpus(dir: &Path, n_tracks: usize, secs: f64, seed: u64) {
    let len = (secs * SR).round() as usize;
    for i in 0..n_tracks {
        let kind = SOURCES[i % SOURCES.len()];
        let samples = render_source(kind, len, seed.wrapping_mul(1000).wrapping_add(i as u64));
        let path = dir.join(format!("{i:02}_{kind:?}.wav").to_lowercase());
        write_wav(&AudioBuffer::mono(samples), path, WavFormat::Float32).unwrap();
    }
}

/// Random stereo buffer with a per-channel level and some crest.
pub fn random_stereo(len: usize, seed: u64) -> AudioBuffer {
    let mut rng = seeded(seed);
    let gl = rng.gen_range(0.05..1.0);
    let gr = rng.gen_range(0.05..1.0);
    let f = rng.gen_range(40.0..8000.0);
    let mut l = Vec::with_capacity(len);
    let mut r = Vec::with_capacity(len);
    for n in 0..len {
        let tone = (2.0 * PI * f * n as f64 / SR).sin();
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        l.push(gl * (0.5 * tone + 0.5 * a));
        r.push(gr * (0.3 * tone + 0.7 * b));
    }
    AudioBuffer::stereo(l, r).unwrap()
}
