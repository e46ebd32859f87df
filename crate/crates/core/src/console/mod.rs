//! The mixing console: one channel strip per mono track (gain, EQ,
//! compressor, pan), a sum of the wet tracks, and a stereo master bus
//! (EQ, compressor).

mod compressor;
mod eq;
mod json;
mod params;

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

pub use compressor::{
    apply_compressor, compress_in_place, envelope, gain_computer_db, smoothing_coefficient, ENVELOPE_FLOOR,
};
pub use eq::{apply_eq, design_biquad, design_eq, filter_cascade_in_place, filter_in_place, BiquadCoefficients};
pub use json::{params_from_json, params_to_json, read_params, write_params, PARAMS_SCHEMA_VERSION};
pub use params::{
    denormalize, flat_eq, param_count, param_ranges, ChannelStripParams, CompressorParams, ConsoleParams,
    EqBandKind, EqBandParams, EqParams, MasterBusParams, NormalizedParamVector, ParamRange, ParamScope, ParamSlot,
    Scale, MASTER_PARAM_COUNT, MASTER_RANGES, SHELF_Q, STRIP_PARAM_COUNT, STRIP_RANGES,
};

use crate::audio_io::{AudioBuffer, MultitrackSet};
use crate::error::{Error, Result};
use crate::rng::seeded;

pub fn apply_gain(x: &AudioBuffer, gain_db: f64) -> AudioBuffer {
    x.scaled(10f64.powf(gain_db / 20.0))
}

/// Constant-power pan gains `(left, right)`; 0 is hard left, 1 hard right.
pub fn pan_gains(pan: f64) -> (f64, f64) {
    let theta = pan * FRAC_PI_2;
    (theta.cos(), theta.sin())
}

pub fn apply_pan(x: &AudioBuffer, pan: f64) -> Result<AudioBuffer> {
    x.require_mono()?;
    if !(0.0..=1.0).contains(&pan) {
        return Err(Error::ParamOutOfRange {
            name: "pan".into(),
            value: pan,
            min: 0.0,
            max: 1.0,
        });
    }
    let (gl, gr) = pan_gains(pan);
    let src = x.channel(0);
    AudioBuffer::stereo(
        src.iter().map(|v| v * gl).collect(),
        src.iter().map(|v| v * gr).collect(),
    )
}

/// gain → EQ → compressor on the mono signal, then pan to stereo.
fn render_strip(x: &[f64], p: &ChannelStripParams, sample_rate: f64) -> Result<[Vec<f64>; 2]> {
    let coeffs = design_eq(&p.eq, sample_rate)?;
    let gain = 10f64.powf(p.gain_db / 20.0);
    let mut mono = vec![x.iter().map(|v| v * gain).collect::<Vec<f64>>()];
    filter_cascade_in_place(&coeffs, &mut mono[0]);
    compress_in_place(&mut mono, &p.comp, sample_rate);
    let (gl, gr) = pan_gains(p.pan);
    let mono = mono.pop().unwrap();
    Ok([
        mono.iter().map(|v| v * gl).collect(),
        mono.iter().map(|v| v * gr).collect(),
    ])
}

pub fn process_channel_strip(x: &AudioBuffer, p: &ChannelStripParams) -> Result<AudioBuffer> {
    x.require_mono()?;
    let [l, r] = render_strip(x.channel(0), p, f64::from(x.sample_rate()))?;
    AudioBuffer::stereo(l, r)
}

/// Linked-stereo EQ then compressor on the summed bus.
pub fn process_master_bus(bus: &AudioBuffer, p: &MasterBusParams) -> Result<AudioBuffer> {
    bus.require_stereo()?;
    let sample_rate = f64::from(bus.sample_rate());
    let coeffs = design_eq(&p.eq, sample_rate)?;
    let mut channels = bus.channels().to_vec();
    for ch in channels.iter_mut() {
        filter_cascade_in_place(&coeffs, ch);
    }
    compress_in_place(&mut channels, &p.comp, sample_rate);
    AudioBuffer::new(channels, bus.sample_rate())
}

/// Render the stereo mix of `tracks` with `params`.
///
/// Wet tracks are summed (not averaged) in track order, then run through the
/// master bus. Nothing is clipped.
pub fn mix(tracks: &MultitrackSet, params: &ConsoleParams) -> Result<AudioBuffer> {
    if params.n_tracks() != tracks.len() {
        return Err(Error::ParamCount {
            expected: tracks.len(),
            got: params.n_tracks(),
        });
    }
    let len = tracks.num_samples();
    let sample_rate = f64::from(tracks.tracks()[0].sample_rate());
    let mut bus = [vec![0.0; len], vec![0.0; len]];
    for (track, strip) in tracks.tracks().iter().zip(&params.strips) {
        let wet = render_strip(track.channel(0), strip, sample_rate)?;
        for (acc, w) in bus.iter_mut().zip(&wet) {
            for (a, v) in acc.iter_mut().zip(w) {
                *a += v;
            }
        }
    }
    let [l, r] = bus;
    process_master_bus(&AudioBuffer::stereo(l, r)?, &params.master)
}

/// Every normalized parameter drawn uniformly from `[0, 1]`, then mapped to
/// physical units.
pub fn sample_random_params(n_tracks: usize, seed: u64) -> Result<ConsoleParams> {
    let mut rng = seeded(seed);
    sample_random_params_with(n_tracks, &mut rng)
}

pub fn sample_random_params_with(n_tracks: usize, rng: &mut impl Rng) -> Result<ConsoleParams> {
    if n_tracks == 0 {
        return Err(Error::InvalidConfig("at least one track required".into()));
    }
    let v: Vec<f64> = (0..param_count(n_tracks)).map(|_| rng.gen::<f64>()).collect();
    denormalize(&v, n_tracks)
}
