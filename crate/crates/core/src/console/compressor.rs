//! Feed-forward soft-knee compressor with a one-pole peak envelope.

use super::params::CompressorParams;
use crate::audio_io::AudioBuffer;

/// Floor added to the envelope before taking its log.
pub const ENVELOPE_FLOOR: f64 = 1e-8;

/// 20 / ln 10: dB per neper of amplitude.
const DB_PER_NEPER: f64 = 20.0 / std::f64::consts::LN_10;

/// Static curve: gain change in dB for a detector level `level_db`.
pub fn gain_computer_db(level_db: f64, p: &CompressorParams) -> f64 {
    let over = level_db - p.threshold_db;
    let slope = 1.0 / p.ratio - 1.0;
    if 2.0 * over < -p.knee_db {
        0.0
    } else if 2.0 * over > p.knee_db {
        (p.threshold_db + over / p.ratio) - level_db
    } else if p.knee_db > 0.0 {
        slope * (over + p.knee_db / 2.0).powi(2) / (2.0 * p.knee_db)
    } else {
        // hard knee, exactly at threshold
        0.0
    }
}

/// One-pole smoothing coefficient for a time constant in milliseconds.
pub fn smoothing_coefficient(time_ms: f64, sample_rate: f64) -> f64 {
    (-1.0 / (sample_rate * time_ms / 1000.0)).exp()
}

/// Envelope of a rectified detector signal; attack applies while the input
/// exceeds the previous envelope value.
pub fn envelope(detector: impl IntoIterator<Item = f64>, p: &CompressorParams, sample_rate: f64) -> Vec<f64> {
    let alpha_attack = smoothing_coefficient(p.attack_ms, sample_rate);
    let alpha_release = smoothing_coefficient(p.release_ms, sample_rate);
    let mut e = 0.0;
    detector
        .into_iter()
        .map(|level| {
            let alpha = if level > e { alpha_attack } else { alpha_release };
            e = alpha * e + (1.0 - alpha) * level;
            e
        })
        .collect()
}

/// Compress one or two channels in place. Stereo uses a single linked
/// envelope driven by the per-sample maximum across channels.
pub fn compress_in_place(channels: &mut [Vec<f64>], p: &CompressorParams, sample_rate: f64) {
    if channels.is_empty() {
        return;
    }
    let makeup = 10f64.powf(p.makeup_db / 20.0);
    if p.ratio == 1.0 {
        if p.makeup_db != 0.0 {
            channels.iter_mut().flatten().for_each(|v| *v *= makeup);
        }
        return;
    }
    let alpha_attack = smoothing_coefficient(p.attack_ms, sample_rate);
    let alpha_release = smoothing_coefficient(p.release_ms, sample_rate);
    // below the knee the static curve is flat, so skip the dB round trip
    let knee_start = 10f64.powf((p.threshold_db - p.knee_db / 2.0) / 20.0);
    let mut e = 0.0;
    for i in 0..channels[0].len() {
        let level = channels.iter().fold(0.0_f64, |m, c| m.max(c[i].abs()));
        let alpha = if level > e { alpha_attack } else { alpha_release };
        e = alpha * e + (1.0 - alpha) * level;
        let gain = if e + ENVELOPE_FLOOR < knee_start {
            makeup
        } else {
            let level_db = DB_PER_NEPER * (e + ENVELOPE_FLOOR).ln();
            ((gain_computer_db(level_db, p) + p.makeup_db) / DB_PER_NEPER).exp()
        };
        for c in channels.iter_mut() {
            c[i] *= gain;
        }
    }
}

pub fn apply_compressor(x: &AudioBuffer, p: &CompressorParams, sample_rate: f64) -> AudioBuffer {
    let mut channels = x.channels().to_vec();
    compress_in_place(&mut channels, p, sample_rate);
    AudioBuffer::new(channels, x.sample_rate()).expect("shape preserved")
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    const FS: f64 = 44_100.0;

    fn params(threshold_db: f64, ratio: f64, knee_db: f64) -> CompressorParams {
        CompressorParams {
            threshold_db,
            ratio,
            attack_ms: 1.0,
            release_ms: 1000.0,
            knee_db,
            makeup_db: 0.0,
        }
    }

    fn sine(amplitude: f64, len: usize) -> Vec<f64> {
        (0..len)
            .map(|n| amplitude * (2.0 * PI * 1000.0 * n as f64 / FS).sin())
            .collect()
    }

    #[test]
    fn matches_direct_envelope_and_curve() {
        let n = 20_000;
        let x: Vec<f64> = (0..n)
            .map(|i| (0.2 + 0.8 * (i as f64 / n as f64)) * (2.0 * PI * 300.0 * i as f64 / FS).sin())
            .collect();
        for (threshold, ratio, knee, makeup) in [(-30.0, 4.0, 6.0, 3.0), (-10.0, 20.0, 0.0, 0.0), (-50.0, 1.5, 12.0, 1.0)] {
            let p = CompressorParams {
                threshold_db: threshold,
                ratio,
                attack_ms: 5.0,
                release_ms: 50.0,
                knee_db: knee,
                makeup_db: makeup,
            };
            let env = envelope(x.iter().map(|v| v.abs()), &p, FS);
            let y = apply_compressor(&AudioBuffer::mono(x.clone()), &p, FS);
            for i in 0..n {
                let level_db = 20.0 * (env[i] + ENVELOPE_FLOOR).log10();
                let g = 10f64.powf((gain_computer_db(level_db, &p) + makeup) / 20.0);
                assert!((y.channel(0)[i] - x[i] * g).abs() <= 1e-12, "sample {i}");
            }
        }
    }

    #[test]
    fn unity_ratio_is_identity() {
        let x = AudioBuffer::mono(sine(0.9, 8192));
        for threshold in [-60.0, -20.0, 0.0] {
            let y = apply_compressor(&x, &params(threshold, 1.0, 6.0), FS);
            assert!(y.max_abs_diff(&x) <= 1e-6);
        }
    }

    #[test]
    fn below_threshold_is_identity() {
        let x = AudioBuffer::mono(sine(0.1, 8192));
        let y = apply_compressor(&x, &params(0.0, 8.0, 0.0), FS);
        assert!(y.max_abs_diff(&x) <= 1e-6);
    }

    #[test]
    fn static_curve_regions() {
        let p = params(-20.0, 4.0, 10.0);
        assert_eq!(gain_computer_db(-40.0, &p), 0.0);
        assert!((gain_computer_db(0.0, &p) - (-15.0)).abs() < 1e-12);
        // knee is continuous at both edges
        let lo = gain_computer_db(-25.0, &p);
        let hi = gain_computer_db(-15.0, &p);
        assert!(lo.abs() < 1e-12);
        assert!((hi - (0.25 - 1.0) * 5.0).abs() < 1e-12);
        // hard knee at exactly the threshold does not divide by zero
        assert_eq!(gain_computer_db(-20.0, &params(-20.0, 4.0, 0.0)), 0.0);
    }

    #[test]
    fn steady_state_gain_reduction_matches_static_curve() {
        let p = params(-26.0, 4.0, 0.0);
        let n = 3 * 44_100;
        // the envelope is homogeneous in input scale: calibrate the
        // amplitude that puts the settled envelope at -6 dB
        let unit_env = envelope(sine(1.0, n).into_iter().map(f64::abs), &p, FS);
        let settled: f64 = unit_env[n - 4410..].iter().sum::<f64>() / 4410.0;
        let amplitude = 10f64.powf(-6.0 / 20.0) / settled;

        let x = sine(amplitude, n);
        let y = apply_compressor(&AudioBuffer::mono(x.clone()), &p, FS);
        let expected = gain_computer_db(-6.0, &p);
        assert!((expected + 15.0).abs() < 1e-12);
        for i in (n - 4410..n).filter(|&i| x[i].abs() > 0.5 * amplitude) {
            let g = 20.0 * (y.channel(0)[i] / x[i]).log10();
            assert!((g - expected).abs() < 0.5, "sample {i}: {g} dB");
        }
    }

    #[test]
    fn linked_stereo_uses_shared_gain() {
        let l = sine(0.8, 4096);
        let r: Vec<f64> = l.iter().map(|v| v * 0.1).collect();
        let y = apply_compressor(&AudioBuffer::stereo(l.clone(), r.clone()).unwrap(), &params(-30.0, 6.0, 3.0), FS);
        for i in (100..4096).filter(|&i| l[i].abs() > 0.05) {
            let gl = y.channel(0)[i] / l[i];
            let gr = y.channel(1)[i] / r[i];
            assert!((gl - gr).abs() < 1e-9);
        }
    }

    #[test]
    fn makeup_applies_on_top() {
        let x = AudioBuffer::mono(sine(0.01, 2048));
        let mut p = params(0.0, 4.0, 0.0);
        p.makeup_db = 6.0;
        let y = apply_compressor(&x, &p, FS);
        let ratio = y.channel(0)[100] / x.channel(0)[100];
        assert!((ratio - 10f64.powf(6.0 / 20.0)).abs() < 1e-9);
    }
}
