//! Straightforward loop implementations of the features and the AF loss:
//! naive DFT, dense filterbank, Newton-inverted Bark edges.

use std::f64::consts::PI;

use mixmatch::audio_io::AudioBuffer;
use mixmatch::features::{self, MixFeatures};
use mixmatch::losses::{af_loss, AfLossConfig};

pub const N: usize = 2048;
pub const HOP: usize = 512;
pub const BANDS: usize = 24;
pub const FS: f64 = 44_100.0;
pub const EPS: f64 = 1e-8;
pub const REL_TOL: f64 = 1e-6;
// absolute slack for quantities that are exactly zero in both versions
pub const ABS_FLOOR: f64 = 1e-12;

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()) + ABS_FLOOR
}

fn bark(f: f64) -> f64 {
    13.0 * (0.00076 * f).atan() + 3.5 * ((f / 7500.0) * (f / 7500.0)).atan()
}

fn bark_slope(f: f64) -> f64 {
    let u = f / 7500.0;
    13.0 * 0.00076 / (1.0 + (0.00076 * f).powi(2)) + 3.5 * 2.0 * u / 7500.0 / (1.0 + u.powi(4))
}

fn inverse_bark(z: f64) -> f64 {
    let mut f = 1000.0;
    for _ in 0..200 {
        f -= (bark(f) - z) / bark_slope(f);
        f = f.clamp(1.0, FS / 2.0);
    }
    f
}

pub struct Oracle {
    pub fb: Vec<[f64; 1025]>,
    cos: Vec<f64>,
    sin: Vec<f64>,
    window: Vec<f64>,
}

impl Oracle {
    pub fn new() -> Self {
        let z0 = bark(20.0);
        let z1 = bark(FS / 2.0);
        let mut edges = vec![20.0];
        for k in 1..=BANDS {
            edges.push(inverse_bark(z0 + (z1 - z0) * k as f64 / (BANDS + 1) as f64));
        }
        edges.push(FS / 2.0);
        let mut fb = vec![[0.0; 1025]; BANDS];
        for (b, row) in fb.iter_mut().enumerate() {
            for (k, w) in row.iter_mut().enumerate() {
                let f = k as f64 * FS / N as f64;
                let rise = if b == 0 { 1.0 } else { (f - edges[b]) / (edges[b + 1] - edges[b]) };
                let fall = if b == BANDS - 1 { 1.0 } else { (edges[b + 2] - f) / (edges[b + 2] - edges[b + 1]) };
                *w = rise.min(fall).clamp(0.0, 1.0);
            }
        }
        Oracle {
            fb,
            cos: (0..N).map(|i| (2.0 * PI * i as f64 / N as f64).cos()).collect(),
            sin: (0..N).map(|i| (2.0 * PI * i as f64 / N as f64).sin()).collect(),
            window: (0..N).map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / N as f64).cos())).collect(),
        }
    }

    pub fn bark_spectrum(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let mut start = 0;
        while start + N <= x.len() {
            let frame: Vec<f64> = (0..N).map(|i| x[start + i] * self.window[i]).collect();
            let mut mag = [0.0; 1025];
            for (k, m) in mag.iter_mut().enumerate() {
                let (mut re, mut im) = (0.0, 0.0);
                for (n, v) in frame.iter().enumerate() {
                    let idx = (k * n) % N;
                    re += v * self.cos[idx];
                    im -= v * self.sin[idx];
                }
                *m = (re * re + im * im).sqrt();
            }
            out.push(self.fb.iter().map(|row| (row.iter().zip(&mag).map(|(w, m)| w * m).sum::<f64>() + EPS).ln()).collect());
            start += HOP;
        }
        out
    }
}

pub fn naive_rms(x: &[f64]) -> f64 {
    let mut s = 0.0;
    for v in x {
        s += v * v;
    }
    (s / x.len() as f64).sqrt()
}

pub fn naive_cf(x: &[f64]) -> f64 {
    let mut p: f64 = 0.0;
    for v in x {
        p = p.max(v.abs());
    }
    20.0 * (p / naive_rms(x)).log10()
}

pub fn naive_sw_si(l: &[f64], r: &[f64]) -> (f64, f64) {
    let (mut side, mut mid, mut el, mut er) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..l.len() {
        side += (l[i] - r[i]).powi(2);
        mid += (l[i] + r[i]).powi(2);
        el += l[i] * l[i];
        er += r[i] * r[i];
    }
    let n = l.len() as f64;
    ((side / n) / (mid / n + EPS), (er / n - el / n) / (er / n + el / n + EPS))
}

pub struct NaiveFeatures {
    pub rms: [f64; 2],
    pub cf: [f64; 2],
    pub bs: [Vec<Vec<f64>>; 2],
    pub sw: f64,
    pub si: f64,
}

pub fn naive_features(o: &Oracle, x: &AudioBuffer) -> NaiveFeatures {
    let (l, r) = (x.left(), x.right());
    let (sw, si) = naive_sw_si(l, r);
    NaiveFeatures {
        rms: [naive_rms(l), naive_rms(r)],
        cf: [naive_cf(l), naive_cf(r)],
        bs: [o.bark_spectrum(l), o.bark_spectrum(r)],
        sw,
        si,
    }
}

pub fn naive_af(p: &NaiveFeatures, r: &NaiveFeatures) -> [f64; 6] {
    let w = [0.1, 0.001, 1.0, 1.0, 0.1];
    let (mut rms, mut cf, mut bs) = (0.0, 0.0, 0.0);
    for c in 0..2 {
        rms += (p.rms[c] - r.rms[c]).powi(2) / 2.0;
        cf += (p.cf[c] - r.cf[c]).powi(2) / 2.0;
        let frames = p.bs[c].len().min(r.bs[c].len());
        let mut acc = 0.0;
        for f in 0..frames {
            for b in 0..BANDS {
                acc += (p.bs[c][f][b] - r.bs[c][f][b]).powi(2);
            }
        }
        bs += acc / (frames * BANDS) as f64 / 2.0;
    }
    let terms = [w[0] * rms, w[1] * cf, w[2] * (p.sw - r.sw).powi(2), w[3] * (p.si - r.si).powi(2), w[4] * bs];
    [terms[0], terms[1], terms[2], terms[3], terms[4], terms.iter().sum()]
}


fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

/// Compare the library features of `x` with the loop versions.
pub fn compare_features(o: &Oracle, x: &AudioBuffer) -> Result<NaiveFeatures, String> {
    let naive = naive_features(o, x);
    let fast = MixFeatures::extract(x).map_err(|e| e.to_string())?;
    for c in 0..2 {
        let ch = &fast.channels[c];
        check(close(ch.rms, naive.rms[c]), || format!("rms {} vs {}", ch.rms, naive.rms[c]))?;
        check(close(ch.crest_factor_db, naive.cf[c]), || format!("cf {} vs {}", ch.crest_factor_db, naive.cf[c]))?;
        let cf = features::crest_factor(x.channel(c)).map_err(|e| e.to_string())?;
        check(close(cf, naive.cf[c]), || format!("crest_factor {cf} vs {}", naive.cf[c]))?;
        check(ch.bark.frames() == naive.bs[c].len(), || "frame count".into())?;
        for (f, frame) in naive.bs[c].iter().enumerate() {
            for (b, &v) in frame.iter().enumerate() {
                let got = ch.bark.get(f, b);
                check(close(got, v), || format!("bark[{f}][{b}] {got} vs {v}"))?;
            }
        }
    }
    check(close(fast.stereo_width, naive.sw), || format!("sw {} vs {}", fast.stereo_width, naive.sw))?;
    check(close(fast.stereo_imbalance, naive.si), || format!("si {} vs {}", fast.stereo_imbalance, naive.si))?;
    Ok(naive)
}

/// Features of both signals and every AF loss entry against the loops.
pub fn compare_pair(o: &Oracle, pred: &AudioBuffer, reference: &AudioBuffer) -> Result<(), String> {
    let np = compare_features(o, pred)?;
    let nr = compare_features(o, reference)?;
    let want = naive_af(&np, &nr);
    let got = af_loss(pred, reference, &AfLossConfig::default()).map_err(|e| e.to_string())?;
    let got = [got.rms, got.cf, got.sw, got.si, got.bs, got.total];
    check(got.iter().zip(&want).all(|(g, w)| close(*g, *w)), || format!("af {got:?} vs {want:?}"))
}
