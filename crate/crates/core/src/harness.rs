//! Self-supervised experiments and mix evaluation.
//!
//! A Method-1 example renders a random mix of a multitrack segment, uses
//! its first half as the style reference and its second half as ground
//! truth for a mix of the tracks' second half.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::audio_io::{
    find_active_segment, is_effectively_silent, load_multitrack, normalize_loudness, read_wav, window_energy,
    AudioBuffer, MultitrackSet, ACTIVE_ENERGY_THRESHOLD, SAMPLE_RATE,
};
use crate::console::{mix, sample_random_params_with, ConsoleParams};
use crate::error::{Error, Result};
use crate::losses::{af_loss, mrstft_loss, AfLossConfig, FeatureDistanceReport, MrstftConfig};
use crate::optimize::{equal_loudness_mix, match_style, LossKind, ObjectiveSpec, OptimizerConfig, OBJECTIVE_LOUDNESS_DBFS};
use crate::rng::stream;

/// Loudness of the random reference mix.
pub const REFERENCE_LOUDNESS_DBFS: f64 = -16.0;
/// Level the reference is set to before evaluation.
pub const EVAL_REFERENCE_DBFS: f64 = -16.0;
/// Level the predicted mix is set to before evaluation.
pub const EVAL_PREDICTION_DBFS: f64 = -22.0;
/// Random parameter draws tried before a segment is given up on.
pub const RANDOM_MIX_RETRIES: usize = 20;
/// Ten seconds at 44.1 kHz.
pub const DEFAULT_SEGMENT_SAMPLES: usize = 10 * SAMPLE_RATE as usize;
pub const DEFAULT_MAX_TRACKS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Method1Config {
    /// Full segment length; reference and ground truth get half each.
    pub segment_samples: usize,
    pub max_tracks: usize,
}

impl Default for Method1Config {
    fn default() -> Self {
        Self {
            segment_samples: DEFAULT_SEGMENT_SAMPLES,
            max_tracks: DEFAULT_MAX_TRACKS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Method1Example {
    /// Second half of the input tracks.
    pub tracks_b: MultitrackSet,
    /// First half of the random mix, at −16 dBFS.
    pub reference_a: AudioBuffer,
    /// Second half of the random mix.
    pub ground_truth_b: AudioBuffer,
    /// Parameters that rendered the random mix (one strip per segment track).
    pub true_params: ConsoleParams,
    pub seed: u64,
}

pub fn generate_method1_example(dir: impl AsRef<Path>, seed: u64) -> Result<Method1Example> {
    generate_method1_example_with(dir, seed, &Method1Config::default())
}

pub fn generate_method1_example_with(dir: impl AsRef<Path>, seed: u64, cfg: &Method1Config) -> Result<Method1Example> {
    let tracks = load_multitrack(dir, cfg.max_tracks, seed)?;
    method1_example_from_tracks(&tracks, seed, cfg)
}

/// Build an example from already loaded tracks (each at −48 dBFS).
pub fn method1_example_from_tracks(tracks: &MultitrackSet, seed: u64, cfg: &Method1Config) -> Result<Method1Example> {
    let seg = cfg.segment_samples;
    let half = seg / 2;
    if seg < 2 || tracks.num_samples() < seg {
        return Err(Error::SignalTooShort {
            len: tracks.num_samples(),
            needed: seg,
        });
    }

    // Segment search runs on the plain sum of the tracks at the reference
    // level, so the threshold means "within ~14 dB of the song average".
    let mut guide = vec![0.0; tracks.num_samples()];
    for t in tracks.tracks() {
        for (g, v) in guide.iter_mut().zip(t.channel(0)) {
            *g += v;
        }
    }
    let guide = normalize_loudness(&AudioBuffer::mono(guide), REFERENCE_LOUDNESS_DBFS)?;
    let offset = find_active_segment(&guide, seg, seed)?;
    let segment = tracks.segment(offset, seg)?;

    let mut rng = stream(seed, 2);
    for attempt in 0..RANDOM_MIX_RETRIES {
        let params = sample_random_params_with(segment.len(), &mut rng)?;
        let rendered = mix(&segment, &params)?;
        if is_effectively_silent(&rendered) {
            log::debug!("seed {seed}: random mix {attempt} is silent");
            continue;
        }
        let rendered = normalize_loudness(&rendered, REFERENCE_LOUDNESS_DBFS)?;
        let active = window_energy(&rendered, 0, half) >= ACTIVE_ENERGY_THRESHOLD
            && window_energy(&rendered, half, half) >= ACTIVE_ENERGY_THRESHOLD;
        if !active {
            log::debug!("seed {seed}: random mix {attempt} has a quiet half");
            continue;
        }
        let reference_a = normalize_loudness(&rendered.segment(0, half), REFERENCE_LOUDNESS_DBFS)?;
        return Ok(Method1Example {
            tracks_b: segment.segment(half, half)?,
            reference_a,
            ground_truth_b: rendered.segment(half, half),
            true_params: params,
            seed,
        });
    }
    Err(Error::DegenerateRandomMix(RANDOM_MIX_RETRIES))
}

/// One row of a Method-1 run; column order is the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Method1Row {
    pub seed: u64,
    pub loss_kind: LossKind,
    /// Objective at the identity console.
    pub init_loss: f64,
    /// Best objective reached against the reference.
    pub final_loss: f64,
    /// Equal-loudness mix of the second-half tracks scored against ground
    /// truth with `loss_kind`.
    pub baseline_loss: f64,
    pub mrstft_vs_gt: f64,
    pub af_vs_gt: f64,
}

impl Method1Row {
    /// `(init − final) / init`.
    pub fn relative_reduction(&self) -> f64 {
        (self.init_loss - self.final_loss) / self.init_loss
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Method1Summary {
    pub rows: Vec<Method1Row>,
    pub median_init_loss: f64,
    pub median_final_loss: f64,
    pub median_baseline_loss: f64,
    pub median_af_vs_gt: f64,
    pub median_mrstft_vs_gt: f64,
    pub median_relative_reduction: f64,
}

pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

impl Method1Summary {
    pub fn from_rows(rows: Vec<Method1Row>) -> Self {
        Self {
            median_init_loss: median(rows.iter().map(|r| r.init_loss)),
            median_final_loss: median(rows.iter().map(|r| r.final_loss)),
            median_baseline_loss: median(rows.iter().map(|r| r.baseline_loss)),
            median_af_vs_gt: median(rows.iter().map(|r| r.af_vs_gt)),
            median_mrstft_vs_gt: median(rows.iter().map(|r| r.mrstft_vs_gt)),
            median_relative_reduction: median(rows.iter().map(Method1Row::relative_reduction)),
            rows,
        }
    }
}

/// Everything produced for one seed, for callers that need more than the row.
#[derive(Debug, Clone)]
pub struct Method1Outcome {
    pub row: Method1Row,
    pub example: Method1Example,
    pub predicted: AudioBuffer,
    pub baseline: AudioBuffer,
    pub best_params: ConsoleParams,
}

/// Optimize against `reference_a`, then score the prediction and the
/// equal-loudness baseline against `ground_truth_b`. Both sides are set to
/// −16 dBFS before scoring.
pub fn run_method1_example(example: Method1Example, cfg: &OptimizerConfig, loss_kind: LossKind) -> Result<Method1Outcome> {
    let spec = ObjectiveSpec::new(example.tracks_b.clone(), &example.reference_a, loss_kind)?;
    let cfg = OptimizerConfig {
        seed: example.seed,
        ..cfg.clone()
    };
    let report = match_style(&spec, &cfg)?;

    let predicted = normalize_loudness(&spec.render(&report.best_params)?, OBJECTIVE_LOUDNESS_DBFS)?;
    let ground_truth = normalize_loudness(&example.ground_truth_b, OBJECTIVE_LOUDNESS_DBFS)?;
    let baseline = equal_loudness_mix(&example.tracks_b)?;

    let af = AfLossConfig::default();
    let mr = MrstftConfig::default();
    let af_vs_gt = af_loss(&predicted, &ground_truth, &af)?.total;
    let mrstft_vs_gt = mrstft_loss(&predicted, &ground_truth, &mr)?;
    let baseline_loss = match loss_kind {
        LossKind::Af => af_loss(&baseline, &ground_truth, &af)?.total,
        LossKind::Mrstft => mrstft_loss(&baseline, &ground_truth, &mr)?,
    };
    let row = Method1Row {
        seed: example.seed,
        loss_kind,
        init_loss: report.initial_loss(),
        final_loss: report.best_loss,
        baseline_loss,
        mrstft_vs_gt,
        af_vs_gt,
    };
    Ok(Method1Outcome {
        row,
        example,
        predicted,
        baseline,
        best_params: report.best_params,
    })
}

/// Run every seed in order and summarize.
pub fn run_method1_experiment(
    dir: impl AsRef<Path>,
    seeds: &[u64],
    cfg: &OptimizerConfig,
    loss_kind: LossKind,
    m1: &Method1Config,
) -> Result<Method1Summary> {
    let dir = dir.as_ref();
    let mut rows = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        let example = generate_method1_example_with(dir, seed, m1)?;
        let outcome = run_method1_example(example, cfg, loss_kind)?;
        log::info!("seed {seed}: {:?}", outcome.row);
        rows.push(outcome.row);
    }
    Ok(Method1Summary::from_rows(rows))
}

pub fn write_method1_csv(rows: &[Method1Row], path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_method1_csv(path: impl AsRef<Path>) -> Result<Vec<Method1Row>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<Result<Vec<Method1Row>, _>>()?;
    Ok(rows)
}

/// Feature distances of a predicted mix against a reference, with the
/// levels both were set to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub features: FeatureDistanceReport,
    pub reference_dbfs: f64,
    pub prediction_dbfs: f64,
    /// Present only when both signals have the same length.
    pub mrstft: Option<f64>,
}

pub fn evaluate_buffers(pred: &AudioBuffer, reference: &AudioBuffer) -> Result<EvalReport> {
    pred.require_stereo()?;
    reference.require_stereo()?;
    let reference = normalize_loudness(reference, EVAL_REFERENCE_DBFS)?;
    let pred = normalize_loudness(pred, EVAL_PREDICTION_DBFS)?;
    let features = af_loss(&pred, &reference, &AfLossConfig::default())?;
    let mr = MrstftConfig::default();
    let mrstft = if pred.len() == reference.len() && pred.len() >= mr.max_window() {
        Some(mrstft_loss(&pred, &reference, &mr)?)
    } else {
        None
    };
    Ok(EvalReport {
        features,
        reference_dbfs: EVAL_REFERENCE_DBFS,
        prediction_dbfs: EVAL_PREDICTION_DBFS,
        mrstft,
    })
}

pub fn evaluate_mix(pred_path: impl AsRef<Path>, ref_path: impl AsRef<Path>) -> Result<EvalReport> {
    evaluate_buffers(&read_wav(pred_path)?, &read_wav(ref_path)?)
}
