//! Direct estimation of console parameters: minimize a style loss between
//! the rendered mix and a reference over the normalized parameter box.

mod adam;
mod gradient;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use adam::{Adam, AdamConfig};
pub use gradient::{fd_gradient, spsa_gradient};

use crate::audio_io::{is_effectively_silent, normalize_loudness, AudioBuffer, MultitrackSet, TRACK_LOUDNESS_DBFS};
use crate::console::{denormalize, mix, params_to_json, ConsoleParams};
use crate::error::{Error, Result};
use crate::features::{MixFeatures, BARK_WINDOW};
use crate::losses::{af_loss_from_features, mrstft_from_spectra, mrstft_spectra, AfLossConfig, MrstftConfig};
use crate::rng::stream;

/// Level both the rendered mix and the reference are set to before scoring.
pub const OBJECTIVE_LOUDNESS_DBFS: f64 = -16.0;

/// Objective value for mixes that cannot be scored (silent, non-finite).
pub const SILENT_MIX_PENALTY: f64 = 1e6;

/// Minimum relative gain in the best loss that resets the patience counter.
pub const MIN_RELATIVE_IMPROVEMENT: f64 = 1e-4;

/// A scalar function over the normalized box `[0, 1]^dim`.
pub trait Objective {
    fn dim(&self) -> usize;
    fn eval(&self, v: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Af,
    Mrstft,
}

impl std::fmt::Display for LossKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossKind::Af => "af",
            LossKind::Mrstft => "mrstft",
        })
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "af" => Ok(LossKind::Af),
            "mrstft" => Ok(LossKind::Mrstft),
            other => Err(Error::InvalidConfig(format!("unknown loss `{other}`"))),
        }
    }
}

enum ReferenceAnalysis {
    Af(MixFeatures),
    Mrstft(Vec<Vec<crate::features::Spectrogram>>),
}

/// Tracks, a reference and the loss that compares a rendered mix with it.
///
/// The reference is normalized to [`OBJECTIVE_LOUDNESS_DBFS`] and analysed
/// once at construction.
pub struct ObjectiveSpec {
    loss_kind: LossKind,
    tracks: MultitrackSet,
    reference: AudioBuffer,
    af_cfg: AfLossConfig,
    mrstft_cfg: MrstftConfig,
    analysis: ReferenceAnalysis,
}

impl ObjectiveSpec {
    pub fn new(tracks: MultitrackSet, reference: &AudioBuffer, loss_kind: LossKind) -> Result<Self> {
        Self::with_configs(
            tracks,
            reference,
            loss_kind,
            AfLossConfig::default(),
            MrstftConfig::default(),
        )
    }

    pub fn with_configs(
        tracks: MultitrackSet,
        reference: &AudioBuffer,
        loss_kind: LossKind,
        af_cfg: AfLossConfig,
        mrstft_cfg: MrstftConfig,
    ) -> Result<Self> {
        reference.require_stereo()?;
        af_cfg.validate()?;
        let reference = normalize_loudness(reference, OBJECTIVE_LOUDNESS_DBFS)?;
        let analysis = match loss_kind {
            LossKind::Af => {
                let needed = BARK_WINDOW;
                for len in [reference.len(), tracks.num_samples()] {
                    if len < needed {
                        return Err(Error::SignalTooShort { len, needed });
                    }
                }
                ReferenceAnalysis::Af(MixFeatures::extract(&reference)?)
            }
            LossKind::Mrstft => {
                if reference.len() != tracks.num_samples() {
                    return Err(Error::LengthMismatch(tracks.num_samples(), reference.len()));
                }
                if reference.len() < mrstft_cfg.max_window() {
                    return Err(Error::SignalTooShort {
                        len: reference.len(),
                        needed: mrstft_cfg.max_window(),
                    });
                }
                ReferenceAnalysis::Mrstft(mrstft_spectra(&reference, &mrstft_cfg)?)
            }
        };
        Ok(Self {
            loss_kind,
            tracks,
            reference,
            af_cfg,
            mrstft_cfg,
            analysis,
        })
    }

    pub fn loss_kind(&self) -> LossKind {
        self.loss_kind
    }

    pub fn tracks(&self) -> &MultitrackSet {
        &self.tracks
    }

    /// The reference after loudness normalization.
    pub fn reference(&self) -> &AudioBuffer {
        &self.reference
    }

    /// Loss of an already rendered mix against the reference.
    pub fn score_mix(&self, rendered: &AudioBuffer) -> f64 {
        if is_effectively_silent(rendered) {
            return SILENT_MIX_PENALTY;
        }
        let Ok(normalized) = normalize_loudness(rendered, OBJECTIVE_LOUDNESS_DBFS) else {
            return SILENT_MIX_PENALTY;
        };
        let value = match &self.analysis {
            ReferenceAnalysis::Af(reference) => MixFeatures::extract(&normalized)
                .map(|pred| af_loss_from_features(&pred, reference, &self.af_cfg).total),
            ReferenceAnalysis::Mrstft(reference) => mrstft_spectra(&normalized, &self.mrstft_cfg)
                .map(|pred| mrstft_from_spectra(&pred, reference, &self.mrstft_cfg)),
        };
        match value {
            Ok(v) if v.is_finite() => v,
            _ => SILENT_MIX_PENALTY,
        }
    }

    pub fn render(&self, params: &ConsoleParams) -> Result<AudioBuffer> {
        mix(&self.tracks, params)
    }
}

impl Objective for ObjectiveSpec {
    fn dim(&self) -> usize {
        crate::console::param_count(self.tracks.len())
    }

    fn eval(&self, v: &[f64]) -> f64 {
        objective_eval(v, self)
    }
}

/// mix → normalize to −16 dBFS → loss against the reference. Never fails:
/// unscorable points get [`SILENT_MIX_PENALTY`].
pub fn objective_eval(v: &[f64], spec: &ObjectiveSpec) -> f64 {
    match denormalize(v, spec.tracks.len()).and_then(|p| spec.render(&p)) {
        Ok(rendered) => spec.score_mix(&rendered),
        Err(_) => SILENT_MIX_PENALTY,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GradMode {
    Fd,
    Spsa,
}

impl std::str::FromStr for GradMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd" => Ok(GradMode::Fd),
            "spsa" => Ok(GradMode::Spsa),
            other => Err(Error::InvalidConfig(format!("unknown gradient mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub grad_mode: GradMode,
    /// Finite-difference step in normalized units.
    pub fd_step: f64,
    pub spsa_step: f64,
    pub spsa_averages: usize,
    pub adam: AdamConfig,
    pub max_iters: usize,
    /// Iterations without a [`MIN_RELATIVE_IMPROVEMENT`] gain before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grad_mode: GradMode::Spsa,
            fd_step: 1e-3,
            spsa_step: 1e-2,
            spsa_averages: 2,
            adam: AdamConfig::default(),
            max_iters: 300,
            patience: 60,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.fd_step > 0.0 && self.fd_step < 0.5) {
            return bad("fd_step must lie in (0, 0.5)");
        }
        if !(self.spsa_step > 0.0 && self.spsa_step < 0.5) {
            return bad("spsa_step must lie in (0, 0.5)");
        }
        if self.spsa_averages == 0 {
            return bad("spsa_averages must be at least 1");
        }
        if self.patience == 0 {
            return bad("patience must be at least 1");
        }
        self.adam.validate()
    }
}

/// Result of a box-constrained Adam run.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeResult {
    /// Objective at the start point, then after every step.
    pub trace: Vec<f64>,
    pub best: Vec<f64>,
    pub best_loss: f64,
    pub iterations: usize,
}

/// Adam on FD or SPSA gradients, clamping to `[0, 1]` after every step and
/// keeping the best point seen.
pub fn minimize(objective: &dyn Objective, start: &[f64], cfg: &OptimizerConfig) -> Result<MinimizeResult> {
    cfg.validate()?;
    if start.len() != objective.dim() {
        return Err(Error::ParamCount {
            expected: objective.dim(),
            got: start.len(),
        });
    }
    let mut rng = stream(cfg.seed, 1);
    let mut adam = Adam::new(cfg.adam, start.len());
    let mut v = start.to_vec();

    let f0 = objective.eval(&v);
    let mut trace = vec![f0];
    let (mut best, mut best_loss) = (v.clone(), f0);
    let mut anchor = f0;
    let mut stale = 0;
    let mut iterations = 0;

    while iterations < cfg.max_iters {
        let grad = match cfg.grad_mode {
            GradMode::Fd => fd_gradient(objective, &v, cfg.fd_step),
            GradMode::Spsa => spsa_gradient(objective, &v, cfg.spsa_step, cfg.spsa_averages, &mut rng)?,
        };
        adam.step(&mut v, &grad);
        for x in v.iter_mut() {
            *x = x.clamp(0.0, 1.0);
        }
        debug_assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
        iterations += 1;

        let f = objective.eval(&v);
        trace.push(f);
        if f < best_loss {
            best_loss = f;
            best.clone_from(&v);
        }
        if anchor - f >= MIN_RELATIVE_IMPROVEMENT * anchor.abs() && f < anchor {
            anchor = f;
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                log::debug!("early stop after {iterations} iterations");
                break;
            }
        }
    }
    Ok(MinimizeResult {
        trace,
        best,
        best_loss,
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationReport {
    pub loss_kind: LossKind,
    pub loss_trace: Vec<f64>,
    pub best_params: ConsoleParams,
    pub best_loss: f64,
    pub iterations_run: usize,
    pub wall_time: Duration,
}

impl OptimizationReport {
    pub fn initial_loss(&self) -> f64 {
        self.loss_trace[0]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "loss_kind": self.loss_kind,
            "loss_trace": self.loss_trace,
            "best_loss": self.best_loss,
            "iterations_run": self.iterations_run,
            "wall_time_s": self.wall_time.as_secs_f64(),
            "best_params": params_to_json(&self.best_params),
        })
    }
}

/// Estimate console parameters whose mix matches the reference style,
/// starting from the identity console.
pub fn match_style(spec: &ObjectiveSpec, cfg: &OptimizerConfig) -> Result<OptimizationReport> {
    let started = Instant::now();
    let n = spec.tracks().len();
    let identity = ConsoleParams::identity(n);
    let start = identity.normalize()?;
    let result = minimize(spec, start.values(), cfg)?;
    // never moved: hand back the exact start rather than its round trip
    let best_params = if result.best == start.values() {
        identity
    } else {
        denormalize(&result.best, n)?
    };
    Ok(OptimizationReport {
        loss_kind: spec.loss_kind(),
        loss_trace: result.trace,
        best_params,
        best_loss: result.best_loss,
        iterations_run: result.iterations,
        wall_time: started.elapsed(),
    })
}

/// Baseline mix: loudness-matched tracks averaged, centred, set to −16 dBFS.
pub fn equal_loudness_mix(tracks: &MultitrackSet) -> Result<AudioBuffer> {
    let len = tracks.num_samples();
    let mut sum = vec![0.0; len];
    let mut used = 0usize;
    for t in tracks.tracks() {
        if is_effectively_silent(t) {
            continue;
        }
        let t = normalize_loudness(t, TRACK_LOUDNESS_DBFS)?;
        for (s, v) in sum.iter_mut().zip(t.channel(0)) {
            *s += v;
        }
        used += 1;
    }
    if used == 0 {
        return Err(Error::SilentAudio);
    }
    let mean: Vec<f64> = sum.iter().map(|s| s / used as f64).collect();
    normalize_loudness(&AudioBuffer::stereo(mean.clone(), mean)?, OBJECTIVE_LOUDNESS_DBFS)
}
