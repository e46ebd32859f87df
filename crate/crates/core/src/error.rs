use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("WAV error in {path}: {source}")]
    Wav {
        path: PathBuf,
        #[source]
        source: hound::Error,
    },

    #[error("unsupported WAV format in {path}: {detail}")]
    UnsupportedFormat { path: PathBuf, detail: String },

    #[error("unsupported sample rate {0} Hz (only 44100 Hz is accepted)")]
    UnsupportedSampleRate(u32),

    #[error("invalid audio buffer: {0}")]
    InvalidBuffer(String),

    #[error("audio is silent")]
    SilentAudio,

    #[error("expected a stereo buffer, got {0} channel(s)")]
    NotStereo(usize),

    #[error("expected a mono buffer, got {0} channel(s)")]
    NotMono(usize),

    #[error("signal of {len} samples is shorter than the {needed}-sample window")]
    SignalTooShort { len: usize, needed: usize },

    #[error("length mismatch: {0} vs {1} samples")]
    LengthMismatch(usize, usize),

    #[error("no segment above the energy threshold after {0} attempts")]
    NoActiveSegment(usize),

    #[error("no usable tracks in {0}")]
    NoUsableTracks(PathBuf),

    #[error("parameter vector has {got} values, expected {expected}")]
    ParamCount { expected: usize, got: usize },

    #[error("parameter `{name}` = {value} outside [{min}, {max}]")]
    ParamOutOfRange {
        name: String,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("filter frequency {freq_hz} Hz is not below Nyquist ({nyquist_hz} Hz)")]
    AboveNyquist { freq_hz: f64, nyquist_hz: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameter document: {0}")]
    ParamDocument(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("random mix stayed below the energy threshold after {0} attempts")]
    DegenerateRandomMix(usize),
}
