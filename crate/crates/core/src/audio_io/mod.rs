//! Audio buffers, WAV I/O, RMS loudness and multitrack loading.

mod buffer;
mod loudness;
mod multitrack;
mod wav;

pub use buffer::{AudioBuffer, SAMPLE_RATE};
pub use loudness::{
    amplitude_to_db, db_to_amplitude, find_active_segment, is_effectively_silent, measure_loudness_dbfs,
    normalization_gain, normalize_loudness, window_energy, LoudnessStats, ACTIVE_ENERGY_THRESHOLD,
    ACTIVE_SEGMENT_ATTEMPTS, SILENCE_FLOOR_DBFS,
};
pub use multitrack::{load_multitrack, MultitrackSet, TRACK_LOUDNESS_DBFS};
pub use wav::{quantize_pcm16, read_wav, write_wav, WavFormat, WriteReport};
