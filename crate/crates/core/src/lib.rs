//! Multitrack mixing-style matching.
//!
//! Given raw mono tracks and a stereo reference, estimate the settings of a
//! small mixing console (per-track gain, 4-band EQ, compressor and pan, plus
//! a master-bus EQ and compressor) so the rendered mix resembles the
//! reference's dynamics, stereo image and spectrum.
//!
//! - [`audio_io`]: buffers, WAV files, RMS loudness, multitrack loading
//! - [`console`]: the console and its parameter layout
//! - [`features`]: RMS, crest factor, Bark spectrum, stereo width/imbalance
//! - [`losses`]: the weighted audio-feature loss and the MRSTFT loss
//! - [`optimize`]: FD/SPSA gradients and Adam over the normalized parameters
//! - [`harness`]: self-supervised experiments and mix evaluation
//! - [`cli`]: the `mixmatch` command line

pub mod audio_io;
pub mod cli;
pub mod console;
mod error;
pub mod features;
pub mod harness;
pub mod losses;
pub mod optimize;
pub mod rng;

pub use error::{Error, Result};
