use std::path::{Path, PathBuf};

use rand::seq::index;

use super::buffer::AudioBuffer;
use super::loudness::{is_effectively_silent, normalize_loudness};
use super::wav::read_wav;
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Per-track level applied when loading raw tracks.
pub const TRACK_LOUDNESS_DBFS: f64 = -48.0;

/// Equal-length, non-silent mono tracks.
#[derive(Debug, Clone, PartialEq)]
pub struct MultitrackSet {
    tracks: Vec<AudioBuffer>,
    names: Vec<String>,
}

impl MultitrackSet {
    pub fn new(tracks: Vec<AudioBuffer>, names: Vec<String>) -> Result<Self> {
        if tracks.is_empty() {
            return Err(Error::InvalidBuffer("multitrack set has no tracks".into()));
        }
        if names.len() != tracks.len() {
            return Err(Error::InvalidBuffer("one name per track required".into()));
        }
        let len = tracks[0].len();
        for (t, name) in tracks.iter().zip(&names) {
            t.require_mono()?;
            if t.len() != len {
                return Err(Error::LengthMismatch(len, t.len()));
            }
            if is_effectively_silent(t) {
                return Err(Error::InvalidBuffer(format!("track `{name}` is silent")));
            }
        }
        Ok(Self { tracks, names })
    }

    /// Unnamed tracks (`track0`, `track1`, ...).
    pub fn from_tracks(tracks: Vec<AudioBuffer>) -> Result<Self> {
        let names = (0..tracks.len()).map(|i| format!("track{i}")).collect();
        Self::new(tracks, names)
    }

    pub fn tracks(&self) -> &[AudioBuffer] {
        &self.tracks
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    /// Samples per track.
    pub fn num_samples(&self) -> usize {
        self.tracks[0].len()
    }

    /// Window of every track. Tracks silent inside the window are dropped.
    pub fn segment(&self, start: usize, len: usize) -> Result<Self> {
        let (tracks, names): (Vec<_>, Vec<_>) = self
            .tracks
            .iter()
            .zip(&self.names)
            .map(|(t, n)| (t.segment(start, len), n.clone()))
            .filter(|(t, _)| !is_effectively_silent(t))
            .unzip();
        if tracks.is_empty() {
            return Err(Error::InvalidBuffer("all tracks silent in segment".into()));
        }
        Self::new(tracks, names)
    }
}

fn wav_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("wav"))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Load every `.wav` in `dir` as mono tracks.
///
/// Stereo files become two tracks (`name:L`, `name:R`). Silent tracks are
/// dropped, a seeded subset is kept when more than `max_tracks` remain, the
/// rest are zero-padded to the longest and set to [`TRACK_LOUDNESS_DBFS`].
pub fn load_multitrack(dir: impl AsRef<Path>, max_tracks: usize, seed: u64) -> Result<MultitrackSet> {
    let dir = dir.as_ref();
    if max_tracks == 0 {
        return Err(Error::InvalidConfig("max_tracks must be at least 1".into()));
    }
    let mut raw: Vec<(String, Vec<f64>)> = Vec::new();
    for path in wav_files(dir)? {
        let file_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let buffer = read_wav(&path)?;
        if buffer.is_stereo() {
            let mut channels = buffer.into_channels().into_iter();
            raw.push((format!("{file_name}:L"), channels.next().unwrap()));
            raw.push((format!("{file_name}:R"), channels.next().unwrap()));
        } else {
            raw.push((file_name, buffer.into_channels().remove(0)));
        }
    }
    raw.retain(|(name, samples)| {
        let silent = is_effectively_silent(&AudioBuffer::mono(samples.clone()));
        if silent {
            log::debug!("dropping silent track {name}");
        }
        !silent
    });
    if raw.is_empty() {
        return Err(Error::NoUsableTracks(dir.to_path_buf()));
    }

    if raw.len() > max_tracks {
        let mut keep = index::sample(&mut seeded(seed), raw.len(), max_tracks).into_vec();
        keep.sort_unstable();
        let mut slots: Vec<Option<(String, Vec<f64>)>> = raw.into_iter().map(Some).collect();
        raw = keep.into_iter().map(|i| slots[i].take().unwrap()).collect();
    }

    let len = raw.iter().map(|(_, s)| s.len()).max().unwrap_or(0);
    let mut names = Vec::with_capacity(raw.len());
    let mut tracks = Vec::with_capacity(raw.len());
    for (name, mut samples) in raw {
        samples.resize(len, 0.0);
        tracks.push(normalize_loudness(&AudioBuffer::mono(samples), TRACK_LOUDNESS_DBFS)?);
        names.push(name);
    }
    MultitrackSet::new(tracks, names)
}
