//! Console parameter types and their flat normalized layout.
//!
//! Every channel strip has 18 scalars and the master bus 16. The normalized
//! vector is strip 0, strip 1, ..., strip N-1, then master, each in the order
//! given by [`STRIP_RANGES`] / [`MASTER_RANGES`].

use crate::error::{Error, Result};

pub const STRIP_PARAM_COUNT: usize = 18;
pub const MASTER_PARAM_COUNT: usize = 16;

/// Q used by both shelving bands.
pub const SHELF_Q: f64 = 0.707;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// Bounds of one scalar parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub name: &'static str,
    pub min: f64,
    pub max: f64,
    pub scale: Scale,
}

impl ParamRange {
    const fn lin(name: &'static str, min: f64, max: f64) -> Self {
        Self {
            name,
            min,
            max,
            scale: Scale::Linear,
        }
    }

    const fn log(name: &'static str, min: f64, max: f64) -> Self {
        Self {
            name,
            min,
            max,
            scale: Scale::Log,
        }
    }

    pub fn denormalize(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => self.min + v * (self.max - self.min),
            Scale::Log => (self.min.ln() + v * (self.max.ln() - self.min.ln())).exp(),
        }
    }

    pub fn normalize(&self, value: f64) -> f64 {
        match self.scale {
            Scale::Linear => (value - self.min) / (self.max - self.min),
            Scale::Log => (value.ln() - self.min.ln()) / (self.max.ln() - self.min.ln()),
        }
    }

    pub fn contains(&self, value: f64) -> bool {
        // slack for values that went through a log/exp round trip
        let tol = 1e-9 * self.max.abs().max(1.0);
        value >= self.min - tol && value <= self.max + tol
    }

    pub fn check(&self, value: f64) -> Result<()> {
        if value.is_finite() && self.contains(value) {
            Ok(())
        } else {
            Err(Error::ParamOutOfRange {
                name: self.name.to_string(),
                value,
                min: self.min,
                max: self.max,
            })
        }
    }
}

const EQ_RANGES: [ParamRange; 10] = [
    ParamRange::log("eq.low_shelf.freq_hz", 20.0, 500.0),
    ParamRange::lin("eq.low_shelf.gain_db", -18.0, 18.0),
    ParamRange::log("eq.peak1.freq_hz", 200.0, 5000.0),
    ParamRange::lin("eq.peak1.gain_db", -18.0, 18.0),
    ParamRange::log("eq.peak1.q", 0.3, 6.0),
    ParamRange::log("eq.peak2.freq_hz", 500.0, 10000.0),
    ParamRange::lin("eq.peak2.gain_db", -18.0, 18.0),
    ParamRange::log("eq.peak2.q", 0.3, 6.0),
    ParamRange::log("eq.high_shelf.freq_hz", 1500.0, 16000.0),
    ParamRange::lin("eq.high_shelf.gain_db", -18.0, 18.0),
];

const COMP_RANGES: [ParamRange; 6] = [
    ParamRange::lin("comp.threshold_db", -60.0, 0.0),
    ParamRange::log("comp.ratio", 1.0, 20.0),
    ParamRange::log("comp.attack_ms", 1.0, 100.0),
    ParamRange::log("comp.release_ms", 10.0, 1000.0),
    ParamRange::lin("comp.knee_db", 0.0, 12.0),
    ParamRange::lin("comp.makeup_db", 0.0, 12.0),
];

const GAIN_RANGE: ParamRange = ParamRange::lin("gain_db", -24.0, 24.0);
const PAN_RANGE: ParamRange = ParamRange::lin("pan", 0.0, 1.0);

const fn strip_ranges() -> [ParamRange; STRIP_PARAM_COUNT] {
    let mut out = [GAIN_RANGE; STRIP_PARAM_COUNT];
    let mut i = 0;
    while i < 10 {
        out[1 + i] = EQ_RANGES[i];
        i += 1;
    }
    let mut j = 0;
    while j < 6 {
        out[11 + j] = COMP_RANGES[j];
        j += 1;
    }
    out[17] = PAN_RANGE;
    out
}

const fn master_ranges() -> [ParamRange; MASTER_PARAM_COUNT] {
    let mut out = [EQ_RANGES[0]; MASTER_PARAM_COUNT];
    let mut i = 0;
    while i < 10 {
        out[i] = EQ_RANGES[i];
        i += 1;
    }
    let mut j = 0;
    while j < 6 {
        out[10 + j] = COMP_RANGES[j];
        j += 1;
    }
    out
}

/// Channel strip layout: gain, 10 EQ scalars, 6 compressor scalars, pan.
pub const STRIP_RANGES: [ParamRange; STRIP_PARAM_COUNT] = strip_ranges();
/// Master bus layout: 10 EQ scalars then 6 compressor scalars.
pub const MASTER_RANGES: [ParamRange; MASTER_PARAM_COUNT] = master_ranges();

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamScope {
    Track(usize),
    Master,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSlot {
    pub scope: ParamScope,
    pub range: ParamRange,
}

/// Full layout of the normalized vector for `n_tracks` tracks.
pub fn param_ranges(n_tracks: usize) -> Vec<ParamSlot> {
    let strips = (0..n_tracks).flat_map(|t| {
        STRIP_RANGES.iter().map(move |&range| ParamSlot {
            scope: ParamScope::Track(t),
            range,
        })
    });
    let master = MASTER_RANGES.iter().map(|&range| ParamSlot {
        scope: ParamScope::Master,
        range,
    });
    strips.chain(master).collect()
}

pub fn param_count(n_tracks: usize) -> usize {
    STRIP_PARAM_COUNT * n_tracks + MASTER_PARAM_COUNT
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EqBandKind {
    LowShelf,
    Peak,
    HighShelf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqBandParams {
    pub kind: EqBandKind,
    pub center_hz: f64,
    pub gain_db: f64,
    /// Ignored by shelves, which always use [`SHELF_Q`].
    pub q: f64,
}

impl EqBandParams {
    pub fn flat(kind: EqBandKind, center_hz: f64) -> Self {
        Self {
            kind,
            center_hz,
            gain_db: 0.0,
            q: SHELF_Q,
        }
    }

    pub fn effective_q(&self) -> f64 {
        match self.kind {
            EqBandKind::Peak => self.q,
            EqBandKind::LowShelf | EqBandKind::HighShelf => SHELF_Q,
        }
    }
}

/// The four bands in fixed order: low shelf, peak, peak, high shelf.
pub type EqParams = [EqBandParams; 4];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressorParams {
    pub threshold_db: f64,
    pub ratio: f64,
    pub attack_ms: f64,
    pub release_ms: f64,
    pub knee_db: f64,
    pub makeup_db: f64,
}

impl CompressorParams {
    /// Ratio 1 with no makeup: passes audio through unchanged.
    pub fn identity() -> Self {
        Self {
            threshold_db: 0.0,
            ratio: 1.0,
            attack_ms: 10.0,
            release_ms: 100.0,
            knee_db: 6.0,
            makeup_db: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStripParams {
    pub gain_db: f64,
    pub eq: EqParams,
    pub comp: CompressorParams,
    pub pan: f64,
}

impl ChannelStripParams {
    pub fn identity() -> Self {
        Self {
            gain_db: 0.0,
            eq: flat_eq(),
            comp: CompressorParams::identity(),
            pan: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MasterBusParams {
    pub eq: EqParams,
    pub comp: CompressorParams,
}

impl MasterBusParams {
    pub fn identity() -> Self {
        Self {
            eq: flat_eq(),
            comp: CompressorParams::identity(),
        }
    }
}

/// All console settings for a set of tracks.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsoleParams {
    pub strips: Vec<ChannelStripParams>,
    pub master: MasterBusParams,
}

pub fn flat_eq() -> EqParams {
    [
        EqBandParams::flat(EqBandKind::LowShelf, 100.0),
        EqBandParams {
            q: 1.0,
            ..EqBandParams::flat(EqBandKind::Peak, 1000.0)
        },
        EqBandParams {
            q: 1.0,
            ..EqBandParams::flat(EqBandKind::Peak, 2500.0)
        },
        EqBandParams::flat(EqBandKind::HighShelf, 5000.0),
    ]
}

fn eq_to_values(eq: &EqParams, out: &mut Vec<f64>) {
    out.extend([
        eq[0].center_hz,
        eq[0].gain_db,
        eq[1].center_hz,
        eq[1].gain_db,
        eq[1].q,
        eq[2].center_hz,
        eq[2].gain_db,
        eq[2].q,
        eq[3].center_hz,
        eq[3].gain_db,
    ]);
}

fn eq_from_values(v: &[f64]) -> EqParams {
    [
        EqBandParams {
            kind: EqBandKind::LowShelf,
            center_hz: v[0],
            gain_db: v[1],
            q: SHELF_Q,
        },
        EqBandParams {
            kind: EqBandKind::Peak,
            center_hz: v[2],
            gain_db: v[3],
            q: v[4],
        },
        EqBandParams {
            kind: EqBandKind::Peak,
            center_hz: v[5],
            gain_db: v[6],
            q: v[7],
        },
        EqBandParams {
            kind: EqBandKind::HighShelf,
            center_hz: v[8],
            gain_db: v[9],
            q: SHELF_Q,
        },
    ]
}

fn comp_to_values(c: &CompressorParams, out: &mut Vec<f64>) {
    out.extend([
        c.threshold_db,
        c.ratio,
        c.attack_ms,
        c.release_ms,
        c.knee_db,
        c.makeup_db,
    ]);
}

fn comp_from_values(v: &[f64]) -> CompressorParams {
    CompressorParams {
        threshold_db: v[0],
        ratio: v[1],
        attack_ms: v[2],
        release_ms: v[3],
        knee_db: v[4],
        makeup_db: v[5],
    }
}

impl ChannelStripParams {
    /// Physical values in [`STRIP_RANGES`] order.
    pub fn to_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(STRIP_PARAM_COUNT);
        out.push(self.gain_db);
        eq_to_values(&self.eq, &mut out);
        comp_to_values(&self.comp, &mut out);
        out.push(self.pan);
        out
    }

    pub fn from_values(v: &[f64]) -> Result<Self> {
        check_values(v, &STRIP_RANGES)?;
        Ok(Self {
            gain_db: v[0],
            eq: eq_from_values(&v[1..11]),
            comp: comp_from_values(&v[11..17]),
            pan: v[17],
        })
    }
}

impl MasterBusParams {
    /// Physical values in [`MASTER_RANGES`] order.
    pub fn to_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(MASTER_PARAM_COUNT);
        eq_to_values(&self.eq, &mut out);
        comp_to_values(&self.comp, &mut out);
        out
    }

    pub fn from_values(v: &[f64]) -> Result<Self> {
        check_values(v, &MASTER_RANGES)?;
        Ok(Self {
            eq: eq_from_values(&v[0..10]),
            comp: comp_from_values(&v[10..16]),
        })
    }
}

fn check_values(v: &[f64], ranges: &[ParamRange]) -> Result<()> {
    if v.len() != ranges.len() {
        return Err(Error::ParamCount {
            expected: ranges.len(),
            got: v.len(),
        });
    }
    ranges.iter().zip(v).try_for_each(|(r, &x)| r.check(x))
}

impl ConsoleParams {
    /// Unity console: flat EQ, ratio-1 compressors, 0 dB gains, centred pans.
    pub fn identity(n_tracks: usize) -> Self {
        Self {
            strips: vec![ChannelStripParams::identity(); n_tracks],
            master: MasterBusParams::identity(),
        }
    }

    pub fn n_tracks(&self) -> usize {
        self.strips.len()
    }

    pub fn validate(&self) -> Result<()> {
        for s in &self.strips {
            check_values(&s.to_values(), &STRIP_RANGES)?;
        }
        check_values(&self.master.to_values(), &MASTER_RANGES)
    }

    /// Physical values in layout order.
    pub fn to_values(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(param_count(self.n_tracks()));
        for s in &self.strips {
            out.extend(s.to_values());
        }
        out.extend(self.master.to_values());
        out
    }

    pub fn normalize(&self) -> Result<NormalizedParamVector> {
        self.validate()?;
        let values = self
            .to_values()
            .iter()
            .zip(param_ranges(self.n_tracks()))
            .map(|(&x, slot)| slot.range.normalize(x).clamp(0.0, 1.0))
            .collect();
        Ok(NormalizedParamVector(values))
    }
}

/// Flat console parameter vector with every entry in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedParamVector(Vec<f64>);

impl NormalizedParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, &x)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !(0.0..=1.0).contains(*x))
        {
            return Err(Error::ParamOutOfRange {
                name: format!("normalized[{i}]"),
                value: x,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn denormalize(&self, n_tracks: usize) -> Result<ConsoleParams> {
        denormalize(&self.0, n_tracks)
    }
}

/// Map a normalized vector onto physical console settings.
pub fn denormalize(v: &[f64], n_tracks: usize) -> Result<ConsoleParams> {
    let expected = param_count(n_tracks);
    if v.len() != expected {
        return Err(Error::ParamCount {
            expected,
            got: v.len(),
        });
    }
    let mut physical = Vec::with_capacity(expected);
    for (&x, slot) in v.iter().zip(param_ranges(n_tracks)) {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::ParamOutOfRange {
                name: slot.range.name.to_string(),
                value: x,
                min: 0.0,
                max: 1.0,
            });
        }
        physical.push(slot.range.denormalize(x));
    }
    let strips = physical[..STRIP_PARAM_COUNT * n_tracks]
        .chunks_exact(STRIP_PARAM_COUNT)
        .map(ChannelStripParams::from_values)
        .collect::<Result<Vec<_>>>()?;
    let master = MasterBusParams::from_values(&physical[STRIP_PARAM_COUNT * n_tracks..])?;
    Ok(ConsoleParams { strips, master })
}
