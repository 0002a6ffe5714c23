//! Domain values shared by every other module: SNR, antenna layouts,
//! bandwidth, the capacity-model selector and capacity curves.
//!
//! SNR is held as a linear power ratio. Decibels only appear at the
//! edges ([`db_to_linear`], [`Snr::to_db`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest antenna count accepted on either side of a link.
pub const MAX_ANTENNAS: u32 = 64;

/// Signal-to-noise power ratio, linear scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Snr(f64);

impl Snr {
    pub const ZERO: Snr = Snr(0.0);

    pub fn new(linear: f64) -> Result<Self> {
        if !linear.is_finite() {
            return Err(Error::validation("snr", format!("{linear} is not finite")));
        }
        if linear < 0.0 {
            return Err(Error::validation("snr", format!("{linear} is negative")));
        }
        Ok(Snr(linear))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        db_to_linear(db)
    }

    #[inline]
    pub fn linear(self) -> f64 {
        self.0
    }

    /// Decibel value; `-inf` for a zero SNR.
    pub fn to_db(self) -> f64 {
        linear_to_db(self.0)
    }
}

/// `10^(db/10)`.
pub fn db_to_linear(db: f64) -> Result<Snr> {
    if !db.is_finite() {
        return Err(Error::validation("snr_db", format!("{db} is not finite")));
    }
    Snr::new(10f64.powf(db / 10.0))
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// SISO / SIMO / MISO / MIMO.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LinkKind {
    Siso,
    Simo,
    Miso,
    Mimo,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::Siso => "siso",
            LinkKind::Simo => "simo",
            LinkKind::Miso => "miso",
            LinkKind::Mimo => "mimo",
        }
    }
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Transmit and receive antenna counts, each in `1..=MAX_ANTENNAS`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct AntennaConfig {
    n_tx: u32,
    n_rx: u32,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    n_tx: u32,
    n_rx: u32,
}

impl TryFrom<RawConfig> for AntennaConfig {
    type Error = Error;
    fn try_from(raw: RawConfig) -> Result<Self> {
        AntennaConfig::new(raw.n_tx, raw.n_rx)
    }
}

impl From<AntennaConfig> for RawConfig {
    fn from(c: AntennaConfig) -> Self {
        RawConfig {
            n_tx: c.n_tx,
            n_rx: c.n_rx,
        }
    }
}

impl AntennaConfig {
    pub const SISO: AntennaConfig = AntennaConfig { n_tx: 1, n_rx: 1 };

    pub fn new(n_tx: u32, n_rx: u32) -> Result<Self> {
        check_count("n_tx", n_tx)?;
        check_count("n_rx", n_rx)?;
        Ok(AntennaConfig { n_tx, n_rx })
    }

    #[inline]
    pub fn n_tx(self) -> u32 {
        self.n_tx
    }

    #[inline]
    pub fn n_rx(self) -> u32 {
        self.n_rx
    }

    pub fn kind(self) -> LinkKind {
        classify(self)
    }

    /// The same link with transmitter and receiver swapped.
    pub fn transposed(self) -> Self {
        AntennaConfig {
            n_tx: self.n_rx,
            n_rx: self.n_tx,
        }
    }
}

fn check_count(field: &str, n: u32) -> Result<()> {
    if n == 0 || n > MAX_ANTENNAS {
        return Err(Error::validation(
            field,
            format!("{n} antennas is outside 1..={MAX_ANTENNAS}"),
        ));
    }
    Ok(())
}

pub fn classify(config: AntennaConfig) -> LinkKind {
    match (config.n_tx > 1, config.n_rx > 1) {
        (false, false) => LinkKind::Siso,
        (false, true) => LinkKind::Simo,
        (true, false) => LinkKind::Miso,
        (true, true) => LinkKind::Mimo,
    }
}

impl fmt::Display for AntennaConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_tx, self.n_rx)
    }
}

/// Parses `"<n_tx>x<n_rx>"`, e.g. `"2x1"`.
impl FromStr for AntennaConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::validation("config", format!("{s:?} is not of the form <n_tx>x<n_rx>"));
        let (tx, rx) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let n_tx = tx.trim().parse().map_err(|_| bad())?;
        let n_rx = rx.trim().parse().map_err(|_| bad())?;
        AntennaConfig::new(n_tx, n_rx)
    }
}

/// Channel bandwidth in Hz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Bandwidth(f64);

impl Bandwidth {
    /// Normalised bandwidth; capacities then read as bit/s/Hz.
    pub const UNIT: Bandwidth = Bandwidth(1.0);

    pub fn new(hertz: f64) -> Result<Self> {
        if !(hertz.is_finite() && hertz > 0.0) {
            return Err(Error::validation(
                "bandwidth",
                format!("{hertz} must be positive and finite"),
            ));
        }
        Ok(Bandwidth(hertz))
    }

    #[inline]
    pub fn hertz(self) -> f64 {
        self.0
    }
}

impl Default for Bandwidth {
    fn default() -> Self {
        Bandwidth::UNIT
    }
}

impl TryFrom<f64> for Bandwidth {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Bandwidth::new(v)
    }
}

impl From<Bandwidth> for f64 {
    fn from(b: Bandwidth) -> f64 {
        b.0
    }
}

/// Which capacity expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CapacityModel {
    /// `B log2(1 + snr)`.
    Shannon,
    /// `B log2(1 + n snr)` with `n` the antenna count on the multi-antenna side.
    ArrayGain,
    /// `B log2(1 + n_tx n_rx snr)`.
    ProductGain,
    /// `min(n_tx, n_rx) B log2(1 + snr)`.
    SpaceTime,
    /// Mean log-det capacity over i.i.d. Rayleigh channel draws.
    Ergodic { trials: u32, seed: u64 },
}

impl CapacityModel {
    pub fn ergodic(trials: u32, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::validation("trials", "must be at least 1"));
        }
        Ok(CapacityModel::Ergodic { trials, seed })
    }

    pub fn tag(&self) -> ModelTag {
        match self {
            CapacityModel::Shannon => ModelTag::Shannon,
            CapacityModel::ArrayGain => ModelTag::ArrayGain,
            CapacityModel::ProductGain => ModelTag::ProductGain,
            CapacityModel::SpaceTime => ModelTag::SpaceTime,
            CapacityModel::Ergodic { .. } => ModelTag::Ergodic,
        }
    }

    pub fn name(&self) -> &'static str {
        self.tag().as_str()
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self, CapacityModel::Ergodic { .. })
    }
}

impl fmt::Display for CapacityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// [`CapacityModel`] without the Monte-Carlo parameters; what users type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelTag {
    Shannon,
    ArrayGain,
    ProductGain,
    SpaceTime,
    Ergodic,
}

impl ModelTag {
    pub const ALL: [ModelTag; 5] = [
        ModelTag::Shannon,
        ModelTag::ArrayGain,
        ModelTag::ProductGain,
        ModelTag::SpaceTime,
        ModelTag::Ergodic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelTag::Shannon => "shannon",
            ModelTag::ArrayGain => "array_gain",
            ModelTag::ProductGain => "product_gain",
            ModelTag::SpaceTime => "space_time",
            ModelTag::Ergodic => "ergodic",
        }
    }

    /// Attaches Monte-Carlo parameters; they are ignored for closed forms.
    pub fn with_params(self, trials: u32, seed: u64) -> Result<CapacityModel> {
        Ok(match self {
            ModelTag::Shannon => CapacityModel::Shannon,
            ModelTag::ArrayGain => CapacityModel::ArrayGain,
            ModelTag::ProductGain => CapacityModel::ProductGain,
            ModelTag::SpaceTime => CapacityModel::SpaceTime,
            ModelTag::Ergodic => CapacityModel::ergodic(trials, seed)?,
        })
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Accepts the snake_case names plus kebab-case and a few short aliases.
impl FromStr for ModelTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match norm.as_str() {
            "shannon" | "siso" => ModelTag::Shannon,
            "array_gain" | "array" => ModelTag::ArrayGain,
            "product_gain" | "product" => ModelTag::ProductGain,
            "space_time" | "stc" => ModelTag::SpaceTime,
            "ergodic" | "monte_carlo" => ModelTag::Ergodic,
            _ => {
                let valid: Vec<_> = ModelTag::ALL.iter().map(|t| t.as_str()).collect();
                return Err(Error::validation(
                    "model",
                    format!("unknown model {s:?} (expected one of {})", valid.join(", ")),
                ));
            }
        })
    }
}

/// Column / legend name of a series: `<kind>_<nT>x<nR>_<model>`.
pub fn series_name(config: AntennaConfig, model: &CapacityModel) -> String {
    format!("{}_{}_{}", config.kind(), config, model.name())
}

/// One sample of a capacity curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub snr_db: f64,
    pub capacity: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

/// Capacity against SNR for one (config, model) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityCurve {
    config: AntennaConfig,
    model: CapacityModel,
    points: Vec<CurvePoint>,
}

impl CapacityCurve {
    /// Checks that `snr_db` is strictly increasing and every capacity is
    /// finite and non-negative.
    pub fn new(config: AntennaConfig, model: CapacityModel, points: Vec<CurvePoint>) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[0].snr_db < w[1].snr_db) {
                return Err(Error::validation(
                    "snr_db",
                    format!("grid not strictly increasing at {} -> {}", w[0].snr_db, w[1].snr_db),
                ));
            }
        }
        for p in &points {
            if !(p.capacity.is_finite() && p.capacity >= 0.0) {
                return Err(Error::validation(
                    "capacity",
                    format!("{} at {} dB is not a finite non-negative value", p.capacity, p.snr_db),
                ));
            }
        }
        Ok(CapacityCurve {
            config,
            model,
            points,
        })
    }

    pub fn config(&self) -> AntennaConfig {
        self.config
    }

    pub fn model(&self) -> &CapacityModel {
        &self.model
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn name(&self) -> String {
        series_name(self.config, &self.model)
    }

    pub fn capacities(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.capacity)
    }
}
