//! Closed-form link capacities.
//!
//! | model          | capacity                         |
//! |----------------|----------------------------------|
//! | `Shannon`      | `B log2(1 + snr)`                |
//! | `ArrayGain`    | `B log2(1 + n snr)`              |
//! | `ProductGain`  | `B log2(1 + n_tx n_rx snr)`      |
//! | `SpaceTime`    | `min(n_tx, n_rx) B log2(1 + snr)`|
//!
//! `log2(1 + x)` is evaluated as `ln_1p(x) / ln 2` so low-SNR points keep
//! full relative precision.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading;
use crate::types::{AntennaConfig, Bandwidth, CapacityModel, Snr, MAX_ANTENNAS};

/// A single capacity evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub bits_per_second: f64,
    pub model: CapacityModel,
    pub config: AntennaConfig,
    /// Standard error of the mean, Monte-Carlo evaluations only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

impl CapacityResult {
    fn exact(bits_per_second: f64, model: CapacityModel, config: AntennaConfig) -> Self {
        CapacityResult {
            bits_per_second,
            model,
            config,
            std_error: None,
        }
    }
}

/// `log2(1 + x)` via `ln_1p`.
#[inline]
pub fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

pub fn siso_capacity(b: Bandwidth, snr: Snr) -> CapacityResult {
    CapacityResult::exact(
        b.hertz() * log2_1p(snr.linear()),
        CapacityModel::Shannon,
        AntennaConfig::SISO,
    )
}

/// Capacity with an `n`-fold array gain on the SNR. `n` counts transmit
/// antennas for MISO and receive antennas for SIMO; the reported config is
/// the MISO form `n x 1`.
pub fn array_gain_capacity(b: Bandwidth, n: u32, snr: Snr) -> Result<CapacityResult> {
    let config = AntennaConfig::new(n, 1).map_err(|_| {
        Error::validation("n", format!("{n} antennas is outside 1..={MAX_ANTENNAS}"))
    })?;
    Ok(CapacityResult::exact(
        b.hertz() * log2_1p(n as f64 * snr.linear()),
        CapacityModel::ArrayGain,
        config,
    ))
}

pub fn product_gain_capacity(b: Bandwidth, config: AntennaConfig, snr: Snr) -> CapacityResult {
    let gain = (config.n_tx() * config.n_rx()) as f64;
    CapacityResult::exact(
        b.hertz() * log2_1p(gain * snr.linear()),
        CapacityModel::ProductGain,
        config,
    )
}

/// Space-time coded capacity: `min(n_tx, n_rx)` parallel SISO links.
pub fn stc_capacity(b: Bandwidth, config: AntennaConfig, snr: Snr) -> CapacityResult {
    let streams = config.n_tx().min(config.n_rx()) as f64;
    CapacityResult::exact(
        streams * (b.hertz() * log2_1p(snr.linear())),
        CapacityModel::SpaceTime,
        config,
    )
}

/// Dispatches on `model`.
///
/// `ArrayGain` uses `n = max(n_tx, n_rx)` and is rejected for links with
/// more than one antenna on both sides. `Shannon` ignores the antenna
/// counts. `Ergodic` runs the Monte-Carlo estimator.
pub fn evaluate(
    model: CapacityModel,
    b: Bandwidth,
    config: AntennaConfig,
    snr: Snr,
) -> Result<CapacityResult> {
    let mut result = match model {
        CapacityModel::Shannon => siso_capacity(b, snr),
        CapacityModel::ArrayGain => {
            if config.n_tx() > 1 && config.n_rx() > 1 {
                return Err(Error::ModelMismatch {
                    model: model.name().to_string(),
                    n_tx: config.n_tx(),
                    n_rx: config.n_rx(),
                    reason: "array gain needs a single antenna on one side (SIMO or MISO)".into(),
                });
            }
            array_gain_capacity(b, config.n_tx().max(config.n_rx()), snr)?
        }
        CapacityModel::ProductGain => product_gain_capacity(b, config, snr),
        CapacityModel::SpaceTime => stc_capacity(b, config, snr),
        CapacityModel::Ergodic { trials, seed } => {
            let est = fading::ergodic_capacity(config, b, snr, trials, seed)?;
            CapacityResult {
                bits_per_second: est.mean_capacity,
                model,
                config,
                std_error: Some(est.std_error),
            }
        }
    };
    result.config = config;
    Ok(result)
}
