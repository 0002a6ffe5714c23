//! Receive diversity combining at the SNR level.
//!
//! With branch SNR `g_i = P a_i^2 / N`:
//!
//! * selection picks `max g_i`,
//! * maximal-ratio sums `sum g_i`,
//! * equal-gain co-phases unit-weight branches: `P (sum a_i)^2 / (n N)`.
//!
//! Noise is i.i.d. with the same power on every branch.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formulas::{siso_capacity, CapacityResult};
use crate::types::{AntennaConfig, Bandwidth, Snr};

/// Per-branch channel amplitudes and the common noise power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSet {
    amplitudes: Vec<f64>,
    noise_power: f64,
}

impl BranchSet {
    pub fn new(amplitudes: Vec<f64>, noise_power: f64) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::validation("amplitudes", "at least one branch is required"));
        }
        if let Some(a) = amplitudes.iter().find(|a| !(a.is_finite() && **a >= 0.0)) {
            return Err(Error::validation(
                "amplitudes",
                format!("{a} is not a finite non-negative amplitude"),
            ));
        }
        if !(noise_power.is_finite() && noise_power > 0.0) {
            return Err(Error::validation(
                "noise_power",
                format!("{noise_power} must be positive and finite"),
            ));
        }
        Ok(BranchSet {
            amplitudes,
            noise_power,
        })
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    fn branch_snrs(&self, tx_power: f64) -> impl Iterator<Item = f64> + '_ {
        self.amplitudes
            .iter()
            .map(move |a| tx_power * a * a / self.noise_power)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombinerKind {
    Selection,
    /// Also called maximum gain combining.
    MaximalRatio,
    EqualGain,
}

impl CombinerKind {
    pub const ALL: [CombinerKind; 3] = [
        CombinerKind::Selection,
        CombinerKind::MaximalRatio,
        CombinerKind::EqualGain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CombinerKind::Selection => "selection",
            CombinerKind::MaximalRatio => "maximal_ratio",
            CombinerKind::EqualGain => "equal_gain",
        }
    }
}

impl fmt::Display for CombinerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CombinerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match norm.as_str() {
            "selection" | "sc" => CombinerKind::Selection,
            "maximal_ratio" | "mrc" | "maximum_gain" => CombinerKind::MaximalRatio,
            "equal_gain" | "egc" => CombinerKind::EqualGain,
            _ => {
                return Err(Error::validation(
                    "scheme",
                    format!("unknown combiner {s:?} (expected selection, maximal_ratio or equal_gain)"),
                ))
            }
        })
    }
}

fn check_power(tx_power: f64) -> Result<()> {
    if !(tx_power.is_finite() && tx_power > 0.0) {
        return Err(Error::validation(
            "tx_power",
            format!("{tx_power} must be positive and finite"),
        ));
    }
    Ok(())
}

/// Post-combining SNR.
pub fn combine_snr(kind: CombinerKind, branches: &BranchSet, tx_power: f64) -> Result<Snr> {
    check_power(tx_power)?;
    let snr = match kind {
        CombinerKind::Selection => branches.branch_snrs(tx_power).fold(0.0, f64::max),
        CombinerKind::MaximalRatio => branches.branch_snrs(tx_power).sum(),
        CombinerKind::EqualGain => {
            let sum: f64 = branches.amplitudes.iter().sum();
            tx_power * sum * sum / (branches.len() as f64 * branches.noise_power)
        }
    };
    Snr::new(snr)
}

/// Shannon capacity at the post-combining SNR. The result is labelled as a
/// `1 x n` SIMO link.
pub fn combined_capacity(
    kind: CombinerKind,
    branches: &BranchSet,
    b: Bandwidth,
    tx_power: f64,
) -> Result<CapacityResult> {
    let snr = combine_snr(kind, branches, tx_power)?;
    let mut result = siso_capacity(b, snr);
    if let Ok(config) = AntennaConfig::new(1, branches.len() as u32) {
        result.config = config;
    }
    Ok(result)
}
