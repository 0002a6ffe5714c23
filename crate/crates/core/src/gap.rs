//! Signed gap between the Monte-Carlo log-det referee and a closed-form
//! model on a handful of links and SNRs.

use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::fading::{ergodic_capacity, POWER_NORMALIZATION};
use crate::formulas::evaluate;
use crate::types::{db_to_linear, AntennaConfig, Bandwidth, CapacityModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub config: AntennaConfig,
    pub snr_db: f64,
    pub closed_form: f64,
    pub ergodic_mean: f64,
    pub std_error: f64,
    /// `ergodic_mean - closed_form`.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub model: CapacityModel,
    pub trials: u32,
    pub seed: u64,
    pub rows: Vec<GapRow>,
}

pub const DEFAULT_GAP_SNRS_DB: [f64; 3] = [0.0, 10.0, 20.0];

pub fn default_gap_configs() -> Vec<AntennaConfig> {
    vec![AntennaConfig::new(2, 2).unwrap(), AntennaConfig::new(4, 4).unwrap()]
}

/// Compares `model` to the ergodic estimate for every (config, snr) pair.
/// Each pair reuses `seed`, so rows at different SNRs share channel draws.
pub fn oracle_gap_report(
    model: CapacityModel,
    configs: &[AntennaConfig],
    snrs_db: &[f64],
    b: Bandwidth,
    trials: u32,
    seed: u64,
) -> Result<GapReport> {
    let mut rows = Vec::with_capacity(configs.len() * snrs_db.len());
    for &config in configs {
        for &snr_db in snrs_db {
            let snr = db_to_linear(snr_db)?;
            let closed_form = evaluate(model, b, config, snr)?.bits_per_second;
            let est = ergodic_capacity(config, b, snr, trials, seed)?;
            rows.push(GapRow {
                config,
                snr_db,
                closed_form,
                ergodic_mean: est.mean_capacity,
                std_error: est.std_error,
                gap: est.mean_capacity - closed_form,
            });
        }
    }
    Ok(GapReport {
        model,
        trials,
        seed,
        rows,
    })
}

impl fmt::Display for GapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# ergodic log-det capacity vs {} closed form", self.model)?;
        writeln!(
            f,
            "# informational only: the closed form carries no quantitative target, so no agreement is asserted"
        )?;
        writeln!(f, "# {POWER_NORMALIZATION}")?;
        writeln!(f, "# trials={} seed={}", self.trials, self.seed)?;
        writeln!(f, "config,snr_db,closed_form,ergodic_mean,std_error,gap")?;
        for r in &self.rows {
            writeln!(
                f,
                "{},{},{:.6},{:.6},{:.6},{:+.6}",
                r.config, r.snr_db, r.closed_form, r.ergodic_mean, r.std_error, r.gap
            )?;
        }
        Ok(())
    }
}
