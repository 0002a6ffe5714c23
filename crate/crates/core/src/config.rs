//! Declarative run files for `mimocap sweep --config`.
//!
//! A run file is flat TOML; every key is optional and unknown keys are
//! rejected:
//!
//! ```toml
//! snr_start_db = 0.0
//! snr_stop_db = 20.0
//! points = 81
//! bandwidth = 1.0
//! series = ["1x1:shannon", "2x1:array_gain", "2x2:product_gain", "2x2:ergodic"]
//! format = "csv"          # or "json"
//! out = "sweep.csv"
//! plot = true             # also write a gnuplot script next to `out`
//! seed = 1
//! trials = 10000
//! ```
//!
//! A series entry is `<n_tx>x<n_rx>:<model>`; `ergodic` series take
//! `trials` and `seed` from the file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{Series, SweepSpec, DEFAULT_POINTS, DEFAULT_SNR_START_DB, DEFAULT_SNR_STOP_DB};
use crate::types::{AntennaConfig, Bandwidth, ModelTag};

pub const DEFAULT_TRIALS: u32 = 10_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::validation("format", format!("{s:?} is not csv or json"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub snr_start_db: Option<f64>,
    pub snr_stop_db: Option<f64>,
    pub points: Option<usize>,
    pub bandwidth: Option<f64>,
    pub series: Option<Vec<String>>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub plot: Option<bool>,
    pub seed: Option<u64>,
    pub trials: Option<u32>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::validation("config", e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Validation { reason, .. } => {
                Error::validation("config", format!("{}: {reason}", path.display()))
            }
            other => other,
        })
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overridden_by(self, over: RunConfig) -> RunConfig {
        RunConfig {
            snr_start_db: over.snr_start_db.or(self.snr_start_db),
            snr_stop_db: over.snr_stop_db.or(self.snr_stop_db),
            points: over.points.or(self.points),
            bandwidth: over.bandwidth.or(self.bandwidth),
            series: over.series.or(self.series),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            plot: over.plot.or(self.plot),
            seed: over.seed.or(self.seed),
            trials: over.trials.or(self.trials),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn trials(&self) -> u32 {
        self.trials.unwrap_or(DEFAULT_TRIALS)
    }

    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let bandwidth = Bandwidth::new(self.bandwidth.unwrap_or(1.0))?;
        let entries = self
            .series
            .as_ref()
            .ok_or_else(|| Error::validation("series", "no series given"))?;
        let series = entries
            .iter()
            .map(|s| parse_series(s, self.trials(), self.seed()))
            .collect::<Result<Vec<_>>>()?;
        SweepSpec::new(
            self.snr_start_db.unwrap_or(DEFAULT_SNR_START_DB),
            self.snr_stop_db.unwrap_or(DEFAULT_SNR_STOP_DB),
            self.points.unwrap_or(DEFAULT_POINTS),
            bandwidth,
            series,
        )
    }
}

/// Parses `"<n_tx>x<n_rx>:<model>"`.
pub fn parse_series(entry: &str, trials: u32, seed: u64) -> Result<Series> {
    let (config, model) = entry.trim().split_once(':').ok_or_else(|| {
        Error::validation("series", format!("{entry:?} is not of the form <n_tx>x<n_rx>:<model>"))
    })?;
    let config: AntennaConfig = config.parse()?;
    let model = model.parse::<ModelTag>()?.with_params(trials, seed)?;
    Ok(Series::new(config, model))
}

/// Splits a comma-separated `--series` value.
pub fn split_series_list(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::CapacityModel;

    #[test]
    fn full_file() {
        let cfg = RunConfig::from_toml(
            r#"
snr_start_db = -5.0
snr_stop_db = 15.0
points = 5
bandwidth = 2.0
series = ["1x1:shannon", "1x3:array-gain", "2x2:ergodic"]
format = "json"
out = "x.json"
plot = false
seed = 9
trials = 50
"#,
        )
        .unwrap();
        let spec = cfg.sweep_spec().unwrap();
        assert_eq!(spec.grid(), vec![-5.0, 0.0, 5.0, 10.0, 15.0]);
        assert_eq!(spec.bandwidth().hertz(), 2.0);
        assert_eq!(spec.series()[2].model, CapacityModel::Ergodic { trials: 50, seed: 9 });
        assert_eq!(cfg.format, Some(OutputFormat::Json));
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = RunConfig::from_toml("snr_start = 1.0\n").unwrap_err().to_string();
        assert!(err.contains("snr_start"), "{err}");
    }

    #[test]
    fn overrides() {
        let file = RunConfig {
            points: Some(5),
            seed: Some(3),
            ..Default::default()
        };
        let flags = RunConfig {
            points: Some(9),
            ..Default::default()
        };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.points, Some(9));
        assert_eq!(merged.seed(), 3);
        assert_eq!(merged.trials(), DEFAULT_TRIALS);
    }

    #[test]
    fn series_parsing() {
        let s = parse_series(" 3x1 : array_gain", 1, 1).unwrap();
        assert_eq!(s.name(), "miso_3x1_array_gain");
        assert!(parse_series("3x1", 1, 1).is_err());
        assert!(parse_series("3x1:foo", 1, 1).is_err());
        assert!(parse_series("2x2:ergodic", 0, 1).is_err());
        assert_eq!(split_series_list("1x1:shannon, 2x2:stc,"), vec!["1x1:shannon", "2x2:stc"]);
    }

    #[test]
    fn missing_series() {
        let err = RunConfig::default().sweep_spec().unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "series"));
    }
}
