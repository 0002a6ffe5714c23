//! SNR sweeps over sets of (config, model) series, the built-in figure
//! presets, and grid-wide ordering checks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fading::{POWER_NORMALIZATION, RNG_SCHEME};
use crate::formulas::evaluate;
use crate::types::{
    db_to_linear, series_name, AntennaConfig, Bandwidth, CapacityCurve, CapacityModel, CurvePoint,
};

pub const DEFAULT_SNR_START_DB: f64 = 0.0;
pub const DEFAULT_SNR_STOP_DB: f64 = 20.0;
pub const DEFAULT_POINTS: usize = 81;

/// One curve to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Series {
    pub config: AntennaConfig,
    pub model: CapacityModel,
}

impl Series {
    pub fn new(config: AntennaConfig, model: CapacityModel) -> Self {
        Series { config, model }
    }

    pub fn name(&self) -> String {
        series_name(self.config, &self.model)
    }
}

/// A validated sweep description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    snr_start_db: f64,
    snr_stop_db: f64,
    points: usize,
    bandwidth: Bandwidth,
    series: Vec<Series>,
}

impl SweepSpec {
    pub fn new(
        snr_start_db: f64,
        snr_stop_db: f64,
        points: usize,
        bandwidth: Bandwidth,
        series: Vec<Series>,
    ) -> Result<Self> {
        if !snr_start_db.is_finite() {
            return Err(Error::validation("snr_start_db", format!("{snr_start_db} is not finite")));
        }
        if !snr_stop_db.is_finite() {
            return Err(Error::validation("snr_stop_db", format!("{snr_stop_db} is not finite")));
        }
        if !(snr_start_db < snr_stop_db) {
            return Err(Error::validation(
                "snr_stop_db",
                format!("{snr_stop_db} must exceed snr_start_db {snr_start_db}"),
            ));
        }
        if points < 2 {
            return Err(Error::validation("points", format!("{points} < 2")));
        }
        if series.is_empty() {
            return Err(Error::validation("series", "at least one series is required"));
        }
        for (i, s) in series.iter().enumerate() {
            if series[..i].contains(s) {
                return Err(Error::validation("series", format!("duplicate series {}", s.name())));
            }
        }
        let spec = SweepSpec {
            snr_start_db,
            snr_stop_db,
            points,
            bandwidth,
            series,
        };
        let grid = spec.grid();
        if grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::validation(
                "points",
                format!("{points} points do not give distinct dB values over this range"),
            ));
        }
        Ok(spec)
    }

    pub fn snr_start_db(&self) -> f64 {
        self.snr_start_db
    }

    pub fn snr_stop_db(&self) -> f64 {
        self.snr_stop_db
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.bandwidth
    }

    pub fn series(&self) -> &[Series] {
        &self.series
    }

    pub fn grid(&self) -> Vec<f64> {
        snr_grid(self.snr_start_db, self.snr_stop_db, self.points)
    }

    /// Seeds of all Monte-Carlo series, in series order.
    pub fn seeds(&self) -> Vec<u64> {
        self.series
            .iter()
            .filter_map(|s| match s.model {
                CapacityModel::Ergodic { seed, .. } => Some(seed),
                _ => None,
            })
            .collect()
    }
}

/// `start + k (stop - start) / (points - 1)` for `k = 0..points`.
pub fn snr_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    let span = stop - start;
    let denom = (points - 1) as f64;
    (0..points).map(|k| start + k as f64 * span / denom).collect()
}

/// Everything needed to regenerate a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub points: usize,
    pub bandwidth_hz: f64,
    pub grid: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_normalization: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rng: Option<String>,
}

impl Provenance {
    fn for_spec(spec: &SweepSpec) -> Self {
        let seeds = spec.seeds();
        let monte_carlo = spec.series.iter().any(|s| !s.model.is_deterministic());
        Provenance {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            snr_start_db: spec.snr_start_db,
            snr_stop_db: spec.snr_stop_db,
            points: spec.points,
            bandwidth_hz: spec.bandwidth.hertz(),
            grid: "snr_db[k] = start + k * (stop - start) / (points - 1)".to_string(),
            seeds,
            power_normalization: monte_carlo.then(|| POWER_NORMALIZATION.to_string()),
            rng: monte_carlo.then(|| RNG_SCHEME.to_string()),
        }
    }
}

/// Curves sharing one SNR grid, in series order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonDataset {
    pub curves: Vec<CapacityCurve>,
    pub provenance: Provenance,
}

impl ComparisonDataset {
    pub fn grid(&self) -> Vec<f64> {
        self.curves
            .first()
            .map(|c| c.points().iter().map(|p| p.snr_db).collect())
            .unwrap_or_default()
    }

    pub fn names(&self) -> Vec<String> {
        self.curves.iter().map(CapacityCurve::name).collect()
    }
}

fn run_series(spec: &SweepSpec, grid: &[f64], index: usize) -> Result<CapacityCurve> {
    let series = spec.series[index];
    let wrap = |e: Error| Error::Series {
        index,
        name: series.name(),
        source: Box::new(e),
    };
    let points = grid
        .iter()
        .map(|&snr_db| {
            let snr = db_to_linear(snr_db)?;
            let r = evaluate(series.model, spec.bandwidth, series.config, snr)?;
            Ok(CurvePoint {
                snr_db,
                capacity: r.bits_per_second,
                stderr: r.std_error,
            })
        })
        .collect::<Result<Vec<_>>>()
        .map_err(wrap)?;
    CapacityCurve::new(series.config, series.model, points).map_err(wrap)
}

/// Evaluates every series on the spec's grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<ComparisonDataset> {
    let grid = spec.grid();
    #[cfg(feature = "parallel")]
    let curves = {
        use rayon::prelude::*;
        (0..spec.series.len())
            .into_par_iter()
            .map(|i| run_series(spec, &grid, i))
            .collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let curves = (0..spec.series.len())
        .map(|i| run_series(spec, &grid, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonDataset {
        curves,
        provenance: Provenance::for_spec(spec),
    })
}

/// Built-in comparison sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Array gain on 2x1 and 3x1.
    Figure7,
    /// SISO against product gain on 2x2, 3x3, 4x4.
    Figure8,
    /// SISO, array gain on 2x1 and 3x1, product gain on 2x2 and 3x3.
    Figure9,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Figure7, Preset::Figure8, Preset::Figure9];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Figure7 => "figure7",
            Preset::Figure8 => "figure8",
            Preset::Figure9 => "figure9",
        }
    }

    fn series(self) -> Vec<Series> {
        let s = |t, r, model| Series::new(AntennaConfig::new(t, r).expect("preset config"), model);
        use CapacityModel::*;
        match self {
            Preset::Figure7 => vec![s(2, 1, ArrayGain), s(3, 1, ArrayGain)],
            Preset::Figure8 => vec![
                s(1, 1, Shannon),
                s(2, 2, ProductGain),
                s(3, 3, ProductGain),
                s(4, 4, ProductGain),
            ],
            Preset::Figure9 => vec![
                s(1, 1, Shannon),
                s(2, 1, ArrayGain),
                s(3, 1, ArrayGain),
                s(2, 2, ProductGain),
                s(3, 3, ProductGain),
            ],
        }
    }

    pub fn spec(self) -> SweepSpec {
        SweepSpec::new(
            DEFAULT_SNR_START_DB,
            DEFAULT_SNR_STOP_DB,
            DEFAULT_POINTS,
            Bandwidth::UNIT,
            self.series(),
        )
        .expect("preset spec is valid")
    }

    /// Series indices from highest to lowest expected capacity.
    pub fn expected_order(self) -> Vec<usize> {
        match self {
            Preset::Figure7 => vec![1, 0],
            Preset::Figure8 => vec![3, 2, 1, 0],
            Preset::Figure9 => vec![4, 3, 2, 1, 0],
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(name: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str() == name)
            .ok_or_else(|| Error::UnknownPreset {
                name: name.to_string(),
                valid: Preset::ALL.map(Preset::as_str).join(", "),
            })
    }
}

pub fn figure_preset(name: &str) -> Result<SweepSpec> {
    Ok(name.parse::<Preset>()?.spec())
}

/// Outcome of the ordering check at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCheck {
    pub snr_db: f64,
    /// Zero linear SNR; strict ordering is not required there.
    pub exempt: bool,
    pub holds: bool,
    /// First adjacent pair `(higher, lower)` of series indices that broke
    /// the strict order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    pub order: Vec<usize>,
    pub names: Vec<String>,
    pub points: Vec<PointCheck>,
    pub passed: bool,
}

impl OrderingReport {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.holds).count()
    }
}

/// Checks `curves[order[0]] > curves[order[1]] > ...` at every grid point.
pub fn assert_ordering(dataset: &ComparisonDataset, expected_order: &[usize]) -> Result<OrderingReport> {
    if let Some(&bad) = expected_order.iter().find(|&&i| i >= dataset.curves.len()) {
        return Err(Error::validation(
            "order",
            format!("series index {bad} out of range ({} curves)", dataset.curves.len()),
        ));
    }
    let grid = dataset.grid();
    let points = grid
        .iter()
        .enumerate()
        .map(|(k, &snr_db)| {
            let exempt = db_to_linear(snr_db).map(|s| s.linear() == 0.0).unwrap_or(true);
            let violation = expected_order
                .windows(2)
                .find(|w| {
                    let hi = dataset.curves[w[0]].points()[k].capacity;
                    let lo = dataset.curves[w[1]].points()[k].capacity;
                    !(hi > lo)
                })
                .map(|w| (w[0], w[1]));
            PointCheck {
                snr_db,
                exempt,
                holds: exempt || violation.is_none(),
                violation,
            }
        })
        .collect::<Vec<_>>();
    let passed = points.iter().all(|p| p.holds);
    Ok(OrderingReport {
        order: expected_order.to_vec(),
        names: expected_order.iter().map(|&i| dataset.curves[i].name()).collect(),
        points,
        passed,
    })
}

impl fmt::Display for OrderingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# expected order: {}", self.names.join(" > "))?;
        writeln!(f, "snr_db,status")?;
        for p in &self.points {
            let status = match (p.exempt, p.holds, p.violation) {
                (true, _, _) => "exempt".to_string(),
                (false, true, _) => "ok".to_string(),
                (false, false, Some((hi, lo))) => format!("FAIL series {hi} <= series {lo}"),
                (false, false, None) => "FAIL".to_string(),
            };
            writeln!(f, "{},{}", p.snr_db, status)?;
        }
        write!(
            f,
            "# {}: {} of {} points violate the order",
            if self.passed { "PASS" } else { "FAIL" },
            self.failures(),
            self.points.len()
        )
    }
}
