//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every exported function returns a JSON [`Plot`]: a shared x axis and one
//! or more named y series, which the page draws on a canvas. The plain
//! `*_plot` functions hold the logic so they can be tested natively.

use mimo_capacity::combining::{combine_snr, BranchSet, CombinerKind};
use mimo_capacity::fading::{draw_branch_amplitudes, ergodic_capacity, trial_rng};
use mimo_capacity::formulas::{evaluate, log2_1p};
use mimo_capacity::sweep::{run_sweep, Preset, Series, SweepSpec};
use mimo_capacity::{db_to_linear, AntennaConfig, Bandwidth, CapacityModel, ModelTag};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotSeries {
    pub name: String,
    pub y: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub err: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plot {
    pub x_label: String,
    pub y_label: String,
    pub x: Vec<f64>,
    pub series: Vec<PlotSeries>,
}

impl Plot {
    fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plot serialises")
    }
}

type Res<T> = Result<T, String>;

fn parse_series_list(list: &str, trials: u32, seed: u64) -> Res<Vec<Series>> {
    list.split([',', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|entry| {
            let (config, model) = entry
                .split_once(':')
                .ok_or_else(|| format!("{entry:?}: expected <n_tx>x<n_rx>:<model>"))?;
            let config: AntennaConfig = config.parse().map_err(|e| format!("{entry}: {e}"))?;
            let model = model
                .parse::<ModelTag>()
                .and_then(|t| t.with_params(trials, seed))
                .map_err(|e| format!("{entry}: {e}"))?;
            Ok(Series::new(config, model))
        })
        .collect()
}

/// The series list of a preset, in the `<n_tx>x<n_rx>:<model>` form the
/// sweep box accepts.
pub fn preset_series_text(name: &str) -> Res<String> {
    let preset: Preset = name.parse().map_err(|e: mimo_capacity::Error| e.to_string())?;
    Ok(preset
        .spec()
        .series()
        .iter()
        .map(|s| format!("{}:{}", s.config, s.model.name()))
        .collect::<Vec<_>>()
        .join(", "))
}

/// Capacity against SNR for each listed series.
pub fn sweep_plot(series: &str, start_db: f64, stop_db: f64, points: usize, trials: u32, seed: u64) -> Res<Plot> {
    let series = parse_series_list(series, trials, seed)?;
    let spec = SweepSpec::new(start_db, stop_db, points, Bandwidth::UNIT, series).map_err(|e| e.to_string())?;
    let d = run_sweep(&spec).map_err(|e| e.to_string())?;
    Ok(Plot {
        x_label: "SNR (dB)".into(),
        y_label: "Capacity (bit/s/Hz)".into(),
        x: d.grid(),
        series: d
            .curves
            .iter()
            .map(|c| PlotSeries {
                name: c.name(),
                y: c.capacities().collect(),
                err: (!c.model().is_deterministic())
                    .then(|| c.points().iter().map(|p| p.stderr.unwrap_or(0.0)).collect()),
            })
            .collect(),
    })
}

/// Ergodic Rayleigh capacity of one link next to the closed forms that
/// apply to it.
pub fn ergodic_plot(
    n_tx: u32,
    n_rx: u32,
    start_db: f64,
    stop_db: f64,
    points: usize,
    trials: u32,
    seed: u64,
) -> Res<Plot> {
    let config = AntennaConfig::new(n_tx, n_rx).map_err(|e| e.to_string())?;
    let mut models = vec![CapacityModel::Shannon, CapacityModel::ProductGain, CapacityModel::SpaceTime];
    if n_tx == 1 || n_rx == 1 {
        models.insert(1, CapacityModel::ArrayGain);
    }
    let grid = SweepSpec::new(
        start_db,
        stop_db,
        points,
        Bandwidth::UNIT,
        vec![Series::new(config, CapacityModel::Shannon)],
    )
    .map_err(|e| e.to_string())?
    .grid();
    let mut mean = Vec::with_capacity(grid.len());
    let mut err = Vec::with_capacity(grid.len());
    let mut closed = vec![Vec::with_capacity(grid.len()); models.len()];
    for &db in &grid {
        let snr = db_to_linear(db).map_err(|e| e.to_string())?;
        let est = ergodic_capacity(config, Bandwidth::UNIT, snr, trials, seed).map_err(|e| e.to_string())?;
        mean.push(est.mean_capacity);
        err.push(est.std_error);
        for (m, col) in models.iter().zip(closed.iter_mut()) {
            col.push(evaluate(*m, Bandwidth::UNIT, config, snr).map_err(|e| e.to_string())?.bits_per_second);
        }
    }
    let mut series = vec![PlotSeries {
        name: format!("{config} ergodic (Rayleigh)"),
        y: mean,
        err: Some(err),
    }];
    series.extend(models.iter().zip(closed).map(|(m, y)| PlotSeries {
        name: format!("{config} {}", m.name()),
        y,
        err: None,
    }));
    Ok(Plot {
        x_label: "SNR (dB)".into(),
        y_label: "Capacity (bit/s/Hz)".into(),
        x: grid,
        series,
    })
}

/// Mean post-combining capacity over Rayleigh draws against the number of
/// receive branches, for each combiner, with the array-gain closed form
/// for reference.
pub fn combining_plot(max_branches: u32, snr_db: f64, draws: u32, seed: u64) -> Res<Plot> {
    if max_branches == 0 || max_branches > mimo_capacity::types::MAX_ANTENNAS {
        return Err(format!("branches must be in 1..={}", mimo_capacity::types::MAX_ANTENNAS));
    }
    if draws == 0 {
        return Err("draws must be at least 1".into());
    }
    let snr = db_to_linear(snr_db).map_err(|e| e.to_string())?.linear();
    let xs: Vec<f64> = (1..=max_branches).map(f64::from).collect();
    let mut series: Vec<PlotSeries> = CombinerKind::ALL
        .iter()
        .map(|k| PlotSeries {
            name: k.as_str().to_string(),
            y: Vec::new(),
            err: None,
        })
        .collect();
    for n in 1..=max_branches {
        let mut sums = [0.0f64; 3];
        for k in 0..draws as u64 {
            let amps = draw_branch_amplitudes(n, &mut trial_rng(seed, k)).map_err(|e| e.to_string())?;
            let set = BranchSet::new(amps, 1.0).map_err(|e| e.to_string())?;
            for (sum, kind) in sums.iter_mut().zip(CombinerKind::ALL) {
                *sum += log2_1p(combine_snr(kind, &set, snr).map_err(|e| e.to_string())?.linear());
            }
        }
        for (s, sum) in series.iter_mut().zip(sums) {
            s.y.push(sum / draws as f64);
        }
    }
    series.push(PlotSeries {
        name: "array_gain (closed form)".into(),
        y: (1..=max_branches).map(|n| log2_1p(n as f64 * snr)).collect(),
        err: None,
    });
    Ok(Plot {
        x_label: "receive branches".into(),
        y_label: "Mean capacity (bit/s/Hz)".into(),
        x: xs,
        series,
    })
}

fn js(r: Res<Plot>) -> Result<String, JsValue> {
    r.map(|p| p.to_json()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn preset_series(name: &str) -> Result<String, JsValue> {
    preset_series_text(name).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn sweep(series: &str, start_db: f64, stop_db: f64, points: usize, trials: u32, seed: u64) -> Result<String, JsValue> {
    js(sweep_plot(series, start_db, stop_db, points, trials, seed))
}

#[wasm_bindgen]
pub fn ergodic(
    n_tx: u32,
    n_rx: u32,
    start_db: f64,
    stop_db: f64,
    points: usize,
    trials: u32,
    seed: u64,
) -> Result<String, JsValue> {
    js(ergodic_plot(n_tx, n_rx, start_db, stop_db, points, trials, seed))
}

#[wasm_bindgen]
pub fn combining(max_branches: u32, snr_db: f64, draws: u32, seed: u64) -> Result<String, JsValue> {
    js(combining_plot(max_branches, snr_db, draws, seed))
}
