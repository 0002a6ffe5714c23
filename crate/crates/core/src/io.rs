//! Dataset serialisation: CSV, JSON and gnuplot scripts.
//!
//! CSV layout: a `snr_db` column, then one column per series named
//! `<kind>_<nT>x<nR>_<model>`. Numbers use Rust's shortest round-trip
//! formatting, so parsing a cell gives back the exact `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{ComparisonDataset, Provenance};
use crate::types::{AntennaConfig, CapacityCurve, CapacityModel, CurvePoint};

pub fn csv_string(dataset: &ComparisonDataset) -> String {
    let mut out = String::from("snr_db");
    for name in dataset.names() {
        out.push(',');
        out.push_str(&name);
    }
    out.push('\n');
    for (k, snr_db) in dataset.grid().iter().enumerate() {
        write!(out, "{snr_db}").unwrap();
        for curve in &dataset.curves {
            write!(out, ",{}", curve.points()[k].capacity).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv<W: Write>(dataset: &ComparisonDataset, mut dest: W) -> std::io::Result<()> {
    dest.write_all(csv_string(dataset).as_bytes())?;
    dest.flush()
}

/// A parsed CSV: column names (without `snr_db`), the grid, and one column
/// of capacities per series.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub names: Vec<String>,
    pub snr_db: Vec<f64>,
    pub columns: Vec<Vec<f64>>,
}

pub fn parse_csv(text: &str) -> Result<CsvTable> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::validation("csv", "empty input"))?;
    let mut cols = header.split(',');
    if cols.next() != Some("snr_db") {
        return Err(Error::validation("csv", "first column must be snr_db"));
    }
    let names: Vec<String> = cols.map(str::to_string).collect();
    let mut table = CsvTable {
        columns: vec![Vec::new(); names.len()],
        names,
        snr_db: Vec::new(),
    };
    for (row, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != table.names.len() + 1 {
            return Err(Error::validation(
                "csv",
                format!("row {} has {} cells, expected {}", row + 1, cells.len(), table.names.len() + 1),
            ));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::validation("csv", format!("row {}: {s:?} is not a number", row + 1)))
        };
        table.snr_db.push(num(cells[0])?);
        for (col, cell) in table.columns.iter_mut().zip(&cells[1..]) {
            col.push(num(cell)?);
        }
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonSeries {
    pub name: String,
    pub config: AntennaConfig,
    pub model: CapacityModel,
    pub points: Vec<CurvePoint>,
}

/// JSON form of a [`ComparisonDataset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonDataset {
    pub provenance: Provenance,
    pub series: Vec<JsonSeries>,
}

impl From<&ComparisonDataset> for JsonDataset {
    fn from(d: &ComparisonDataset) -> Self {
        JsonDataset {
            provenance: d.provenance.clone(),
            series: d
                .curves
                .iter()
                .map(|c| JsonSeries {
                    name: c.name(),
                    config: c.config(),
                    model: *c.model(),
                    points: c.points().to_vec(),
                })
                .collect(),
        }
    }
}

impl TryFrom<JsonDataset> for ComparisonDataset {
    type Error = Error;
    fn try_from(j: JsonDataset) -> Result<Self> {
        let curves = j
            .series
            .into_iter()
            .map(|s| CapacityCurve::new(s.config, s.model, s.points))
            .collect::<Result<Vec<_>>>()?;
        let grid = |c: &CapacityCurve| c.points().iter().map(|p| p.snr_db).collect::<Vec<_>>();
        if let Some(first) = curves.first() {
            if curves.iter().any(|c| grid(c) != grid(first)) {
                return Err(Error::validation("series", "curves do not share one snr_db grid"));
            }
        }
        Ok(ComparisonDataset {
            curves,
            provenance: j.provenance,
        })
    }
}

pub fn json_string(dataset: &ComparisonDataset) -> String {
    let mut s = serde_json::to_string_pretty(&JsonDataset::from(dataset)).expect("dataset serialises");
    s.push('\n');
    s
}

pub fn emit_json<W: Write>(dataset: &ComparisonDataset, mut dest: W) -> std::io::Result<()> {
    dest.write_all(json_string(dataset).as_bytes())?;
    dest.flush()
}

pub fn parse_json(text: &str) -> Result<ComparisonDataset> {
    let j: JsonDataset =
        serde_json::from_str(text).map_err(|e| Error::validation("json", e.to_string()))?;
    j.try_into()
}

fn gnuplot_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// gnuplot script drawing one line per series from `csv_path`, rendering
/// to a PNG next to it.
pub fn plot_script_string(dataset: &ComparisonDataset, csv_path: &Path) -> String {
    let csv = csv_path.to_string_lossy();
    let png = csv_path.with_extension("png");
    let mut s = String::new();
    writeln!(
        s,
        "# gnuplot script generated by {} {}",
        dataset.provenance.tool, dataset.provenance.version
    )
    .unwrap();
    writeln!(s, "# usage: gnuplot <this file>").unwrap();
    s.push_str("set datafile separator ','\n");
    s.push_str("set terminal png size 900,600\n");
    writeln!(s, "set output {}", gnuplot_quote(&png.to_string_lossy())).unwrap();
    s.push_str("set key top left noenhanced\n");
    s.push_str("set grid\n");
    s.push_str("set xlabel 'SNR (dB)'\n");
    s.push_str("set ylabel 'Capacity (bit/s/Hz)'\n");
    let names = dataset.names();
    for (i, name) in names.iter().enumerate() {
        let src = if i == 0 { gnuplot_quote(&csv) } else { "''".to_string() };
        let lead = if i == 0 { "plot " } else { "     " };
        let tail = if i + 1 < names.len() { ", \\" } else { "" };
        writeln!(
            s,
            "{lead}{src} using 1:{} with lines linewidth 2 title {}{tail}",
            i + 2,
            gnuplot_quote(name)
        )
        .unwrap();
    }
    s
}

pub fn emit_plot_script<W: Write>(
    dataset: &ComparisonDataset,
    csv_path: &Path,
    mut dest: W,
) -> std::io::Result<()> {
    dest.write_all(plot_script_string(dataset, csv_path).as_bytes())?;
    dest.flush()
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::{run_sweep, Preset, Series, SweepSpec};
    use crate::types::Bandwidth;
    use proptest::prelude::*;

    fn two_point() -> ComparisonDataset {
        let spec = SweepSpec::new(
            0.0,
            10.0,
            2,
            Bandwidth::UNIT,
            vec![Series::new(AntennaConfig::SISO, CapacityModel::Shannon)],
        )
        .unwrap();
        run_sweep(&spec).unwrap()
    }

    #[test]
    fn two_point_csv_is_bit_exact() {
        assert_eq!(
            csv_string(&two_point()),
            "snr_db,siso_1x1_shannon\n0,1\n10,3.4594316186372978\n"
        );
    }

    #[test]
    fn figure9_header() {
        let d = run_sweep(&Preset::Figure9.spec()).unwrap();
        let csv = csv_string(&d);
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "snr_db,siso_1x1_shannon,miso_2x1_array_gain,miso_3x1_array_gain,mimo_2x2_product_gain,mimo_3x3_product_gain"
        );
        assert_eq!(csv.lines().count(), 82);
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let d = run_sweep(&Preset::Figure9.spec()).unwrap();
        let t = parse_csv(&csv_string(&d)).unwrap();
        assert_eq!(t.names, d.names());
        assert_eq!(t.snr_db, d.grid());
        for (col, curve) in t.columns.iter().zip(&d.curves) {
            let expected: Vec<u64> = curve.capacities().map(f64::to_bits).collect();
            let got: Vec<u64> = col.iter().map(|x| x.to_bits()).collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn parse_csv_errors() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("snr,a\n").is_err());
        assert!(parse_csv("snr_db,a\n1,2,3\n").is_err());
        assert!(parse_csv("snr_db,a\n1,x\n").is_err());
    }

    #[test]
    fn json_round_trip() {
        let d = run_sweep(&Preset::Figure7.spec()).unwrap();
        let back = parse_json(&json_string(&d)).unwrap();
        assert_eq!(back, d);
        let v: serde_json::Value = serde_json::from_str(&json_string(&d)).unwrap();
        assert_eq!(v["series"][0]["name"], "miso_2x1_array_gain");
        assert_eq!(v["series"][0]["config"]["n_tx"], 2);
        assert_eq!(v["series"][0]["model"]["kind"], "array_gain");
        assert!(v["series"][0]["points"][0].get("stderr").is_none());
        assert_eq!(v["provenance"]["points"], 81);
    }

    #[test]
    fn plot_script_lists_every_series() {
        let d = run_sweep(&Preset::Figure8.spec()).unwrap();
        let s = plot_script_string(&d, Path::new("out/f8.csv"));
        assert!(s.contains("set xlabel 'SNR (dB)'"));
        assert!(s.contains("set ylabel 'Capacity (bit/s/Hz)'"));
        assert!(s.contains("set output 'out/f8.png'"));
        for col in 2..=5 {
            assert!(s.contains(&format!("using 1:{col} ")), "{s}");
        }
        assert!(!s.contains("using 1:6"));
        for name in d.names() {
            assert!(s.contains(&format!("title '{name}'")));
        }
        assert_eq!(s, plot_script_string(&d, Path::new("out/f8.csv")));

        let d7 = run_sweep(&Preset::Figure7.spec()).unwrap();
        let s7 = plot_script_string(&d7, Path::new("f7.csv"));
        assert_eq!(s7.matches(" with lines").count(), 2);
    }

    #[test]
    fn write_file_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = write_file(&blocker.join("sub/out.csv"), "data").unwrap_err();
        assert!(err.is_io());
        assert!(err.to_string().contains("file"), "{err}");
    }

    proptest! {
        #[test]
        fn shortest_decimal_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            let s = format!("{x}");
            prop_assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
