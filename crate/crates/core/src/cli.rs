//! The `mimocap` command line.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 I/O error,
//! 3 ordering check failed.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::combining::{combine_snr, combined_capacity, BranchSet, CombinerKind};
use crate::config::{split_series_list, OutputFormat, RunConfig, DEFAULT_SEED, DEFAULT_TRIALS};
use crate::error::{Error, Result};
use crate::fading::{ergodic_capacity, ErgodicEstimate};
use crate::formulas::evaluate;
use crate::gap::{default_gap_configs, oracle_gap_report, DEFAULT_GAP_SNRS_DB};
use crate::io::{csv_string, json_string, plot_script_string, write_file};
use crate::sweep::{assert_ordering, run_sweep, Preset, SweepSpec};
use crate::types::{db_to_linear, AntennaConfig, Bandwidth, ModelTag};

/// Relative output paths are resolved against this directory when set.
pub const OUT_DIR_ENV: &str = "MIMOCAP_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_ORDERING: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "mimocap", version, about = "SISO/SIMO/MISO/MIMO link capacity calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Capacity of one link at one SNR.
    Capacity {
        /// shannon, array_gain, product_gain, space_time or ergodic
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 1)]
        ntx: u32,
        #[arg(long, default_value_t = 1)]
        nrx: u32,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: f64,
        #[arg(long, default_value_t = 1.0)]
        bandwidth: f64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Sweep SNR for a list of series, from a run file and/or flags.
    Sweep(SweepArgs),
    /// Run a built-in comparison preset (figure7, figure8, figure9).
    Figure {
        name: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte-Carlo ergodic capacity over Rayleigh channel draws.
    Ergodic {
        #[arg(long)]
        ntx: u32,
        #[arg(long)]
        nrx: u32,
        #[arg(long, allow_hyphen_values = true)]
        snr_db: f64,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        bandwidth: f64,
        /// Worker threads (default: all cores). Results do not depend on it.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Post-combining SNR and capacity for given branch amplitudes.
    Combine {
        /// selection, maximal_ratio or equal_gain
        #[arg(long)]
        scheme: String,
        /// Comma-separated branch amplitudes |h_i|.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        amplitudes: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        noise_power: f64,
        #[arg(long, default_value_t = 1.0)]
        tx_power: f64,
        #[arg(long, default_value_t = 1.0)]
        bandwidth: f64,
    },
    /// Check the expected capacity ordering of a preset at every grid point.
    Check { name: String },
    /// Signed gap between the ergodic referee and a closed-form model.
    Gap {
        #[arg(long, default_value = "product_gain")]
        model: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u32,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Debug, Default)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Also write a gnuplot script (`<out>.gp`); needs --out and csv.
    #[arg(long)]
    plot: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// TOML run file; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    snr_start_db: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    snr_stop_db: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Comma-separated `<n_tx>x<n_rx>:<model>` entries.
    #[arg(long)]
    series: Option<String>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_VALIDATION
                }
            };
        }
    };
    let out_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    let ctx = Ctx { out_dir, stdout };
    match dispatch(cli.command, ctx) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_io() {
                EXIT_IO
            } else {
                EXIT_VALIDATION
            }
        }
    }
}

struct Ctx<'a> {
    out_dir: Option<PathBuf>,
    stdout: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn resolve(&self, path: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }

    fn print(&mut self, text: &str) -> Result<()> {
        self.stdout
            .write_all(text.as_bytes())
            .and_then(|_| self.stdout.flush())
            .map_err(|e| Error::io("<stdout>", e))
    }
}

fn dispatch(command: Command, mut ctx: Ctx<'_>) -> Result<i32> {
    match command {
        Command::Capacity {
            model,
            ntx,
            nrx,
            snr_db,
            bandwidth,
            trials,
            seed,
        } => {
            let model = model.parse::<ModelTag>()?.with_params(trials, seed)?;
            let config = AntennaConfig::new(ntx, nrx).map_err(rename_field(&[("n_tx", "ntx"), ("n_rx", "nrx")]))?;
            let snr = db_to_linear(snr_db)?;
            let b = Bandwidth::new(bandwidth)?;
            let r = evaluate(model, b, config, snr)?;
            let line = match r.std_error {
                Some(se) => format!("{:?} +/- {:?}\n", r.bits_per_second, se),
                None => format!("{:?}\n", r.bits_per_second),
            };
            ctx.print(&line)?;
        }
        Command::Sweep(args) => {
            let file = match &args.config {
                Some(path) => RunConfig::load(path)?,
                None => RunConfig::default(),
            };
            let flags = RunConfig {
                snr_start_db: args.snr_start_db,
                snr_stop_db: args.snr_stop_db,
                points: args.points,
                bandwidth: args.bandwidth,
                series: args.series.as_deref().map(split_series_list),
                format: args.output.format.as_deref().map(str::parse).transpose()?,
                out: args.output.out.clone(),
                plot: args.output.plot.then_some(true),
                seed: args.seed,
                trials: args.trials,
            };
            let cfg = file.overridden_by(flags);
            let spec = cfg.sweep_spec()?;
            let output = OutputArgs {
                out: cfg.out.clone(),
                format: None,
                plot: cfg.plot.unwrap_or(false),
            };
            write_dataset(&mut ctx, &spec, &output, cfg.format.unwrap_or_default())?;
        }
        Command::Figure { name, output } => {
            let spec = name.parse::<Preset>()?.spec();
            let format = output.format.as_deref().map(str::parse).transpose()?.unwrap_or_default();
            write_dataset(&mut ctx, &spec, &output, format)?;
        }
        Command::Ergodic {
            ntx,
            nrx,
            snr_db,
            trials,
            seed,
            bandwidth,
            workers,
        } => {
            let config = AntennaConfig::new(ntx, nrx).map_err(rename_field(&[("n_tx", "ntx"), ("n_rx", "nrx")]))?;
            let snr = db_to_linear(snr_db)?;
            let b = Bandwidth::new(bandwidth)?;
            let est = run_ergodic(config, b, snr, trials, seed, workers)?;
            let body = json!({
                "config": config.to_string(),
                "snr_db": snr_db,
                "bandwidth_hz": b.hertz(),
                "mean_capacity": est.mean_capacity,
                "std_error": est.std_error,
                "trials": est.trials,
                "seed": est.seed,
                "power_normalization": crate::fading::POWER_NORMALIZATION,
            });
            ctx.print(&format!("{}\n", serde_json::to_string_pretty(&body).unwrap()))?;
        }
        Command::Combine {
            scheme,
            amplitudes,
            noise_power,
            tx_power,
            bandwidth,
        } => {
            let kind: CombinerKind = scheme.parse()?;
            let branches = BranchSet::new(amplitudes, noise_power)?;
            let b = Bandwidth::new(bandwidth)?;
            let snr = combine_snr(kind, &branches, tx_power)?;
            let cap = combined_capacity(kind, &branches, b, tx_power)?;
            let body = json!({
                "scheme": kind.as_str(),
                "branches": branches.len(),
                "snr": snr.linear(),
                "snr_db": snr.to_db(),
                "capacity": cap.bits_per_second,
            });
            ctx.print(&format!("{}\n", serde_json::to_string_pretty(&body).unwrap()))?;
        }
        Command::Check { name } => {
            let preset: Preset = name.parse()?;
            let dataset = run_sweep(&preset.spec())?;
            let report = assert_ordering(&dataset, &preset.expected_order())?;
            ctx.print(&format!("# check {preset}\n{report}\n"))?;
            if !report.passed {
                return Ok(EXIT_ORDERING);
            }
        }
        Command::Gap { model, trials, seed } => {
            let model = model.parse::<ModelTag>()?.with_params(trials, seed)?;
            let report = oracle_gap_report(
                model,
                &default_gap_configs(),
                &DEFAULT_GAP_SNRS_DB,
                Bandwidth::UNIT,
                trials,
                seed,
            )?;
            ctx.print(&report.to_string())?;
        }
    }
    Ok(EXIT_OK)
}

fn rename_field(map: &'static [(&'static str, &'static str)]) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Validation { field, reason } => {
            let field = map
                .iter()
                .find(|(from, _)| *from == field)
                .map(|(_, to)| to.to_string())
                .unwrap_or(field);
            Error::Validation { field, reason }
        }
        other => other,
    }
}

fn run_ergodic(
    config: AntennaConfig,
    b: Bandwidth,
    snr: crate::types::Snr,
    trials: u32,
    seed: u64,
    workers: Option<usize>,
) -> Result<ErgodicEstimate> {
    match workers {
        Some(0) => Err(Error::validation("workers", "must be at least 1")),
        #[cfg(feature = "parallel")]
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::validation("workers", e.to_string()))?
            .install(|| ergodic_capacity(config, b, snr, trials, seed)),
        _ => ergodic_capacity(config, b, snr, trials, seed),
    }
}

fn write_dataset(ctx: &mut Ctx<'_>, spec: &SweepSpec, output: &OutputArgs, format: OutputFormat) -> Result<()> {
    if output.plot && output.out.is_none() {
        return Err(Error::validation("plot", "--plot needs --out so the script can reference the CSV"));
    }
    if output.plot && format != OutputFormat::Csv {
        return Err(Error::validation("plot", "--plot needs csv output"));
    }
    let dataset = run_sweep(spec)?;
    let body = match format {
        OutputFormat::Csv => csv_string(&dataset),
        OutputFormat::Json => json_string(&dataset),
    };
    match &output.out {
        None => ctx.print(&body)?,
        Some(out) => {
            let path = ctx.resolve(out);
            write_file(&path, &body)?;
            if output.plot {
                write_file(&path.with_extension("gp"), &plot_script_string(&dataset, &path))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("mimocap").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn capacity_prints_two() {
        let (code, out, _) = run_args(&[
            "capacity", "--model", "shannon", "--ntx", "1", "--nrx", "1", "--snr-db", "4.771212547196624",
            "--bandwidth", "1",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "2.0\n");
    }

    #[test]
    fn negative_snr_is_accepted() {
        let (code, out, err) = run_args(&["capacity", "--model", "stc", "--ntx", "2", "--nrx", "2", "--snr-db", "-10"]);
        assert_eq!(code, 0, "{err}");
        let v: f64 = out.trim().parse().unwrap();
        assert!((v - 2.0 * 1.1f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn validation_errors_name_the_flag() {
        let (code, _, err) = run_args(&["capacity", "--model", "shannon", "--ntx", "0", "--snr-db", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("ntx"), "{err}");
        let (code, _, err) = run_args(&["capacity", "--model", "warp", "--snr-db", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("model"), "{err}");
        let (code, _, err) = run_args(&["capacity", "--model", "shannon", "--snr-db", "1", "--bandwidth", "0"]);
        assert_eq!(code, 1);
        assert!(err.contains("bandwidth"), "{err}");
        let (code, _, err) = run_args(&["capacity", "--model", "array_gain", "--ntx", "2", "--nrx", "2", "--snr-db", "1"]);
        assert_eq!(code, 1);
        assert!(err.contains("array_gain"), "{err}");
    }

    #[test]
    fn usage_errors() {
        let (code, _, err) = run_args(&["teleport"]);
        assert_eq!(code, 1);
        assert!(err.contains("Usage"), "{err}");
        let (code, _, err) = run_args(&["capacity", "--model", "shannon", "--snr-db", "1", "--bogus"]);
        assert_eq!(code, 1);
        assert!(err.contains("--bogus"), "{err}");
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("figure"));
    }

    #[test]
    fn figure_to_stdout() {
        let (code, out, _) = run_args(&["figure", "figure7"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("snr_db,miso_2x1_array_gain,miso_3x1_array_gain\n0,"));
        let (code, _, err) = run_args(&["figure", "figure12"]);
        assert_eq!(code, 1);
        assert!(err.contains("figure12"));
        let (code, _, err) = run_args(&["figure", "figure7", "--plot"]);
        assert_eq!(code, 1);
        assert!(err.contains("plot"));
    }

    #[test]
    fn inline_sweep() {
        let (code, out, err) = run_args(&[
            "sweep", "--snr-start-db", "0", "--snr-stop-db", "10", "--points", "2", "--series", "1x1:shannon",
        ]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(out, "snr_db,siso_1x1_shannon\n0,1\n10,3.4594316186372978\n");
        let (code, _, err) = run_args(&["sweep", "--points", "1", "--series", "1x1:shannon"]);
        assert_eq!(code, 1);
        assert!(err.contains("points"));
        let (code, _, err) = run_args(&["sweep", "--series", "2x2:array_gain"]);
        assert_eq!(code, 1);
        assert!(err.contains("series #0"), "{err}");
    }

    #[test]
    fn combine_and_ergodic_json() {
        let (code, out, _) = run_args(&["combine", "--scheme", "maximal_ratio", "--amplitudes", "1,2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["snr"], 5.0);
        let (code, _, err) = run_args(&["combine", "--scheme", "selection", "--amplitudes", "1,-2"]);
        assert_eq!(code, 1);
        assert!(err.contains("amplitudes"));

        let (code, out, _) = run_args(&["ergodic", "--ntx", "1", "--nrx", "1", "--snr-db", "0", "--trials", "100"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["trials"], 100);
        let (code, _, err) = run_args(&["ergodic", "--ntx", "1", "--nrx", "1", "--snr-db", "0", "--trials", "0"]);
        assert_eq!(code, 1);
        assert!(err.contains("trials"));
    }

    #[test]
    fn io_error_exit_code() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let target = blocker.join("out.csv");
        let (code, _, err) = run_args(&["figure", "figure7", "--out", target.to_str().unwrap()]);
        assert_eq!(code, 2);
        assert!(err.contains("file"), "{err}");
    }
}
