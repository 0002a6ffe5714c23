//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

use std::path::Path;
use std::time::{Duration, Instant};

use mimo_capacity::cli;
use mimo_capacity::combining::{combine_snr, BranchSet, CombinerKind};
use mimo_capacity::fading::{draw_branch_amplitudes, ergodic_capacity, trial_rng};
use mimo_capacity::formulas::{array_gain_capacity, product_gain_capacity, siso_capacity, stc_capacity};
use mimo_capacity::io::parse_csv;
use mimo_capacity::sweep::{run_sweep, Series, SweepSpec};
use mimo_capacity::{AntennaConfig, Bandwidth, CapacityModel, Snr};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli_run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("mimocap").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn cfg(t: u32, r: u32) -> AntennaConfig {
    AntennaConfig::new(t, r).unwrap()
}

fn snr(x: f64) -> Snr {
    Snr::new(x).unwrap()
}

fn exact_formulas() -> Outcome {
    const TOL: f64 = 1e-12;
    let b = Bandwidth::UNIT;
    let start = Instant::now();
    let values = [
        ("siso(1,3)", siso_capacity(b, snr(3.0)).bits_per_second, 2.0),
        ("array_gain(1,2,1.5)", array_gain_capacity(b, 2, snr(1.5)).unwrap().bits_per_second, 2.0),
        ("product_gain(1,2x2,3.75)", product_gain_capacity(b, cfg(2, 2), snr(3.75)).bits_per_second, 4.0),
        ("stc(1,2x2,3)", stc_capacity(b, cfg(2, 2), snr(3.0)).bits_per_second, 4.0),
    ];
    let elapsed = start.elapsed();
    let mut worst = 0.0f64;
    for (name, got, want) in values {
        let err = (got - want).abs();
        worst = worst.max(err);
        ensure(err <= TOL, format!("{name} = {got}, expected {want}"))?;
    }
    ensure(elapsed < Duration::from_millis(1), format!("took {elapsed:?}"))?;
    Ok(format!("max abs error {worst:e}, {elapsed:?}"))
}

fn reduction_identities() -> Outcome {
    let mut rng = trial_rng(0x5eed, 0);
    let b = Bandwidth::UNIT;
    for i in 0..1000 {
        let s = snr(rng.gen_range(0.0..=100.0));
        let eq1 = siso_capacity(b, s).bits_per_second.to_bits();
        ensure(array_gain_capacity(b, 1, s).unwrap().bits_per_second.to_bits() == eq1, format!("array gain n=1, sample {i}"))?;
        ensure(product_gain_capacity(b, cfg(1, 1), s).bits_per_second.to_bits() == eq1, format!("product gain 1x1, sample {i}"))?;
        ensure(stc_capacity(b, cfg(1, 1), s).bits_per_second.to_bits() == eq1, format!("space-time 1x1, sample {i}"))?;
    }
    Ok("1000 SNRs, bit-identical".into())
}

fn figure8(dir: &Path) -> Outcome {
    let path = dir.join("f8.csv");
    let start = Instant::now();
    let (code, _, err) = cli_run(&["figure", "figure8", "--out", path.to_str().unwrap()]);
    let elapsed = start.elapsed();
    ensure(code == 0, format!("exit {code}: {err}"))?;
    let table = parse_csv(&std::fs::read_to_string(&path).unwrap()).map_err(|e| e.to_string())?;
    ensure(
        table.names == ["siso_1x1_shannon", "mimo_2x2_product_gain", "mimo_3x3_product_gain", "mimo_4x4_product_gain"],
        format!("columns {:?}", table.names),
    )?;
    ensure(table.snr_db.len() == 81, format!("{} points", table.snr_db.len()))?;
    ensure(table.snr_db[0] == 0.0 && table.snr_db[80] == 20.0, "grid is not 0..20 dB")?;
    for k in 0..81 {
        let c: Vec<f64> = table.columns.iter().map(|col| col[k]).collect();
        ensure(c[3] > c[2] && c[2] > c[1] && c[1] > c[0], format!("order broken at {} dB: {c:?}", table.snr_db[k]))?;
    }
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("4 curves x 81 points, 4x4 > 3x3 > 2x2 > SISO everywhere, {elapsed:?}"))
}

fn figure7(dir: &Path) -> Outcome {
    let path = dir.join("f7.csv");
    let (code, _, err) = cli_run(&["figure", "figure7", "--out", path.to_str().unwrap()]);
    ensure(code == 0, format!("exit {code}: {err}"))?;
    let table = parse_csv(&std::fs::read_to_string(&path).unwrap()).map_err(|e| e.to_string())?;
    ensure(table.names == ["miso_2x1_array_gain", "miso_3x1_array_gain"], format!("columns {:?}", table.names))?;
    for k in 0..table.snr_db.len() {
        ensure(table.columns[1][k] > table.columns[0][k], format!("3x1 <= 2x1 at {} dB", table.snr_db[k]))?;
    }
    let spec = SweepSpec::new(
        0.0,
        20.0,
        81,
        Bandwidth::UNIT,
        vec![
            Series::new(cfg(1, 2), CapacityModel::ArrayGain),
            Series::new(cfg(2, 1), CapacityModel::ArrayGain),
            Series::new(cfg(1, 3), CapacityModel::ArrayGain),
            Series::new(cfg(3, 1), CapacityModel::ArrayGain),
        ],
    )
    .unwrap();
    let d = run_sweep(&spec).map_err(|e| e.to_string())?;
    let bits = |i: usize| d.curves[i].capacities().map(f64::to_bits).collect::<Vec<_>>();
    ensure(bits(0) == bits(1), "1x2 and 2x1 differ")?;
    ensure(bits(2) == bits(3), "1x3 and 3x1 differ")?;
    Ok("3x1 > 2x1 at all 81 points; SIMO twins bit-identical".into())
}

fn figure9_check() -> Outcome {
    let (code, out, err) = cli_run(&["check", "figure9"]);
    ensure(code == 0, format!("exit {code}: {err}{out}"))?;
    let rows = out.lines().filter(|l| l.ends_with(",ok")).count();
    ensure(rows == 81, format!("{rows} ok rows"))?;
    // independent brute force: 9s > 4s > 3s > 2s > s inside log2(1 + .)
    for k in 0..81 {
        let s = 10f64.powf((k as f64 * 0.25) / 10.0);
        let c: Vec<f64> = [9.0, 4.0, 3.0, 2.0, 1.0].iter().map(|g| (1.0 + g * s).log2()).collect();
        ensure(c.windows(2).all(|w| w[0] > w[1]), format!("brute force order broken at k={k}"))?;
    }
    Ok("exit 0, 81/81 grid points ordered 3x3 > 2x2 > 3x1 > 2x1 > SISO".into())
}

/// `E[log2(1 + rho X)]` for `X ~ Exp(1)` by composite Simpson on [0, 60].
fn rayleigh_siso_oracle(rho: f64) -> f64 {
    let (a, b, n) = (0.0f64, 60.0f64, 200_000usize);
    let h = (b - a) / n as f64;
    let f = |x: f64| (1.0 + rho * x).log2() * (-x).exp();
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

fn ergodic_calibration() -> Outcome {
    let oracle = rayleigh_siso_oracle(1.0);
    ensure((oracle - 0.8604).abs() < 1e-4, format!("oracle {oracle} disagrees with 0.8604"))?;
    let start = Instant::now();
    let est = ergodic_capacity(cfg(1, 1), Bandwidth::UNIT, snr(1.0), 100_000, 2024).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let z = (est.mean_capacity - oracle) / est.std_error;
    ensure(z.abs() <= 3.0, format!("mean {} vs {oracle}: {z:.2} standard errors", est.mean_capacity))?;
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    Ok(format!(
        "mean {:.5} +/- {:.5} vs oracle {oracle:.5} ({z:+.2} se), {elapsed:?}",
        est.mean_capacity, est.std_error
    ))
}

fn combiner_dominance() -> Outcome {
    let mut violations = 0usize;
    for branches in [2u32, 4] {
        for k in 0..10_000u64 {
            let amps = draw_branch_amplitudes(branches, &mut trial_rng(7, k)).unwrap();
            let set = BranchSet::new(amps, 1.0).unwrap();
            let sc = combine_snr(CombinerKind::Selection, &set, 1.0).unwrap().linear();
            let mrc = combine_snr(CombinerKind::MaximalRatio, &set, 1.0).unwrap().linear();
            let egc = combine_snr(CombinerKind::EqualGain, &set, 1.0).unwrap().linear();
            if !(mrc >= sc && mrc >= egc) {
                violations += 1;
            }
        }
    }
    ensure(violations == 0, format!("{violations} violations"))?;
    Ok("2 x 10^4 draws (2 and 4 branches), 0 violations".into())
}

fn determinism(dir: &Path) -> Outcome {
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    for p in [&a, &b] {
        let (code, _, err) = cli_run(&["figure", "figure9", "--out", p.to_str().unwrap()]);
        ensure(code == 0, format!("exit {code}: {err}"))?;
    }
    let (ba, bb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    ensure(ba == bb, "figure9 CSVs differ")?;

    let base = ["ergodic", "--ntx", "3", "--nrx", "2", "--snr-db", "7", "--trials", "20000", "--seed", "99"];
    let mut outputs = Vec::new();
    for workers in ["1", "2", "4", "7"] {
        let mut args = base.to_vec();
        args.extend(["--workers", workers]);
        let (code, out, err) = cli_run(&args);
        ensure(code == 0, format!("exit {code}: {err}"))?;
        outputs.push(out);
    }
    ensure(outputs.windows(2).all(|w| w[0] == w[1]), "ergodic output depends on worker count")?;
    Ok(format!("figure9 CSV byte-identical ({} bytes); ergodic identical for 1/2/4/7 workers", ba.len()))
}

fn gap_report() -> Outcome {
    let args = ["gap", "--model", "product_gain", "--trials", "20000", "--seed", "3"];
    let (c1, first, e1) = cli_run(&args);
    let (c2, second, _) = cli_run(&args);
    ensure(c1 == 0 && c2 == 0, format!("exit {c1}/{c2}: {e1}"))?;
    ensure(first == second, "report not deterministic")?;
    ensure(first.contains("no agreement is asserted"), "header does not state the informational nature")?;
    let rows: Vec<&str> = first.lines().filter(|l| l.starts_with("2x2,") || l.starts_with("4x4,")).collect();
    ensure(rows.len() == 6, format!("{} rows", rows.len()))?;
    for cfg in ["2x2", "4x4"] {
        for snr in ["0", "10", "20"] {
            ensure(rows.iter().any(|r| r.starts_with(&format!("{cfg},{snr},"))), format!("missing {cfg} @ {snr} dB"))?;
        }
    }
    Ok("6-row signed-gap table, identical across runs".into())
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion<'_>> = vec![
        ("exact formula suite", Box::new(exact_formulas)),
        ("reduction identities", Box::new(reduction_identities)),
        ("figure 8 reproduction", Box::new(|| figure8(dir.path()))),
        ("figure 7 reproduction", Box::new(|| figure7(dir.path()))),
        ("figure 9 ordering check", Box::new(figure9_check)),
        ("ergodic oracle calibration", Box::new(ergodic_calibration)),
        ("combiner dominance", Box::new(combiner_dominance)),
        ("determinism", Box::new(|| determinism(dir.path()))),
        ("oracle gap report", Box::new(gap_report)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("[PASS] AC{}: {name} - {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] AC{}: {name} - {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
