//! Monte-Carlo Rayleigh-fading referee.
//!
//! Channels are `n_rx x n_tx` matrices of i.i.d. CN(0, 1) gains. The
//! instantaneous capacity of one draw is
//!
//! ```text
//! C = B log2 det(I + (snr / n_tx) H H^H)
//! ```
//!
//! so total transmit power stays fixed as antennas are added. The ergodic
//! capacity is the mean of `C` over independent draws.
//!
//! Reproducibility: trial `k` of a run with seed `s` draws from
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `k`. Each channel entry
//! consumes exactly two uniforms (Box-Muller), so a trial's draws never
//! depend on scheduling. Per-trial values are reduced by pairwise summation
//! in trial order; serial and parallel runs agree bit-for-bit.

use std::f64::consts::{LN_2, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{AntennaConfig, Bandwidth, Snr};

/// Power convention used by the log-det referee, reported in dataset metadata.
pub const POWER_NORMALIZATION: &str =
    "log-det referee splits snr equally across transmit antennas (snr / n_tx per antenna)";

/// Name of the generator and stream-splitting rule, reported in dataset metadata.
pub const RNG_SCHEME: &str = "ChaCha8Rng::seed_from_u64(seed), stream = trial index";

/// One `n_rx x n_tx` complex channel draw, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    n_rx: usize,
    n_tx: usize,
    gains: Vec<Complex64>,
}

impl ChannelRealization {
    /// Builds a channel from row-major gains (`n_rx` rows of `n_tx`).
    pub fn from_row_major(config: AntennaConfig, gains: Vec<Complex64>) -> Result<Self> {
        let (n_rx, n_tx) = (config.n_rx() as usize, config.n_tx() as usize);
        if gains.len() != n_rx * n_tx {
            return Err(Error::validation(
                "channel",
                format!("expected {} gains for {config}, got {}", n_rx * n_tx, gains.len()),
            ));
        }
        if let Some(g) = gains.iter().find(|g| !(g.re.is_finite() && g.im.is_finite())) {
            return Err(Error::validation("channel", format!("non-finite gain {g}")));
        }
        Ok(ChannelRealization { n_rx, n_tx, gains })
    }

    pub fn zeros(config: AntennaConfig) -> Self {
        let (n_rx, n_tx) = (config.n_rx() as usize, config.n_tx() as usize);
        ChannelRealization {
            n_rx,
            n_tx,
            gains: vec![Complex64::new(0.0, 0.0); n_rx * n_tx],
        }
    }

    pub fn identity(n: u32) -> Result<Self> {
        let config = AntennaConfig::new(n, n)?;
        let mut h = Self::zeros(config);
        for i in 0..n as usize {
            h.gains[i * h.n_tx + i] = Complex64::new(1.0, 0.0);
        }
        Ok(h)
    }

    pub fn config(&self) -> AntennaConfig {
        AntennaConfig::new(self.n_tx as u32, self.n_rx as u32).expect("dimensions validated on construction")
    }

    pub fn n_rx(&self) -> usize {
        self.n_rx
    }

    pub fn n_tx(&self) -> usize {
        self.n_tx
    }

    #[inline]
    pub fn get(&self, rx: usize, tx: usize) -> Complex64 {
        self.gains[rx * self.n_tx + tx]
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    /// The top-left `sub.n_rx() x sub.n_tx()` block.
    pub fn leading_submatrix(&self, sub: AntennaConfig) -> Result<Self> {
        let (rows, cols) = (sub.n_rx() as usize, sub.n_tx() as usize);
        if rows > self.n_rx || cols > self.n_tx {
            return Err(Error::validation(
                "config",
                format!("{sub} does not fit inside {}", self.config()),
            ));
        }
        let gains = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        Ok(ChannelRealization {
            n_rx: rows,
            n_tx: cols,
            gains,
        })
    }

    /// `|h_{r,0}|` for every receive antenna: the branch amplitudes seen by
    /// a receive combiner fed from the first transmit antenna.
    pub fn branch_amplitudes(&self) -> Vec<f64> {
        (0..self.n_rx).map(|r| self.get(r, 0).norm()).collect()
    }
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One CN(0, 1) sample from exactly two uniforms.
#[inline]
fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // 1 - U lies in (0, 1], keeping ln finite
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    // |h|^2 = -ln u1 ~ Exp(1), so re and im each carry variance 1/2
    let r = (-u1.ln()).sqrt();
    let (s, c) = (TAU * u2).sin_cos();
    Complex64::new(r * c, r * s)
}

/// Draws an i.i.d. CN(0, 1) channel for `config`, filling row by row.
pub fn draw_channel<R: Rng + ?Sized>(config: AntennaConfig, rng: &mut R) -> ChannelRealization {
    let (n_rx, n_tx) = (config.n_rx() as usize, config.n_tx() as usize);
    let gains = (0..n_rx * n_tx).map(|_| complex_gaussian(rng)).collect();
    ChannelRealization { n_rx, n_tx, gains }
}

/// Rayleigh branch amplitudes `|h_i|` for `branches` receive antennas.
pub fn draw_branch_amplitudes<R: Rng + ?Sized>(branches: u32, rng: &mut R) -> Result<Vec<f64>> {
    let config = AntennaConfig::new(1, branches).map_err(|e| match e {
        Error::Validation { reason, .. } => Error::validation("branches", reason),
        other => other,
    })?;
    Ok(draw_channel(config, rng).branch_amplitudes())
}

/// `B log2 det(I + (snr / n_tx) H H^H)`, via a Cholesky factorisation of the
/// smaller of the two Gram forms.
pub fn logdet_capacity(h: &ChannelRealization, b: Bandwidth, snr: Snr) -> Result<f64> {
    let scale = snr.linear() / h.n_tx as f64;
    // det(I + c H H^H) = det(I + c H^H H); factor whichever is smaller.
    let by_rows = h.n_rx <= h.n_tx;
    let n = if by_rows { h.n_rx } else { h.n_tx };
    let entry = |i: usize, j: usize| -> Complex64 {
        if by_rows {
            (0..h.n_tx).map(|k| h.get(i, k) * h.get(j, k).conj()).sum()
        } else {
            (0..h.n_rx).map(|k| h.get(k, i).conj() * h.get(k, j)).sum()
        }
    };
    let mut a = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut v = entry(i, j) * scale;
            if i == j {
                v.re += 1.0;
                v.im = 0.0;
            }
            a[i * n + j] = v;
        }
    }
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::validation("channel", "gram matrix is not finite"));
    }
    let ln_det = hermitian_cholesky_ln_det(&mut a, n)?;
    Ok((b.hertz() * ln_det / LN_2).max(0.0))
}

/// In-place lower Cholesky of a Hermitian positive-definite matrix (only the
/// lower triangle is read). Returns `ln det A = 2 sum ln L_kk`.
fn hermitian_cholesky_ln_det(a: &mut [Complex64], n: usize) -> Result<f64> {
    let mut ln_det = 0.0;
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= a[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return Err(Error::validation(
                "channel",
                format!("matrix not positive definite at pivot {j}"),
            ));
        }
        let l_jj = d.sqrt();
        a[j * n + j] = Complex64::new(l_jj, 0.0);
        ln_det += 2.0 * l_jj.ln();
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = s / l_jj;
        }
    }
    Ok(ln_det)
}

/// Mean and standard error of the log-det capacity over seeded draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicEstimate {
    pub mean_capacity: f64,
    pub std_error: f64,
    pub trials: u32,
    pub seed: u64,
}

/// Instantaneous capacity of every trial, in trial order.
pub fn trial_capacities(
    config: AntennaConfig,
    b: Bandwidth,
    snr: Snr,
    trials: u32,
    seed: u64,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::validation("trials", "must be at least 1"));
    }
    let one = |k: u32| -> Result<f64> {
        let mut rng = trial_rng(seed, k as u64);
        logdet_capacity(&draw_channel(config, &mut rng), b, snr)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..trials).map(one).collect()
    }
}

pub fn ergodic_capacity(
    config: AntennaConfig,
    b: Bandwidth,
    snr: Snr,
    trials: u32,
    seed: u64,
) -> Result<ErgodicEstimate> {
    let samples = trial_capacities(config, b, snr, trials, seed)?;
    let (mean_capacity, std_error) = mean_and_std_error(&samples);
    Ok(ErgodicEstimate {
        mean_capacity,
        std_error,
        trials,
        seed,
    })
}

/// Sample mean and standard error of the mean (zero for a single sample).
pub fn mean_and_std_error(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = pairwise_sum(samples) / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Pairwise (cascade) summation with a fixed split rule.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}
