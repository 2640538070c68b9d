//! Fully functional change-point detection via the scaled CUSUM statistic,
//! plus an integrated-CUSUM stationarity check of the KPSS type.
//!
//! The detector computes `T_n = max_eta || S0_{n,eta} ||^2` where
//!
//! ```text
//! S0_{n,eta}(u) = n^(-1/2) * ( sum_{t<=eta} X_t(u) - (eta/n) sum_{t<=n} X_t(u) )
//! ```
//!
//! and compares it against a Monte-Carlo sample of the limit law
//! `sup_x sum_l lambda_l B_l(x)^2`, with `B_l` i.i.d. standard Brownian
//! bridges and `lambda_l` the eigenvalues of the estimated long-run
//! covariance. The stationarity check integrates the same weighted bridge
//! process over `[0, 1]` instead of taking the supremum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fda::{quadrature_weights, FunctionalTimeSeries};
use crate::longrun::{long_run_covariance_detailed, KernelSpec};
use crate::spectral::eigenvalues_only;

/// Monte-Carlo replications of the null distribution used by default.
pub const DEFAULT_NULL_REPS: usize = 2000;
/// Grid points for simulated Brownian bridges.
pub const DEFAULT_BRIDGE_GRID: usize = 1000;
/// Eigenvalues are truncated once this share of total variance is covered.
const EIGENVALUE_COVERAGE: f64 = 0.9999;
/// Eigenvalues below this floor never enter the null simulation.
const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Outcome of a change-point detection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChangePointResult {
    /// Test statistic (`T_n` for the CUSUM test).
    pub statistic: f64,
    /// Upper-tail Monte-Carlo p-value; absent when the method defines none.
    pub p_value: Option<f64>,
    /// Estimated index of the last pre-break observation, 1-based.
    pub break_index: usize,
    /// Time label of that observation, when the series carries labels.
    pub break_label: Option<f64>,
    /// Per-index diagnostic trajectory (`||S0_{n,eta}||^2` for the CUSUM
    /// test; the ISFE series for the regression-based detector).
    pub trajectory: Vec<f64>,
    /// Decision at the configured level; absent when no test is defined.
    pub reject: Option<bool>,
    /// Set when the trajectory was completely flat and the break position
    /// is only a tie-breaking convention.
    pub degenerate: bool,
}

/// `||S0_{n,eta}||^2` for every `eta = 1..=n`.
pub fn cusum_trajectory(fts: &FunctionalTimeSeries) -> Result<Vec<f64>> {
    let n = fts.n();
    if n < 2 {
        return Err(Error::InsufficientData(
            "CUSUM trajectory needs at least 2 observations".into(),
        ));
    }
    let j = fts.grid_len();
    let w = quadrature_weights(fts.grid());
    let x = fts.values();
    let mut total = vec![0.0f64; j];
    for t in 0..n {
        for a in 0..j {
            total[a] += x[(t, a)];
        }
    }
    let sqrt_n = (n as f64).sqrt();
    let mut partial = vec![0.0f64; j];
    let mut trajectory = Vec::with_capacity(n);
    for eta in 1..=n {
        let frac = eta as f64 / n as f64;
        let mut norm_sq = 0.0;
        for a in 0..j {
            partial[a] += x[(eta - 1, a)];
            let s = (partial[a] - frac * total[a]) / sqrt_n;
            norm_sq += w[a] * s * s;
        }
        trajectory.push(norm_sq);
    }
    Ok(trajectory)
}

/// First index (1-based) attaining the maximum of the trajectory.
pub fn first_argmax(trajectory: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in trajectory.iter().enumerate() {
        if *v > trajectory[best] {
            best = i;
        }
    }
    best + 1
}

/// Drop negligible eigenvalues: keep the descending prefix covering 99.99%
/// of the total, never below the absolute floor.
pub(crate) fn truncate_eigenvalues(eigenvalues: &[f64]) -> Result<Vec<f64>> {
    let total: f64 = eigenvalues.iter().filter(|v| **v > 0.0).sum();
    if total <= 0.0 {
        return Err(Error::Degenerate(
            "all eigenvalues are zero: null distribution undefined".into(),
        ));
    }
    let mut kept = Vec::new();
    let mut cum = 0.0;
    for &l in eigenvalues {
        if l <= EIGENVALUE_FLOOR {
            break;
        }
        kept.push(l);
        cum += l;
        if cum >= EIGENVALUE_COVERAGE * total {
            break;
        }
    }
    if kept.is_empty() {
        return Err(Error::Degenerate(
            "all eigenvalues below floor: null distribution undefined".into(),
        ));
    }
    Ok(kept)
}

#[derive(Clone, Copy)]
enum BridgeFunctional {
    Sup,
    Integral,
}

/// Empirical sample of `sup_x sum_l lambda_l B_l(x)^2` (the CUSUM null).
///
/// Each replicate derives its RNG stream from `(seed, replicate)` so the
/// sample is identical for every thread count.
pub fn null_distribution(eigenvalues: &[f64], reps: usize, seed: u64) -> Result<Vec<f64>> {
    null_sample(eigenvalues, reps, seed, DEFAULT_BRIDGE_GRID, BridgeFunctional::Sup)
}

/// As [`null_distribution`] with an explicit bridge grid size.
pub fn null_distribution_with_grid(
    eigenvalues: &[f64],
    reps: usize,
    seed: u64,
    grid_points: usize,
) -> Result<Vec<f64>> {
    null_sample(eigenvalues, reps, seed, grid_points, BridgeFunctional::Sup)
}

fn null_sample(
    eigenvalues: &[f64],
    reps: usize,
    seed: u64,
    m: usize,
    functional: BridgeFunctional,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(Error::InvalidArgument("null simulation needs reps >= 1".into()));
    }
    if m < 2 {
        return Err(Error::InvalidArgument("bridge grid needs at least 2 points".into()));
    }
    if eigenvalues.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("negative eigenvalue in null simulation".into()));
    }
    let kept = truncate_eigenvalues(eigenvalues)?;
    let sample: Vec<f64> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(rep as u64 + 1);
            let mut acc = vec![0.0f64; m];
            let mut motion = vec![0.0f64; m];
            for &lambda in &kept {
                let mut w = 0.0f64;
                for item in motion.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    w += z;
                    *item = w;
                }
                let endpoint = w;
                let inv_m = 1.0 / m as f64;
                for (i, item) in motion.iter().enumerate() {
                    let x = (i + 1) as f64 * inv_m;
                    let b = (item - x * endpoint) * inv_m.sqrt();
                    acc[i] += lambda * b * b;
                }
            }
            match functional {
                BridgeFunctional::Sup => acc.iter().copied().fold(0.0, f64::max),
                BridgeFunctional::Integral => acc.iter().sum::<f64>() / m as f64,
            }
        })
        .collect();
    Ok(sample)
}

/// Fully functional CUSUM change-point test.
///
/// Estimates the long-run covariance with `kernel`, simulates the weighted
/// sup-of-squared-bridges null with `reps` replicates, and reports the
/// first argmax of the CUSUM norm as the last pre-break index.
pub fn detect_ff(
    fts: &FunctionalTimeSeries,
    level: f64,
    kernel: &KernelSpec,
    reps: usize,
    seed: u64,
) -> Result<ChangePointResult> {
    if fts.n() < 4 {
        return Err(Error::InsufficientData(
            "fully functional detection needs at least 4 observations".into(),
        ));
    }
    if !(0.0..1.0).contains(&level) || level <= 0.0 {
        return Err(Error::InvalidArgument(format!("level must be in (0, 1), got {level}")));
    }
    let trajectory = cusum_trajectory(fts)?;
    let break_index = first_argmax(&trajectory);
    let statistic = trajectory[break_index - 1];
    let degenerate = trajectory.iter().all(|v| *v == trajectory[0]);

    let (lrc, _h) = long_run_covariance_detailed(fts, kernel)?;
    let eigenvalues = eigenvalues_only(&lrc);
    let null = null_distribution(&eigenvalues, reps, seed)?;
    let exceed = null.iter().filter(|v| **v >= statistic).count();
    let p_value = exceed as f64 / reps as f64;

    Ok(ChangePointResult {
        statistic,
        p_value: Some(p_value),
        break_index,
        break_label: fts.labels().map(|_| fts.label_of(break_index - 1)),
        trajectory,
        reject: Some(p_value < level),
        degenerate,
    })
}

/// Functional KPSS-type stationarity test: integrated CUSUM statistic
/// against the integrated weighted-bridge null. Returns `(statistic, p)`.
pub fn kpss_test(
    fts: &FunctionalTimeSeries,
    kernel: &KernelSpec,
    reps: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if fts.n() < 4 {
        return Err(Error::InsufficientData(
            "stationarity test needs at least 4 observations".into(),
        ));
    }
    let trajectory = cusum_trajectory(fts)?;
    let n = trajectory.len() as f64;
    let statistic = trajectory.iter().sum::<f64>() / n;
    if statistic == 0.0 {
        // constant series: nothing to reject
        return Ok((0.0, 1.0));
    }
    let (lrc, _h) = long_run_covariance_detailed(fts, kernel)?;
    let eigenvalues = eigenvalues_only(&lrc);
    let null = null_sample(&eigenvalues, reps, seed, DEFAULT_BRIDGE_GRID, BridgeFunctional::Integral)?;
    let exceed = null.iter().filter(|v| **v >= statistic).count();
    Ok((statistic, exceed as f64 / reps as f64))
}
