use serde::{Deserialize, Serialize};

use super::fit_line;
use crate::error::{check_finite, Error, Result};

/// DFA-1 result.
///
/// For a long-memory series with `rho(k) ~ k^(-gamma)`, the Hurst exponent
/// and the ACF decay exponent are related by `H = 1 - gamma / 2`, so
/// `gamma = 2 (1 - H)`; see [`DfaEstimate::gamma`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfaEstimate {
    pub hurst: f64,
    pub window_sizes: Vec<usize>,
    pub fluctuation: Vec<f64>,
    /// Standard error of the log-log regression slope.
    pub fit_stderr: f64,
}

impl DfaEstimate {
    pub fn gamma(&self) -> f64 {
        2.0 * (1.0 - self.hurst)
    }
}

/// Window scales for [`dfa_hurst`]. `max_window = None` means `n / 8`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DfaSettings {
    pub min_window: usize,
    pub max_window: Option<usize>,
    pub n_windows: usize,
}

impl Default for DfaSettings {
    fn default() -> Self {
        Self {
            min_window: 16,
            max_window: None,
            n_windows: 10,
        }
    }
}

impl DfaSettings {
    pub fn resolve_max(&self, len: usize) -> usize {
        self.max_window.unwrap_or(len / 8)
    }

    pub fn estimate(&self, x: &[f64]) -> Result<DfaEstimate> {
        dfa_hurst(x, self.min_window, self.resolve_max(x.len()), self.n_windows)
    }
}

/// `count` integer scales, log-spaced from `min` to `max`, deduplicated.
pub fn log_spaced_windows(min: usize, max: usize, count: usize) -> Result<Vec<usize>> {
    if min < 4 {
        return Err(Error::param("min_window", format!("must be at least 4, got {min}")));
    }
    if max <= min {
        return Err(Error::param(
            "max_window",
            format!("must exceed min_window {min}, got {max}"),
        ));
    }
    if count < 4 {
        return Err(Error::param("n_windows", format!("need at least 4 scales, got {count}")));
    }
    let ratio = (max as f64 / min as f64).ln() / (count - 1) as f64;
    let mut sizes: Vec<usize> = (0..count)
        .map(|i| ((min as f64) * (ratio * i as f64).exp()).round() as usize)
        .map(|s| s.clamp(min, max))
        .collect();
    sizes.dedup();
    if sizes.len() < 4 {
        return Err(Error::param(
            "n_windows",
            format!("only {} distinct scales between {min} and {max}", sizes.len()),
        ));
    }
    Ok(sizes)
}

/// Detrended fluctuation analysis with order-1 detrending.
///
/// The mean-centred series is cumulated into a profile, the profile is cut
/// into non-overlapping windows of each scale `s` (trailing remainder
/// ignored), a least-squares line is removed from each window and `F(s)` is
/// the root-mean-square residual. The Hurst exponent is the least-squares
/// slope of `ln F(s)` against `ln s` over all scales.
pub fn dfa_hurst(
    x: &[f64],
    min_window: usize,
    max_window: usize,
    n_windows: usize,
) -> Result<DfaEstimate> {
    let window_sizes = log_spaced_windows(min_window, max_window, n_windows)?;
    if x.len() < 4 * max_window {
        return Err(Error::InsufficientData(format!(
            "DFA up to scale {max_window} needs at least {} observations, got {}",
            4 * max_window,
            x.len()
        )));
    }
    check_finite(x)?;
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::ZeroVariance("DFA of a constant series".into()));
    }

    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut level = 0.0;
    let profile: Vec<f64> = x
        .iter()
        .map(|v| {
            level += v - mean;
            level
        })
        .collect();

    let fluctuation = window_sizes
        .iter()
        .map(|&s| fluctuation_at(&profile, s))
        .collect::<Vec<_>>();
    if let Some(pos) = fluctuation.iter().position(|f| !(*f > 0.0)) {
        return Err(Error::ZeroVariance(format!(
            "zero fluctuation at scale {}",
            window_sizes[pos]
        )));
    }

    let log_s: Vec<f64> = window_sizes.iter().map(|&s| (s as f64).ln()).collect();
    let log_f: Vec<f64> = fluctuation.iter().map(|f| f.ln()).collect();
    let fit = fit_line(&log_s, &log_f)
        .ok_or_else(|| Error::Consistency("DFA scales collapsed".into()))?;
    Ok(DfaEstimate {
        hurst: fit.slope,
        window_sizes,
        fluctuation,
        fit_stderr: fit.slope_stderr,
    })
}

fn fluctuation_at(profile: &[f64], s: usize) -> f64 {
    let sf = s as f64;
    let t_mean = (sf - 1.0) / 2.0;
    // sum of (t - t_mean)^2 for t = 0..s
    let t_ss = sf * (sf * sf - 1.0) / 12.0;
    let mut resid = 0.0;
    let windows = profile.len() / s;
    for w in profile.chunks_exact(s) {
        let y_mean = w.iter().sum::<f64>() / sf;
        let (mut sty, mut syy) = (0.0, 0.0);
        for (t, y) in w.iter().enumerate() {
            let dy = y - y_mean;
            sty += (t as f64 - t_mean) * dy;
            syy += dy * dy;
        }
        resid += (syy - sty * sty / t_ss).max(0.0);
    }
    (resid / (windows as f64 * sf)).sqrt()
}
