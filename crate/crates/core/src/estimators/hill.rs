use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

pub const DEFAULT_TAIL_FRACTION: f64 = 0.05;

const MIN_NONZERO: usize = 100;
const MIN_TAIL: usize = 10;
const Z_975: f64 = 1.959_963_984_540_054;

/// Hill estimate of the tail exponent of `|r|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillEstimate {
    pub alpha_h: f64,
    /// Number of upper order statistics used.
    pub k_tail: usize,
    /// Half-width of the asymptotic 95% interval, `1.96 * alpha_h / sqrt(k)`.
    pub ci95: f64,
    /// Threshold order statistic `x_(k+1)`.
    pub threshold: f64,
}

impl HillEstimate {
    pub fn covers(&self, alpha: f64) -> bool {
        (self.alpha_h - alpha).abs() <= self.ci95
    }
}

/// Hill estimator `k / sum_{i<=k} ln(x_(i) / x_(k+1))` over the largest
/// `ceil(tail_fraction * m)` of the `m` non-zero magnitudes. Zeros are not
/// tail observations and are excluded before ranking.
///
/// The tail is degenerate when at most one of the top `k` magnitudes lies
/// strictly above the threshold `x_(k+1)`: the statistic is then driven by
/// ties rather than by a tail.
pub fn hill(returns: &[f64], tail_fraction: f64) -> Result<HillEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.2) {
        return Err(Error::param(
            "tail_fraction",
            format!("must lie in (0, 0.2], got {tail_fraction}"),
        ));
    }
    check_finite(returns)?;
    let mut mags: Vec<f64> = returns
        .iter()
        .map(|r| r.abs())
        .filter(|m| *m > 0.0)
        .collect();
    let m = mags.len();
    if m < MIN_NONZERO {
        return Err(Error::InsufficientData(format!(
            "Hill estimator needs at least {MIN_NONZERO} non-zero magnitudes, got {m}"
        )));
    }
    let k = ((tail_fraction * m as f64) - 1e-9).ceil() as usize;
    if k < MIN_TAIL {
        return Err(Error::InsufficientData(format!(
            "tail of {k} order statistics is below the minimum of {MIN_TAIL}"
        )));
    }

    mags.sort_by(|a, b| b.total_cmp(a));
    let threshold = mags[k];
    let above = mags[..k].iter().filter(|&&x| x > threshold).count();
    if above <= 1 {
        return Err(Error::DegenerateTail(format!(
            "{above} of the top {k} magnitudes exceed the threshold {threshold}"
        )));
    }
    let log_sum: f64 = mags[..k].iter().map(|x| (x / threshold).ln()).sum();
    let alpha_h = k as f64 / log_sum;
    Ok(HillEstimate {
        alpha_h,
        k_tail: k,
        ci95: Z_975 * alpha_h / (k as f64).sqrt(),
        threshold,
    })
}
