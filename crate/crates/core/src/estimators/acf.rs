use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

/// Sample autocorrelation at lags `1..=max_lag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfEstimate {
    pub lags: Vec<usize>,
    pub rho: Vec<f64>,
}

impl AcfEstimate {
    pub fn at(&self, lag: usize) -> Option<f64> {
        lag.checked_sub(1).and_then(|i| self.rho.get(i).copied())
    }
}

/// Biased sample ACF: full-sample mean, and the lag-0 sum of squares as the
/// common denominator for every lag. This keeps `|rho| <= 1`.
pub fn acf(x: &[f64], max_lag: usize) -> Result<AcfEstimate> {
    if max_lag == 0 {
        return Err(Error::param("max_lag", "must be at least 1"));
    }
    if x.len() <= 4 * max_lag {
        return Err(Error::InsufficientData(format!(
            "ACF to lag {max_lag} needs more than {} observations, got {}",
            4 * max_lag,
            x.len()
        )));
    }
    check_finite(x)?;
    if x.iter().all(|v| *v == x[0]) {
        return Err(Error::ZeroVariance("ACF of a constant series".into()));
    }

    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let denom: f64 = centered.iter().map(|v| v * v).sum();
    if denom <= 0.0 {
        return Err(Error::ZeroVariance("ACF of a constant series".into()));
    }
    let rho = (1..=max_lag)
        .map(|k| {
            let num: f64 = centered
                .iter()
                .zip(&centered[k..])
                .map(|(a, b)| a * b)
                .sum();
            num / denom
        })
        .collect();
    Ok(AcfEstimate {
        lags: (1..=max_lag).collect(),
        rho,
    })
}
