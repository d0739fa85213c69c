use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

/// Empirical `P(|r| >= x)` at a set of thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfEstimate {
    pub thresholds: Vec<f64>,
    pub probabilities: Vec<f64>,
}

/// Fraction of exactly-zero returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroFreqEstimate {
    pub p0: f64,
    pub n: usize,
}

pub fn ccdf(returns: &[f64], thresholds: &[f64]) -> Result<CcdfEstimate> {
    if returns.is_empty() {
        return Err(Error::InsufficientData("ccdf of an empty series".into()));
    }
    check_finite(returns)?;
    if let Some(t) = thresholds.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
        return Err(Error::param("thresholds", format!("threshold {t} is not positive")));
    }
    if thresholds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("thresholds", "thresholds must be sorted ascending"));
    }

    let mut mags: Vec<f64> = returns.iter().map(|r| r.abs()).collect();
    mags.sort_by(f64::total_cmp);
    let n = mags.len() as f64;
    let probabilities = thresholds
        .iter()
        .map(|&x| {
            let below = mags.partition_point(|&m| m < x);
            (mags.len() - below) as f64 / n
        })
        .collect();
    Ok(CcdfEstimate {
        thresholds: thresholds.to_vec(),
        probabilities,
    })
}

/// `count` log-spaced thresholds spanning the non-zero magnitudes of
/// `returns`, for plotting the ccdf on log-log axes.
pub fn log_spaced_thresholds(returns: &[f64], count: usize) -> Result<Vec<f64>> {
    let (lo, hi) = returns
        .iter()
        .map(|r| r.abs())
        .filter(|m| *m > 0.0)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
    if !lo.is_finite() {
        return Err(Error::InsufficientData("no non-zero returns".into()));
    }
    if count < 2 || hi <= lo {
        return Ok(vec![lo]);
    }
    let step = (hi / lo).ln() / (count - 1) as f64;
    Ok((0..count).map(|i| lo * (step * i as f64).exp()).collect())
}

pub fn zero_frequency(returns: &[f64]) -> Result<ZeroFreqEstimate> {
    if returns.is_empty() {
        return Err(Error::InsufficientData("zero frequency of an empty series".into()));
    }
    let zeros = returns.iter().filter(|r| **r == 0.0).count();
    Ok(ZeroFreqEstimate {
        p0: zeros as f64 / returns.len() as f64,
        n: returns.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn direct_count() {
        let est = ccdf(&[-1.0, 0.0, 2.0], &[1.0]).unwrap();
        assert!((est.probabilities[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn boundaries() {
        let r = [0.5, -1.5, 2.0, -0.25];
        let est = ccdf(&r, &[1e-9, 2.5]).unwrap();
        assert_eq!(est.probabilities, vec![1.0, 0.0]);
    }

    #[test]
    fn empty_and_bad_thresholds() {
        assert!(matches!(ccdf(&[], &[1.0]), Err(Error::InsufficientData(_))));
        assert!(ccdf(&[1.0], &[0.0]).is_err());
        assert!(ccdf(&[1.0], &[2.0, 1.0]).is_err());
        assert!(matches!(zero_frequency(&[]), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn zero_fraction() {
        let est = zero_frequency(&[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(est.p0, 0.75);
        assert_eq!(est.n, 4);
    }

    #[test]
    fn thresholds_span_nonzero_range() {
        let t = log_spaced_thresholds(&[0.0, 0.1, -10.0, 1.0], 3).unwrap();
        assert!((t[0] - 0.1).abs() < 1e-15);
        assert!((t[1] - 1.0).abs() < 1e-12);
        assert!((t[2] - 10.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn ccdf_is_monotone_and_bounded(
            r in prop::collection::vec(-100.0f64..100.0, 1..200),
            mut t in prop::collection::vec(1e-6f64..150.0, 1..30),
        ) {
            t.sort_by(f64::total_cmp);
            let est = ccdf(&r, &t).unwrap();
            for p in &est.probabilities {
                prop_assert!((0.0..=1.0).contains(p));
            }
            for w in est.probabilities.windows(2) {
                prop_assert!(w[1] <= w[0]);
            }
        }
    }
}
