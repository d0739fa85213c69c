//! Return-distribution and volatility-clustering estimators.
//!
//! Estimators take plain slices so callers choose the transform: pass
//! `series.abs()` for the absolute-return ACF, `series.squared()` for the
//! squared-return ACF, and so on.

mod acf;
mod dfa;
mod distribution;
mod hill;

pub use acf::{acf, AcfEstimate};
pub use dfa::{dfa_hurst, log_spaced_windows, DfaEstimate, DfaSettings};
pub use distribution::{ccdf, log_spaced_thresholds, zero_frequency, CcdfEstimate, ZeroFreqEstimate};
pub use hill::{hill, HillEstimate, DEFAULT_TAIL_FRACTION};

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope, `sqrt(SSR / (n - 2) / Sxx)`.
    pub slope_stderr: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (xi, yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let ssr: f64 = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| {
                let e = yi - intercept - slope * xi;
                e * e
            })
            .sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Some(LineFit {
        slope,
        intercept,
        slope_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        let fit = fit_line(&x, &y).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-12);
    }

    #[test]
    fn degenerate_abscissa() {
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }
}
