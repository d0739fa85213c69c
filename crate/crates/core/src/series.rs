//! Price and return series, and the tick grid.
//!
//! Returns are additive price increments throughout; there is no
//! log-return mode.

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};

/// Offset added to `price / delta` before flooring, absorbing binary
/// representation noise at exact grid points (`1.05 / 0.05` must land on
/// index 21, not 20).
pub const GRID_INDEX_GUARD: f64 = 1e-9;

/// Timestamped price levels.
///
/// Timestamps are either wall-clock seconds (non-decreasing) or the event
/// index `0, 1, 2, ...` when built with [`PriceSeries::from_prices`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    timestamps: Vec<f64>,
    prices: Vec<f64>,
}

impl PriceSeries {
    pub fn new(timestamps: Vec<f64>, prices: Vec<f64>) -> Result<Self> {
        if timestamps.len() != prices.len() {
            return Err(Error::param(
                "timestamps",
                format!(
                    "length {} differs from prices length {}",
                    timestamps.len(),
                    prices.len()
                ),
            ));
        }
        check_finite(&prices)?;
        check_finite(&timestamps)?;
        if let Some(i) = timestamps.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::Unsorted(format!(
                "timestamp {} precedes timestamp {}",
                i + 1,
                i
            )));
        }
        Ok(Self { timestamps, prices })
    }

    /// Series on the event-index clock.
    pub fn from_prices(prices: Vec<f64>) -> Result<Self> {
        let timestamps = (0..prices.len()).map(|i| i as f64).collect();
        Self::new(timestamps, prices)
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    /// Additive returns `prices[i+1] - prices[i]`.
    pub fn returns(&self) -> Result<ReturnSeries> {
        if self.prices.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "need at least 2 prices to form a return, got {}",
                self.prices.len()
            )));
        }
        let values = self.prices.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(ReturnSeries {
            values,
            bin_labels: None,
        })
    }

    /// Coarse-grain every price onto `grid`. Timestamps are kept.
    pub fn discretize(&self, grid: TickGrid) -> PriceSeries {
        PriceSeries {
            timestamps: self.timestamps.clone(),
            prices: self.prices.iter().map(|&p| grid.snap(p)).collect(),
        }
    }
}

/// Additive return increments, optionally labelled by interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    values: Vec<f64>,
    bin_labels: Option<Vec<i64>>,
}

impl ReturnSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_finite(&values)?;
        Ok(Self {
            values,
            bin_labels: None,
        })
    }

    pub fn with_labels(values: Vec<f64>, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::param(
                "bin_labels",
                format!(
                    "{} labels for {} returns",
                    labels.len(),
                    values.len()
                ),
            ));
        }
        check_finite(&values)?;
        Ok(Self {
            values,
            bin_labels: Some(labels),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bin_labels(&self) -> Option<&[i64]> {
        self.bin_labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `|r|`, the volatility proxy fed to the ACF and DFA estimators.
    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.abs()).collect()
    }

    pub fn squared(&self) -> Vec<f64> {
        self.values.iter().map(|v| v * v).collect()
    }

    /// Cumulate the returns from `initial`, on the event-index clock.
    pub fn integrate(&self, initial: f64) -> Result<PriceSeries> {
        if !initial.is_finite() {
            return Err(Error::param("initial", "initial price must be finite"));
        }
        let mut prices = Vec::with_capacity(self.values.len() + 1);
        let mut level = initial;
        prices.push(level);
        for r in &self.values {
            level += r;
            prices.push(level);
        }
        check_finite(&prices)?;
        PriceSeries::from_prices(prices)
    }
}

impl AsRef<[f64]> for ReturnSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Tick size `delta > 0` and the floor coarse-graining map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickGrid {
    delta: f64,
}

impl TickGrid {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::param(
                "delta",
                format!("tick size must be finite and positive, got {delta}"),
            ));
        }
        Ok(Self { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Grid index `floor(price / delta + guard)`. Floor rather than
    /// truncation, so negative simulated prices land on the same
    /// translation-consistent grid.
    pub fn index(&self, price: f64) -> f64 {
        (price / self.delta + GRID_INDEX_GUARD).floor()
    }

    pub fn snap(&self, price: f64) -> f64 {
        self.index(price) * self.delta
    }
}

/// `values[i] = prices[i+1] - prices[i]`.
pub fn returns(prices: &PriceSeries) -> Result<ReturnSeries> {
    prices.returns()
}

/// `prices[0] = initial`, `prices[i+1] = prices[i] + values[i]`.
pub fn integrate(returns: &ReturnSeries, initial: f64) -> Result<PriceSeries> {
    returns.integrate(initial)
}

/// Observed price `floor(p / delta) * delta` for every level of `prices`.
pub fn discretize(prices: &PriceSeries, grid: TickGrid) -> PriceSeries {
    prices.discretize(grid)
}
