//! ARCH(1) paths and the tick coarse-graining experiment.
//!
//! `r_t = sigma_t z_t`, `sigma_t^2 = alpha0 + alpha1 r_{t-1}^2`, with `z_t`
//! IID standard normal. The squared returns are exponentially
//! autocorrelated with time scale `1 / |ln alpha1|` whenever the fourth
//! moment exists (`3 alpha1^2 < 1`).

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{acf, fit_line, zero_frequency};
use crate::rng;
use crate::series::{ReturnSeries, TickGrid};

pub const DEFAULT_BURN_IN: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ArchParams {
    pub alpha0: f64,
    pub alpha1: f64,
    pub n: usize,
    pub seed: u64,
    pub init_return: f64,
    pub init_price: f64,
    /// Samples generated and discarded before the reported path.
    pub burn_in: usize,
}

impl Default for ArchParams {
    fn default() -> Self {
        Self {
            alpha0: 0.1,
            alpha1: 0.9,
            n: 1 << 16,
            seed: 0,
            init_return: 0.0,
            init_price: 0.0,
            burn_in: DEFAULT_BURN_IN,
        }
    }
}

impl ArchParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0.is_finite() && self.alpha0 > 0.0) {
            return Err(Error::param("alpha0", format!("must be > 0, got {}", self.alpha0)));
        }
        if !(self.alpha1 >= 0.0 && self.alpha1 < 1.0) {
            return Err(Error::param(
                "alpha1",
                format!("must lie in [0, 1) for a stationary variance, got {}", self.alpha1),
            ));
        }
        if self.n < 2 {
            return Err(Error::param("n", format!("path length must be >= 2, got {}", self.n)));
        }
        if !self.init_return.is_finite() || !self.init_price.is_finite() {
            return Err(Error::param("init_return", "initial values must be finite"));
        }
        Ok(())
    }

    /// `alpha0 / (1 - alpha1)`.
    pub fn stationary_variance(&self) -> f64 {
        self.alpha0 / (1.0 - self.alpha1)
    }

    pub fn stationary_std(&self) -> f64 {
        self.stationary_variance().sqrt()
    }

    /// Decay time of the squared-return ACF, `1 / |ln alpha1|`.
    pub fn clustering_timescale(&self) -> f64 {
        1.0 / self.alpha1.ln().abs()
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }
}

pub fn simulate_arch(params: &ArchParams) -> Result<ReturnSeries> {
    params.validate()?;
    let mut rng = rng::stream(params.seed);
    let mut prev = params.init_return;
    let mut values = Vec::with_capacity(params.n);
    for t in 0..params.burn_in + params.n {
        let sigma = (params.alpha0 + params.alpha1 * prev * prev).sqrt();
        let z: f64 = rng.sample(StandardNormal);
        prev = sigma * z;
        if t >= params.burn_in {
            values.push(prev);
        }
    }
    ReturnSeries::new(values)
}

/// Tick sizes to sweep (absolute price units; `0` = no discretization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseGrainSweep {
    pub deltas: Vec<f64>,
    pub max_lag: usize,
    pub n_seeds: usize,
}

/// Tick sizes of the default sweep, in units of the stationary std.
pub const DEFAULT_DELTA_MULTIPLES: [f64; 5] = [0.0, 0.25, 0.5, 1.0, 2.0];

impl CoarseGrainSweep {
    /// Tick sizes given as multiples of the stationary standard deviation.
    pub fn from_multiples(params: &ArchParams, multiples: &[f64], max_lag: usize, n_seeds: usize) -> Self {
        let sd = params.stationary_std();
        Self {
            deltas: multiples.iter().map(|m| m * sd).collect(),
            max_lag,
            n_seeds,
        }
    }

    pub fn default_for(params: &ArchParams) -> Self {
        Self::from_multiples(params, &DEFAULT_DELTA_MULTIPLES, 10, 20)
    }

    pub fn validate(&self, params: &ArchParams) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::param("deltas", "sweep needs at least one tick size"));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::param("deltas", format!("tick size {d} is negative or non-finite")));
        }
        if self.max_lag == 0 || self.max_lag >= params.n {
            return Err(Error::param(
                "max_lag",
                format!("must lie in [1, n), got {} for n = {}", self.max_lag, params.n),
            ));
        }
        if self.n_seeds == 0 {
            return Err(Error::param("n_seeds", "need at least one replicate"));
        }
        Ok(())
    }
}

/// Mean |observed return| ACF at one (tick size, lag) point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfRow {
    pub delta: f64,
    pub lag: usize,
    /// `None` when every replicate was degenerate (constant observed price).
    pub mean_acf: Option<f64>,
    pub stderr: Option<f64>,
    /// Replicates contributing to the mean.
    pub n_valid: usize,
}

impl AcfRow {
    pub fn degenerate(&self) -> bool {
        self.mean_acf.is_none()
    }
}

/// Zero-return frequency summary for one tick size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroRow {
    pub delta: f64,
    pub mean_p0: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseGrainTable {
    pub acf_rows: Vec<AcfRow>,
    pub zero_rows: Vec<ZeroRow>,
    /// Replicate seeds, in order.
    pub seeds: Vec<u64>,
}

impl CoarseGrainTable {
    pub fn row(&self, delta: f64, lag: usize) -> Option<&AcfRow> {
        self.acf_rows.iter().find(|r| r.delta == delta && r.lag == lag)
    }

    pub fn zero_row(&self, delta: f64) -> Option<&ZeroRow> {
        self.zero_rows.iter().find(|r| r.delta == delta)
    }
}

struct Replicate {
    // per delta: ACF of |observed returns|, or None when degenerate
    acf: Vec<Option<Vec<f64>>>,
    p0: Vec<f64>,
}

/// Observed returns after coarse-graining the integrated path on a tick
/// grid; `delta == 0` returns the latent returns unchanged.
pub fn observed_returns(latent: &ReturnSeries, init_price: f64, delta: f64) -> Result<ReturnSeries> {
    if delta == 0.0 {
        return Ok(latent.clone());
    }
    let grid = TickGrid::new(delta)?;
    latent.integrate(init_price)?.discretize(grid).returns()
}

fn run_replicate(params: &ArchParams, sweep: &CoarseGrainSweep, seed: u64) -> Result<Replicate> {
    let latent = simulate_arch(&params.with_seed(seed))?;
    let mut out = Replicate {
        acf: Vec::with_capacity(sweep.deltas.len()),
        p0: Vec::with_capacity(sweep.deltas.len()),
    };
    for &delta in &sweep.deltas {
        let observed = observed_returns(&latent, params.init_price, delta)?;
        out.p0.push(zero_frequency(observed.values())?.p0);
        match acf(&observed.abs(), sweep.max_lag) {
            Ok(est) => out.acf.push(Some(est.rho)),
            Err(Error::ZeroVariance(_)) => out.acf.push(None),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Simulate `n_seeds` replicate paths, coarse-grain each on every tick
/// size of the sweep and average the |observed return| ACF and the zero
/// return frequency across replicates.
///
/// Replicate `i` uses seed `replicate_seed(params.seed, i)`; replicates run
/// in parallel and are collected in index order, so the table is
/// bit-identical for fixed inputs.
pub fn coarse_grain_experiment(params: &ArchParams, sweep: &CoarseGrainSweep) -> Result<CoarseGrainTable> {
    params.validate()?;
    sweep.validate(params)?;
    if sweep.max_lag * 4 >= params.n {
        return Err(Error::param(
            "max_lag",
            format!("path of length {} too short for lag {}", params.n, sweep.max_lag),
        ));
    }
    let seeds: Vec<u64> = (0..sweep.n_seeds as u64)
        .map(|i| rng::replicate_seed(params.seed, i))
        .collect();
    let replicates = seeds
        .par_iter()
        .map(|&s| run_replicate(params, sweep, s))
        .collect::<Result<Vec<_>>>()?;

    let mut acf_rows = Vec::with_capacity(sweep.deltas.len() * sweep.max_lag);
    let mut zero_rows = Vec::with_capacity(sweep.deltas.len());
    for (d, &delta) in sweep.deltas.iter().enumerate() {
        let valid: Vec<&Vec<f64>> = replicates.iter().filter_map(|r| r.acf[d].as_ref()).collect();
        for lag in 1..=sweep.max_lag {
            let row = if valid.is_empty() {
                AcfRow {
                    delta,
                    lag,
                    mean_acf: None,
                    stderr: None,
                    n_valid: 0,
                }
            } else {
                let xs: Vec<f64> = valid.iter().map(|rho| rho[lag - 1]).collect();
                let (m, se) = mean_and_stderr(&xs);
                AcfRow {
                    delta,
                    lag,
                    mean_acf: Some(m),
                    stderr: Some(se),
                    n_valid: valid.len(),
                }
            };
            acf_rows.push(row);
        }
        let p0s: Vec<f64> = replicates.iter().map(|r| r.p0[d]).collect();
        let (mean_p0, stderr) = mean_and_stderr(&p0s);
        zero_rows.push(ZeroRow { delta, mean_p0, stderr });
    }
    Ok(CoarseGrainTable {
        acf_rows,
        zero_rows,
        seeds,
    })
}

/// Seed-averaged squared-return ACF of the undiscretized path next to the
/// analytic ARCH(1) value `alpha1^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub lag: usize,
    pub mean_acf: f64,
    pub stderr: f64,
    pub analytic: f64,
}

/// Squared-return ACF to `max_lag`, averaged over `n_seeds` replicates
/// seeded as in [`coarse_grain_experiment`].
pub fn squared_acf_baseline(params: &ArchParams, n_seeds: usize, max_lag: usize) -> Result<Vec<BaselineRow>> {
    params.validate()?;
    if n_seeds == 0 {
        return Err(Error::param("n_seeds", "need at least one replicate"));
    }
    let per_seed = (0..n_seeds as u64)
        .into_par_iter()
        .map(|i| {
            let r = simulate_arch(&params.with_seed(rng::replicate_seed(params.seed, i)))?;
            Ok(acf(&r.squared(), max_lag)?.rho)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((1..=max_lag)
        .map(|lag| {
            let xs: Vec<f64> = per_seed.iter().map(|rho| rho[lag - 1]).collect();
            let (mean_acf, stderr) = mean_and_stderr(&xs);
            BaselineRow {
                lag,
                mean_acf,
                stderr,
                analytic: params.alpha1.powi(lag as i32),
            }
        })
        .collect())
}

/// Exponential decay time `tau` of an ACF sampled at lags `1, 2, ...`,
/// from the least-squares fit of `ln rho(k) = c - k / tau` over the
/// positive values. `None` if fewer than two lags are positive or the fit
/// does not decay.
pub fn fit_decay_timescale(rho: &[f64]) -> Option<f64> {
    let (lags, logs): (Vec<f64>, Vec<f64>) = rho
        .iter()
        .enumerate()
        .filter(|(_, r)| **r > 0.0)
        .map(|(i, r)| ((i + 1) as f64, r.ln()))
        .unzip();
    let fit = fit_line(&lags, &logs)?;
    (fit.slope < 0.0).then(|| -1.0 / fit.slope)
}
