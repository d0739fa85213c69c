//! Synthetic trade streams.
//!
//! Two knobs produce the two subordination regimes:
//!
//! - the trade-rate process, either a deterministic constant rate or a
//!   doubly-stochastic Poisson process whose log-intensity follows an AR(1)
//!   over fixed wall-clock epochs and persists across sessions;
//! - the per-trade return process, either IID Gaussian or ARCH-modulated,
//!   where the volatility of each block of `epoch_trades` consecutive
//!   trades follows an ARCH(1) recursion driven by the normalised return of
//!   the previous block.

use rand::Rng;
use rand_distr::{Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::clocks::TradeRecord;
use crate::error::{Error, Result};
use crate::rng;
use crate::series::TickGrid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateProcess {
    /// Evenly spaced trades at `base_rate` per second.
    Constant,
    /// Poisson arrivals with intensity `base_rate * exp(x - log_sd^2 / 2)`,
    /// `x` a stationary AR(1) with sd `log_sd`, redrawn every
    /// `epoch_seconds`.
    DoublyStochastic {
        epoch_seconds: f64,
        persistence: f64,
        log_sd: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReturnProcess {
    Iid {
        sd: f64,
    },
    /// Block volatility `sigma_j^2 = alpha0 + alpha1 R_{j-1}^2`, with
    /// `R_j` the block's summed normalised shocks divided by
    /// `sqrt(epoch_trades)`; each trade moves by `scale * sigma_j * z`.
    ArchModulated {
        alpha0: f64,
        alpha1: f64,
        epoch_trades: usize,
        scale: f64,
    },
}

impl ReturnProcess {
    pub fn default_arch() -> Self {
        ReturnProcess::ArchModulated {
            alpha0: 0.1,
            alpha1: 0.9,
            epoch_trades: 270,
            scale: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TradeStreamParams {
    pub n_sessions: usize,
    pub session_seconds: f64,
    /// Mean trades per second.
    pub base_rate: f64,
    pub rate: RateProcess,
    pub returns: ReturnProcess,
    pub init_price: f64,
    /// Coarse-grain the latent prices on this tick grid.
    pub tick: Option<f64>,
    pub seed: u64,
}

impl Default for TradeStreamParams {
    fn default() -> Self {
        Self {
            n_sessions: 400,
            session_seconds: 23_400.0,
            base_rate: 0.1,
            rate: RateProcess::Constant,
            returns: ReturnProcess::Iid { sd: 0.01 },
            init_price: 100.0,
            tick: None,
            seed: 0,
        }
    }
}

impl TradeStreamParams {
    /// Constant rate, ARCH-modulated returns: volatility clustering that
    /// lives in the order of transaction returns.
    pub fn clustered_returns(seed: u64) -> Self {
        Self {
            returns: ReturnProcess::default_arch(),
            seed,
            ..Self::default()
        }
    }

    /// Doubly-stochastic rate, IID returns: clustering produced by
    /// fluctuations of the trade count alone.
    pub fn clustered_activity(seed: u64) -> Self {
        Self {
            rate: RateProcess::DoublyStochastic {
                epoch_seconds: 900.0,
                persistence: 0.9,
                log_sd: 1.0,
            },
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sessions == 0 {
            return Err(Error::param("n_sessions", "need at least one session"));
        }
        if !(self.session_seconds.is_finite() && self.session_seconds > 0.0) {
            return Err(Error::param("session_seconds", "must be > 0"));
        }
        if !(self.base_rate.is_finite() && self.base_rate > 0.0) {
            return Err(Error::param("base_rate", "must be > 0"));
        }
        if !self.init_price.is_finite() {
            return Err(Error::param("init_price", "must be finite"));
        }
        if let Some(t) = self.tick {
            TickGrid::new(t)?;
        }
        if let RateProcess::DoublyStochastic {
            epoch_seconds,
            persistence,
            log_sd,
        } = self.rate
        {
            if !(epoch_seconds.is_finite() && epoch_seconds > 0.0) {
                return Err(Error::param("epoch_seconds", "must be > 0"));
            }
            if !(persistence > -1.0 && persistence < 1.0) {
                return Err(Error::param("persistence", "must lie in (-1, 1)"));
            }
            if !(log_sd.is_finite() && log_sd >= 0.0) {
                return Err(Error::param("log_sd", "must be >= 0"));
            }
        }
        match self.returns {
            ReturnProcess::Iid { sd } => {
                if !(sd.is_finite() && sd > 0.0) {
                    return Err(Error::param("sd", "must be > 0"));
                }
            }
            ReturnProcess::ArchModulated {
                alpha0,
                alpha1,
                epoch_trades,
                scale,
            } => {
                if !(alpha0.is_finite() && alpha0 > 0.0) {
                    return Err(Error::param("alpha0", "must be > 0"));
                }
                if !(0.0..1.0).contains(&alpha1) {
                    return Err(Error::param("alpha1", "must lie in [0, 1)"));
                }
                if epoch_trades == 0 {
                    return Err(Error::param("epoch_trades", "must be >= 1"));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::param("scale", "must be > 0"));
                }
            }
        }
        Ok(())
    }
}

fn arrival_times(params: &TradeStreamParams, rng: &mut rng::StreamRng, log_rate: &mut f64) -> Result<Vec<f64>> {
    let len = params.session_seconds;
    match params.rate {
        RateProcess::Constant => {
            let gap = 1.0 / params.base_rate;
            let count = (len * params.base_rate - 1e-9).ceil().max(0.0) as usize;
            Ok((0..count).map(|i| i as f64 * gap).filter(|t| *t < len).collect())
        }
        RateProcess::DoublyStochastic {
            epoch_seconds,
            persistence,
            log_sd,
        } => {
            let innovation = log_sd * (1.0 - persistence * persistence).sqrt();
            let mut times = Vec::new();
            let mut start = 0.0;
            while start < len {
                let end = (start + epoch_seconds).min(len);
                let z: f64 = rng.sample(StandardNormal);
                *log_rate = persistence * *log_rate + innovation * z;
                let lambda = params.base_rate * (*log_rate - 0.5 * log_sd * log_sd).exp();
                let mean = lambda * (end - start);
                let k = if mean > 0.0 {
                    let dist = Poisson::new(mean)
                        .map_err(|e| Error::param("base_rate", e.to_string()))?;
                    rng.sample(dist) as usize
                } else {
                    0
                };
                let mut epoch: Vec<f64> = (0..k).map(|_| rng.gen_range(start..end)).collect();
                epoch.sort_by(f64::total_cmp);
                times.extend(epoch);
                start = end;
            }
            Ok(times)
        }
    }
}

struct ReturnState {
    block_var: f64,
    block_sum: f64,
    in_block: usize,
}

fn next_return(process: &ReturnProcess, state: &mut ReturnState, rng: &mut rng::StreamRng) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    match *process {
        ReturnProcess::Iid { sd } => sd * z,
        ReturnProcess::ArchModulated {
            alpha0,
            alpha1,
            epoch_trades,
            scale,
        } => {
            let sigma = state.block_var.sqrt();
            let r = scale * sigma * z;
            state.block_sum += sigma * z;
            state.in_block += 1;
            if state.in_block == epoch_trades {
                let block_return = state.block_sum / (epoch_trades as f64).sqrt();
                state.block_var = alpha0 + alpha1 * block_return * block_return;
                state.block_sum = 0.0;
                state.in_block = 0;
            }
            r
        }
    }
}

/// Generate a trade stream. Sessions are numbered `0..n_sessions`; the
/// latent price carries over between sessions without an overnight move.
pub fn synth_trades(params: &TradeStreamParams) -> Result<Vec<TradeRecord>> {
    params.validate()?;
    let grid = params.tick.map(TickGrid::new).transpose()?;
    let mut arrivals_rng = rng::stream(rng::stage_seed(params.seed, "arrivals"));
    let mut returns_rng = rng::stream(rng::stage_seed(params.seed, "returns"));
    let mut log_rate = 0.0;
    let mut state = ReturnState {
        // ARCH blocks start at the stationary variance
        block_var: match params.returns {
            ReturnProcess::ArchModulated { alpha0, alpha1, .. } => alpha0 / (1.0 - alpha1),
            ReturnProcess::Iid { .. } => 1.0,
        },
        block_sum: 0.0,
        in_block: 0,
    };

    let mut price = params.init_price;
    let mut trades = Vec::new();
    for session in 0..params.n_sessions {
        let times = arrival_times(params, &mut arrivals_rng, &mut log_rate)?;
        for t in times {
            price += next_return(&params.returns, &mut state, &mut returns_rng);
            let observed = grid.map_or(price, |g| g.snap(price));
            trades.push(TradeRecord {
                session: session as i64,
                timestamp: t,
                price: observed,
                size: None,
            });
        }
    }
    Ok(trades)
}
