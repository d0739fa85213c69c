//! Aggregation of per-transaction returns under three clocks.
//!
//! Under the subordination picture the price is a diffusion `X` evaluated
//! at a stochastic clock `tau(t)`, here the cumulative transaction count.
//! The three clocks separate the two candidate sources of clustering:
//!
//! - real time: fixed wall-clock bins (15 minutes by default);
//! - transaction time: bins holding a fixed number of transactions, which
//!   removes trade-rate fluctuations but keeps the order of returns;
//! - shuffled transaction time: per-transaction returns permuted at random
//!   and re-aggregated with the real-time bin counts, which keeps the
//!   trade-rate fluctuations but destroys the ordering of return sizes.
//!
//! No return ever spans two sessions: the first trade of a session only
//! sets the reference price.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::series::ReturnSeries;

/// One transaction. `timestamp` is seconds since the session open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub session: i64,
    pub timestamp: f64,
    pub price: f64,
    pub size: Option<u64>,
}

impl TradeRecord {
    pub fn new(session: i64, timestamp: f64, price: f64) -> Self {
        Self {
            session,
            timestamp,
            price,
            size: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClockMode {
    RealTime,
    TransactionTime,
    ShuffledTransactionTime,
}

impl ClockMode {
    pub const ALL: [ClockMode; 3] = [
        ClockMode::RealTime,
        ClockMode::TransactionTime,
        ClockMode::ShuffledTransactionTime,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClockMode::RealTime => "real_time",
            ClockMode::TransactionTime => "transaction_time",
            ClockMode::ShuffledTransactionTime => "shuffled_transaction_time",
        }
    }
}

/// Which returns the shuffle may exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShuffleScope {
    FullSample,
    PerSession,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClockSpec {
    pub mode: ClockMode,
    pub bin_seconds: f64,
    /// Length of a trading session; a trailing partial bin is dropped.
    pub session_seconds: f64,
    pub shuffle_seed: u64,
    pub shuffle_scope: ShuffleScope,
    /// Transaction-time bin size; `None` means the rounded mean number of
    /// transactions per real-time bin.
    pub n_per_bin: Option<usize>,
}

impl Default for ClockSpec {
    fn default() -> Self {
        Self {
            mode: ClockMode::RealTime,
            bin_seconds: 900.0,
            session_seconds: 23_400.0,
            shuffle_seed: 0,
            shuffle_scope: ShuffleScope::FullSample,
            n_per_bin: None,
        }
    }
}

impl ClockSpec {
    pub fn bins_per_session(&self) -> Result<usize> {
        if !(self.bin_seconds.is_finite() && self.bin_seconds > 0.0) {
            return Err(Error::param("bin_seconds", format!("must be > 0, got {}", self.bin_seconds)));
        }
        if !(self.session_seconds.is_finite() && self.session_seconds > 0.0) {
            return Err(Error::param(
                "session_seconds",
                format!("must be > 0, got {}", self.session_seconds),
            ));
        }
        let n = (self.session_seconds / self.bin_seconds + 1e-9).floor() as usize;
        if n == 0 {
            return Err(Error::param("bin_seconds", "bin is longer than the session"));
        }
        Ok(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinBounds {
    pub session: i64,
    /// Seconds since session open. For transaction-time bins these are the
    /// timestamps of the first and last transaction in the bin.
    pub start: f64,
    pub end: f64,
}

/// Per-session bookkeeping for the conservation identity
/// `sum(bin returns) + dropped = close - open`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SessionSummary {
    pub session: i64,
    pub open_price: f64,
    pub close_price: f64,
    /// Sum of per-transaction returns not assigned to any bin.
    pub dropped_return: f64,
    pub dropped_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedReturns {
    pub mode: ClockMode,
    pub returns: Vec<f64>,
    pub counts: Vec<usize>,
    pub bounds: Vec<BinBounds>,
    pub sessions: Vec<SessionSummary>,
}

impl BinnedReturns {
    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn abs_returns(&self) -> Vec<f64> {
        self.returns.iter().map(|r| r.abs()).collect()
    }

    pub fn total_count(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn total_dropped(&self) -> f64 {
        self.sessions.iter().map(|s| s.dropped_return).sum()
    }

    /// Bin returns as a return series labelled by session.
    pub fn to_return_series(&self) -> Result<ReturnSeries> {
        ReturnSeries::with_labels(
            self.returns.clone(),
            self.bounds.iter().map(|b| b.session).collect(),
        )
    }

    /// Sum of bin returns within each session, aligned with `sessions`
    /// (sessions without bins total 0).
    pub fn session_totals(&self) -> Vec<(i64, f64)> {
        let mut out: Vec<(i64, f64)> = self.sessions.iter().map(|s| (s.session, 0.0)).collect();
        let mut i = 0;
        for (r, b) in self.returns.iter().zip(&self.bounds) {
            while out[i].0 != b.session {
                i += 1;
            }
            out[i].1 += r;
        }
        out
    }
}

/// Per-transaction returns with the session and time at which each was
/// realised (the timestamp of the later trade).
#[derive(Debug, Clone, PartialEq)]
struct TransactionReturns {
    values: Vec<f64>,
    sessions: Vec<i64>,
    timestamps: Vec<f64>,
    summaries: Vec<SessionSummary>,
}

fn validate_trades(trades: &[TradeRecord]) -> Result<()> {
    for (i, t) in trades.iter().enumerate() {
        if !t.price.is_finite() || !t.timestamp.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
    }
    if let Some(i) = trades.windows(2).position(|w| {
        (w[1].session, w[1].timestamp)
            .partial_cmp(&(w[0].session, w[0].timestamp))
            .is_none_or(|o| o.is_lt())
    }) {
        return Err(Error::Unsorted(format!(
            "trade {} precedes trade {} in (session, timestamp) order",
            i + 1,
            i
        )));
    }
    Ok(())
}

fn sessions_of(trades: &[TradeRecord]) -> impl Iterator<Item = &[TradeRecord]> {
    trades.chunk_by(|a, b| a.session == b.session)
}

fn transaction_returns(trades: &[TradeRecord]) -> Result<TransactionReturns> {
    validate_trades(trades)?;
    let mut out = TransactionReturns {
        values: Vec::with_capacity(trades.len()),
        sessions: Vec::with_capacity(trades.len()),
        timestamps: Vec::with_capacity(trades.len()),
        summaries: Vec::new(),
    };
    for session in sessions_of(trades) {
        for w in session.windows(2) {
            out.values.push(w[1].price - w[0].price);
            out.sessions.push(w[1].session);
            out.timestamps.push(w[1].timestamp);
        }
        out.summaries.push(SessionSummary {
            session: session[0].session,
            open_price: session[0].price,
            close_price: session[session.len() - 1].price,
            dropped_return: 0.0,
            dropped_count: 0,
        });
    }
    if out.values.is_empty() {
        return Err(Error::InsufficientData(
            "no session holds two or more trades".into(),
        ));
    }
    Ok(out)
}

/// Additive price change of every transaction relative to the previous
/// trade of the same session, labelled by session.
pub fn trade_returns(trades: &[TradeRecord]) -> Result<ReturnSeries> {
    let tx = transaction_returns(trades)?;
    ReturnSeries::with_labels(tx.values, tx.sessions)
}

struct RealTimeAssignment {
    binned: BinnedReturns,
    // per-transaction returns that landed in a bin, in bin order
    included: Vec<f64>,
    // [start, end) ranges into `included` per session
    session_ranges: Vec<(usize, usize)>,
}

fn assign_real_time(trades: &[TradeRecord], spec: &ClockSpec) -> Result<RealTimeAssignment> {
    let n_bins = spec.bins_per_session()?;
    if trades.is_empty() {
        return Err(Error::InsufficientData("no trades to bin".into()));
    }
    let tx = transaction_returns(trades)?;
    let w = spec.bin_seconds;
    let covered = n_bins as f64 * w;

    let mut binned = BinnedReturns {
        mode: ClockMode::RealTime,
        returns: Vec::with_capacity(tx.summaries.len() * n_bins),
        counts: Vec::with_capacity(tx.summaries.len() * n_bins),
        bounds: Vec::with_capacity(tx.summaries.len() * n_bins),
        sessions: tx.summaries.clone(),
    };
    let mut included = Vec::with_capacity(tx.values.len());
    let mut session_ranges = Vec::with_capacity(tx.summaries.len());

    let mut cursor = 0;
    for summary in binned.sessions.iter_mut() {
        let start = cursor;
        while cursor < tx.values.len() && tx.sessions[cursor] == summary.session {
            cursor += 1;
        }
        let mut sums = vec![0.0; n_bins];
        let mut counts = vec![0usize; n_bins];
        let mut members: Vec<Vec<f64>> = vec![Vec::new(); n_bins];
        for j in start..cursor {
            let t = tx.timestamps[j];
            if t < 0.0 {
                return Err(Error::param(
                    "timestamp",
                    format!("trade at {t} s precedes the session open"),
                ));
            }
            let b = (t / w).floor() as usize;
            let b = if b < n_bins {
                Some(b)
            } else if t <= covered {
                // closing print exactly at the end of the last full bin
                Some(n_bins - 1)
            } else {
                None
            };
            match b {
                Some(b) => {
                    sums[b] += tx.values[j];
                    counts[b] += 1;
                    members[b].push(tx.values[j]);
                }
                None => {
                    summary.dropped_return += tx.values[j];
                    summary.dropped_count += 1;
                }
            }
        }
        let inc_start = included.len();
        for b in 0..n_bins {
            binned.returns.push(sums[b]);
            binned.counts.push(counts[b]);
            binned.bounds.push(BinBounds {
                session: summary.session,
                start: b as f64 * w,
                end: (b + 1) as f64 * w,
            });
            included.extend_from_slice(&members[b]);
        }
        session_ranges.push((inc_start, included.len()));
    }
    Ok(RealTimeAssignment {
        binned,
        included,
        session_ranges,
    })
}

/// Fixed wall-clock bins of `spec.bin_seconds` per session. Empty bins are
/// kept with return 0 and count 0.
pub fn bin_real_time(trades: &[TradeRecord], spec: &ClockSpec) -> Result<BinnedReturns> {
    Ok(assign_real_time(trades, spec)?.binned)
}

/// Rounded mean number of transactions per real-time bin (at least 1).
pub fn mean_transactions_per_bin(trades: &[TradeRecord], spec: &ClockSpec) -> Result<usize> {
    let real = bin_real_time(trades, spec)?;
    let mean = real.total_count() as f64 / real.len() as f64;
    Ok((mean.round() as usize).max(1))
}

/// Bins of exactly `n_per_bin` consecutive transactions within each
/// session; a trailing remainder shorter than `n_per_bin` is dropped.
pub fn bin_transaction_time(trades: &[TradeRecord], n_per_bin: usize) -> Result<BinnedReturns> {
    if n_per_bin == 0 {
        return Err(Error::param("n_per_bin", "must be at least 1"));
    }
    let tx = transaction_returns(trades)?;
    if tx.values.len() < n_per_bin {
        return Err(Error::InsufficientData(format!(
            "{} transactions cannot fill a bin of {n_per_bin}",
            tx.values.len()
        )));
    }
    let mut binned = BinnedReturns {
        mode: ClockMode::TransactionTime,
        returns: Vec::new(),
        counts: Vec::new(),
        bounds: Vec::new(),
        sessions: tx.summaries.clone(),
    };
    let mut cursor = 0;
    for summary in binned.sessions.iter_mut() {
        let start = cursor;
        while cursor < tx.values.len() && tx.sessions[cursor] == summary.session {
            cursor += 1;
        }
        let values = &tx.values[start..cursor];
        let times = &tx.timestamps[start..cursor];
        let mut chunks = values.chunks_exact(n_per_bin);
        for (i, chunk) in chunks.by_ref().enumerate() {
            binned.returns.push(chunk.iter().sum());
            binned.counts.push(n_per_bin);
            binned.bounds.push(BinBounds {
                session: summary.session,
                start: times[i * n_per_bin],
                end: times[(i + 1) * n_per_bin - 1],
            });
        }
        let rest = chunks.remainder();
        summary.dropped_return = rest.iter().sum();
        summary.dropped_count = rest.len();
    }
    Ok(binned)
}

/// Seeded uniform permutation (Fisher-Yates over a ChaCha8 stream) of the
/// real-time-binned transaction returns, re-aggregated with the real-time
/// bin counts.
pub fn shuffle_transaction_time(trades: &[TradeRecord], spec: &ClockSpec) -> Result<BinnedReturns> {
    let assignment = assign_real_time(trades, spec)?;
    let mut perm: Vec<usize> = (0..assignment.included.len()).collect();
    let mut rng = rng::stream(spec.shuffle_seed);
    match spec.shuffle_scope {
        ShuffleScope::FullSample => perm.shuffle(&mut rng),
        ShuffleScope::PerSession => {
            for &(a, b) in &assignment.session_ranges {
                perm[a..b].shuffle(&mut rng);
            }
        }
    }
    aggregate_permuted(assignment, &perm)
}

/// Shuffled transaction time with a caller-supplied permutation:
/// position `i` of the permuted sequence takes transaction return
/// `perm[i]`. The identity permutation reproduces [`bin_real_time`].
pub fn shuffle_with_permutation(
    trades: &[TradeRecord],
    spec: &ClockSpec,
    perm: &[usize],
) -> Result<BinnedReturns> {
    let assignment = assign_real_time(trades, spec)?;
    aggregate_permuted(assignment, perm)
}

fn aggregate_permuted(assignment: RealTimeAssignment, perm: &[usize]) -> Result<BinnedReturns> {
    let RealTimeAssignment {
        binned: real,
        included,
        ..
    } = assignment;
    let total = real.total_count();
    if perm.len() != total || included.len() != total {
        return Err(Error::Consistency(format!(
            "permutation of {} returns for {total} real-time transactions",
            perm.len()
        )));
    }
    let mut seen = vec![false; total];
    for &p in perm {
        if p >= total || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Consistency(format!("index {p} is not a valid permutation entry")));
        }
    }
    let mut returns = Vec::with_capacity(real.len());
    let mut pos = 0;
    for &c in &real.counts {
        returns.push(perm[pos..pos + c].iter().map(|&i| included[i]).sum());
        pos += c;
    }
    Ok(BinnedReturns {
        mode: ClockMode::ShuffledTransactionTime,
        returns,
        ..real
    })
}

/// Bin under `spec.mode`.
pub fn bin_trades(trades: &[TradeRecord], spec: &ClockSpec) -> Result<BinnedReturns> {
    match spec.mode {
        ClockMode::RealTime => bin_real_time(trades, spec),
        ClockMode::TransactionTime => {
            let n = match spec.n_per_bin {
                Some(n) => n,
                None => mean_transactions_per_bin(trades, spec)?,
            };
            bin_transaction_time(trades, n)
        }
        ClockMode::ShuffledTransactionTime => shuffle_transaction_time(trades, spec),
    }
}
