//! Experiment configuration.
//!
//! A TOML file with one top-level `kind`, a mandatory `seed`, and a
//! section per pipeline stage. Every key has a default; the resolved
//! configuration, defaults included, is written to the run manifest.
//!
//! ```toml
//! kind = "arch_sweep"
//! seed = 42
//! out_dir = "out/arch"
//!
//! [arch]
//! alpha0 = 0.1
//! alpha1 = 0.9
//! n = 65536
//!
//! [sweep]
//! delta_multiples = [0.0, 0.25, 0.5, 1.0, 2.0]
//! n_seeds = 20
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tickdiff::arch::{ArchParams, DEFAULT_BURN_IN, DEFAULT_DELTA_MULTIPLES};
use tickdiff::clocks::{ClockMode, ClockSpec, ShuffleScope};
use tickdiff::estimators::{DfaSettings, DEFAULT_TAIL_FRACTION};
use tickdiff::synth::TradeStreamParams;

use crate::error::{RunError, RunResult};
use crate::ingest::{parse_date, TradeCsvSchema};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Coarse-graining sweep of simulated ARCH(1) paths.
    ArchSweep,
    /// Before/after return distribution: ccdf, zero frequency, Hill.
    DistributionCompare,
    /// Before/after volatility clustering: |r| ACF and DFA Hurst exponent.
    AcfCompare,
    /// Real, transaction and shuffled transaction time on one stream.
    SubordinationCompare,
    /// Every before/after statistic with its paired t-test.
    PanelTest,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::ArchSweep => "arch_sweep",
            ExperimentKind::DistributionCompare => "distribution_compare",
            ExperimentKind::AcfCompare => "acf_compare",
            ExperimentKind::SubordinationCompare => "subordination_compare",
            ExperimentKind::PanelTest => "panel_test",
        }
    }

    pub fn is_panel(&self) -> bool {
        matches!(
            self,
            ExperimentKind::DistributionCompare | ExperimentKind::AcfCompare | ExperimentKind::PanelTest
        )
    }
}

/// ARCH(1) simulation settings; the seed comes from the global seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchSection {
    pub alpha0: f64,
    pub alpha1: f64,
    pub n: usize,
    pub burn_in: usize,
    pub init_return: f64,
    pub init_price: f64,
}

impl Default for ArchSection {
    fn default() -> Self {
        let p = ArchParams::default();
        Self {
            alpha0: p.alpha0,
            alpha1: p.alpha1,
            n: p.n,
            burn_in: DEFAULT_BURN_IN,
            init_return: p.init_return,
            init_price: p.init_price,
        }
    }
}

impl ArchSection {
    pub fn params(&self, seed: u64) -> ArchParams {
        ArchParams {
            alpha0: self.alpha0,
            alpha1: self.alpha1,
            n: self.n,
            seed,
            init_return: self.init_return,
            init_price: self.init_price,
            burn_in: self.burn_in,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Tick sizes in units of the stationary standard deviation.
    pub delta_multiples: Vec<f64>,
    pub max_lag: usize,
    pub n_seeds: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            delta_multiples: DEFAULT_DELTA_MULTIPLES.to_vec(),
            max_lag: 10,
            n_seeds: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorSection {
    pub tail_fraction: f64,
    pub max_lag: usize,
    pub dfa_min_window: usize,
    /// `None` means an eighth of the series length.
    pub dfa_max_window: Option<usize>,
    pub dfa_windows: usize,
    pub ccdf_points: usize,
}

impl Default for EstimatorSection {
    fn default() -> Self {
        let dfa = DfaSettings::default();
        Self {
            tail_fraction: DEFAULT_TAIL_FRACTION,
            max_lag: 10,
            dfa_min_window: dfa.min_window,
            dfa_max_window: dfa.max_window,
            dfa_windows: dfa.n_windows,
            ccdf_points: 20,
        }
    }
}

impl EstimatorSection {
    pub fn dfa(&self) -> DfaSettings {
        DfaSettings {
            min_window: self.dfa_min_window,
            max_window: self.dfa_max_window,
            n_windows: self.dfa_windows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClockSection {
    pub bin_seconds: f64,
    pub shuffle_scope: ShuffleScope,
    /// Transaction-time bin size; default is the rounded mean number of
    /// transactions per real-time bin.
    pub n_per_bin: Option<usize>,
}

impl Default for ClockSection {
    fn default() -> Self {
        let spec = ClockSpec::default();
        Self {
            bin_seconds: spec.bin_seconds,
            shuffle_scope: spec.shuffle_scope,
            n_per_bin: spec.n_per_bin,
        }
    }
}

impl ClockSection {
    pub fn spec(&self, mode: ClockMode, session_seconds: f64, shuffle_seed: u64) -> ClockSpec {
        ClockSpec {
            mode,
            bin_seconds: self.bin_seconds,
            session_seconds,
            shuffle_seed,
            shuffle_scope: self.shuffle_scope,
            n_per_bin: self.n_per_bin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InputSource {
    #[default]
    Synthetic,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct InputSection {
    pub source: InputSource,
    /// Trade CSV; relative paths are taken from the config file's directory.
    pub path: Option<PathBuf>,
    /// Instrument for single-stream experiments when the file holds several.
    pub instrument: Option<String>,
    pub schema: TradeCsvSchema,
}

/// Inclusive calendar-date range, `YYYY-MM-DD`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DateRange {
    pub start: String,
    pub end: String,
}

/// Before/after windows for CSV input: explicit date ranges, or a split of
/// each instrument's sessions at `split_fraction`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowSection {
    pub before: Option<DateRange>,
    pub after: Option<DateRange>,
    pub split_fraction: f64,
}

impl Default for WindowSection {
    fn default() -> Self {
        Self {
            before: None,
            after: None,
            split_fraction: 0.5,
        }
    }
}

/// Synthetic before/after regimes: the same trade stream per instrument,
/// observed on two tick grids (absolute price units, 0 = no grid).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegimeSection {
    pub instruments: usize,
    pub before_tick: f64,
    pub after_tick: f64,
}

impl Default for RegimeSection {
    fn default() -> Self {
        Self {
            instruments: 5,
            before_tick: 0.0625,
            after_tick: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Mandatory, either here or on the command line.
    pub seed: Option<u64>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub arch: ArchSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub estimators: EstimatorSection,
    #[serde(default)]
    pub clock: ClockSection,
    #[serde(default)]
    pub input: InputSection,
    /// Synthetic trade stream; the default depends on `kind`.
    #[serde(default)]
    pub synth: Option<TradeStreamParams>,
    #[serde(default)]
    pub windows: WindowSection,
    #[serde(default)]
    pub regimes: RegimeSection,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> RunResult<()> {
    if ok {
        Ok(())
    } else {
        Err(RunError::Config(msg()))
    }
}

impl ExperimentConfig {
    /// Config with every section at its default.
    pub fn new(kind: ExperimentKind, seed: u64) -> Self {
        Self {
            kind,
            seed: Some(seed),
            out_dir: default_out_dir(),
            arch: ArchSection::default(),
            sweep: SweepSection::default(),
            estimators: EstimatorSection::default(),
            clock: ClockSection::default(),
            input: InputSection::default(),
            synth: None,
            windows: WindowSection::default(),
            regimes: RegimeSection::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> RunResult<Self> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    /// Parse a config file; a relative input path is resolved against the
    /// file's directory.
    pub fn load(path: &Path) -> RunResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        if let Some(p) = cfg.input.path.as_mut() {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn seed(&self) -> RunResult<u64> {
        self.seed
            .ok_or_else(|| RunError::Config("`seed` is mandatory (set it in the config or pass --seed)".into()))
    }

    /// Default synthetic stream for this experiment kind: ARCH-modulated
    /// returns at a constant rate, over 100 sessions per window for the
    /// before/after panels.
    pub fn default_synth(kind: ExperimentKind) -> TradeStreamParams {
        let base = TradeStreamParams::clustered_returns(0);
        if kind.is_panel() {
            TradeStreamParams {
                n_sessions: 100,
                ..base
            }
        } else {
            base
        }
    }

    /// Fill kind-dependent defaults and validate every section.
    pub fn resolve(mut self) -> RunResult<Self> {
        self.seed()?;
        if self.synth.is_none() {
            self.synth = Some(Self::default_synth(self.kind));
        }
        self.validate()?;
        Ok(self)
    }

    pub fn synth_params(&self) -> TradeStreamParams {
        self.synth.clone().unwrap_or_else(|| Self::default_synth(self.kind))
    }

    pub fn validate(&self) -> RunResult<()> {
        let e = &self.estimators;
        check(e.tail_fraction > 0.0 && e.tail_fraction <= 0.2, || {
            format!("estimators.tail_fraction must lie in (0, 0.2], got {}", e.tail_fraction)
        })?;
        check(e.max_lag >= 1, || "estimators.max_lag must be >= 1".into())?;
        check(e.dfa_min_window >= 4, || "estimators.dfa_min_window must be >= 4".into())?;
        check(e.dfa_windows >= 4, || "estimators.dfa_windows must be >= 4".into())?;
        if let Some(max) = e.dfa_max_window {
            check(max > e.dfa_min_window, || {
                "estimators.dfa_max_window must exceed dfa_min_window".into()
            })?;
        }
        check(e.ccdf_points >= 2, || "estimators.ccdf_points must be >= 2".into())?;

        let c = &self.clock;
        check(c.bin_seconds.is_finite() && c.bin_seconds > 0.0, || {
            format!("clock.bin_seconds must be > 0, got {}", c.bin_seconds)
        })?;
        check(c.n_per_bin != Some(0), || "clock.n_per_bin must be >= 1".into())?;

        match self.kind {
            ExperimentKind::ArchSweep => {
                let s = &self.sweep;
                check(!s.delta_multiples.is_empty(), || "sweep.delta_multiples is empty".into())?;
                check(s.delta_multiples.iter().all(|m| m.is_finite() && *m >= 0.0), || {
                    "sweep.delta_multiples must be finite and >= 0".into()
                })?;
                check(s.n_seeds >= 2, || "sweep.n_seeds must be >= 2 for a standard error".into())?;
                check(s.max_lag >= 1, || "sweep.max_lag must be >= 1".into())?;
                self.arch
                    .params(0)
                    .validate()
                    .map_err(|err| RunError::Config(format!("arch: {err}")))?;
            }
            _ => self.validate_input()?,
        }
        Ok(())
    }

    fn validate_input(&self) -> RunResult<()> {
        match self.input.source {
            InputSource::Synthetic => {
                self.synth_params()
                    .validate()
                    .map_err(|err| RunError::Config(format!("synth: {err}")))?;
                if self.kind.is_panel() {
                    let r = &self.regimes;
                    check(r.instruments >= 2, || "regimes.instruments must be >= 2".into())?;
                    for (name, t) in [("before_tick", r.before_tick), ("after_tick", r.after_tick)] {
                        check(t.is_finite() && t >= 0.0, || format!("regimes.{name} must be >= 0"))?;
                    }
                }
            }
            InputSource::Csv => {
                let path = self
                    .input
                    .path
                    .as_ref()
                    .ok_or_else(|| RunError::Config("input.path is required for csv input".into()))?;
                check(path.is_file(), || format!("input.path {} does not exist", path.display()))?;
                self.input.schema.open_close()?;
                if self.kind.is_panel() {
                    let w = &self.windows;
                    match (&w.before, &w.after) {
                        (Some(b), Some(a)) => {
                            for r in [b, a] {
                                check(parse_date(&r.start)? <= parse_date(&r.end)?, || {
                                    format!("window {}..{} ends before it starts", r.start, r.end)
                                })?;
                            }
                        }
                        (None, None) => check(w.split_fraction > 0.0 && w.split_fraction < 1.0, || {
                            format!("windows.split_fraction must lie in (0, 1), got {}", w.split_fraction)
                        })?,
                        _ => {
                            return Err(RunError::Config(
                                "windows.before and windows.after must be given together".into(),
                            ))
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
