//! Config-driven experiment runner for `tickdiff`: trade-CSV ingestion,
//! synthetic streams, pipeline wiring and CSV/JSON output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod output;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{RunError, RunResult};
pub use experiment::{compute_experiment, run_experiment};
pub use ingest::{load_trades_csv, read_trades, IngestReport, TradeCsvSchema};
pub use output::{write_bundle, RunBundle, Table};
pub use tickdiff::synth::{synth_trades, TradeStreamParams};
