use std::fs;
use std::io::Write as _;
use std::path::Path;

use chrono::NaiveDate;
use tickdiff::clocks::{bin_real_time, trade_returns, ClockSpec, TradeRecord};
use tickdiff::estimators::acf;
use tickdiff_runner::config::{DateRange, InputSource};
use tickdiff_runner::ingest::session_of;
use tickdiff_runner::{
    compute_experiment, load_trades_csv, run_experiment, synth_trades, ExperimentConfig, ExperimentKind,
    RunError, TradeCsvSchema, TradeStreamParams,
};

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn ingest_three_row_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "t.csv",
        "timestamp,price,size\n2001-01-29T09:30:05,50.1,100\n2001-01-29T09:31:00,50.2,300\n2001-01-29T09:32:00,50.15,200\n",
    );
    let schema = TradeCsvSchema {
        size_column: Some("size".into()),
        ..TradeCsvSchema::default()
    };
    let rep = load_trades_csv(&p, &schema).unwrap();
    assert_eq!(rep.accepted(), 3);
    assert_eq!(rep.rejected.len(), 0);
    assert_eq!(rep.malformed.len(), 0);
}

#[test]
fn ingest_negative_price_is_rejected_and_run_continues() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "t.csv",
        "timestamp,price\n2001-01-29T09:30:05,50.1\n2001-01-29T09:31:00,-50.2\n2001-01-29T09:32:00,50.15\n",
    );
    let rep = load_trades_csv(&p, &TradeCsvSchema::default()).unwrap();
    assert_eq!(rep.accepted(), 2);
    assert_eq!(rep.rejected.len(), 1);
}

#[test]
fn ingest_out_of_order_rows_are_stable_sorted() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "t.csv",
        "timestamp,price\n2001-01-29T09:32:00,3\n2001-01-29T09:30:05,1\n2001-01-29T09:32:00,4\n2001-01-29T09:31:00,2\n",
    );
    let rep = load_trades_csv(&p, &TradeCsvSchema::default()).unwrap();
    let prices: Vec<f64> = rep.instrument(None).unwrap().iter().map(|t| t.price).collect();
    // equal timestamps keep their file order
    assert_eq!(prices, vec![1.0, 2.0, 3.0, 4.0]);
    assert!(!rep.warnings.is_empty());
}

#[test]
fn doubly_stochastic_stream_clusters_only_through_activity() {
    let trades = synth_trades(&TradeStreamParams::clustered_activity(21)).unwrap();
    let real = bin_real_time(&trades, &ClockSpec::default()).unwrap();
    let rho_real = acf(&real.abs_returns(), 1).unwrap().rho[0];
    let per_trade: Vec<f64> = trade_returns(&trades).unwrap().abs();
    let rho_trade = acf(&per_trade, 1).unwrap().rho[0];
    println!("real-time ACF(1) {rho_real:.3}, per-trade ACF(1) {rho_trade:.4}");
    assert!(rho_real > 0.1);
    assert!(rho_trade.abs() < 0.01);
}

fn small_panel(kind: ExperimentKind, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind, seed);
    let mut synth = ExperimentConfig::default_synth(kind);
    synth.n_sessions = 30;
    cfg.synth = Some(synth);
    cfg.regimes.instruments = 4;
    cfg
}

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn rerun_gives_byte_identical_data_files() {
    let tmp = tempfile::tempdir().unwrap();
    for kind in [ExperimentKind::PanelTest, ExperimentKind::SubordinationCompare, ExperimentKind::ArchSweep] {
        let mut cfg = small_panel(kind, 99);
        cfg.arch.n = 4096;
        cfg.sweep.n_seeds = 3;
        if kind == ExperimentKind::SubordinationCompare {
            cfg.synth.as_mut().unwrap().n_sessions = 40;
        }
        let mut runs = Vec::new();
        for run in ["a", "b"] {
            cfg.out_dir = tmp.path().join(format!("{}-{run}", kind.name()));
            run_experiment(&cfg).unwrap();
            runs.push(data_files(&cfg.out_dir));
        }
        assert!(!runs[0].is_empty());
        assert_eq!(runs[0], runs[1], "{}", kind.name());
        let m = fs::read_to_string(cfg.out_dir.join("manifest.json")).unwrap();
        assert!(m.contains("\"config_sha256\"") && m.contains("\"gaussian_sampler\""));
    }
}

#[test]
fn seed_changes_numbers_but_not_shape() {
    let a = compute_experiment(&small_panel(ExperimentKind::AcfCompare, 1)).unwrap();
    let b = compute_experiment(&small_panel(ExperimentKind::AcfCompare, 2)).unwrap();
    let (ta, tb) = (a.table("acf").unwrap(), b.table("acf").unwrap());
    assert_eq!(ta.header, tb.header);
    assert_eq!(ta.rows.len(), tb.rows.len());
    assert_ne!(ta.rows, tb.rows);
    assert_ne!(a.manifest["config_sha256"], b.manifest["config_sha256"]);
}

#[test]
fn manifest_records_every_tunable() {
    let b = compute_experiment(&small_panel(ExperimentKind::DistributionCompare, 3)).unwrap();
    let c = &b.manifest["config"];
    for key in ["tail_fraction", "max_lag", "dfa_min_window", "dfa_max_window", "dfa_windows", "ccdf_points"] {
        assert!(c["estimators"].get(key).is_some(), "estimators.{key}");
    }
    for key in ["bin_seconds", "shuffle_scope", "n_per_bin"] {
        assert!(c["clock"].get(key).is_some(), "clock.{key}");
    }
    for key in ["n_sessions", "session_seconds", "base_rate", "rate", "returns", "init_price", "tick"] {
        assert!(c["synth"].get(key).is_some(), "synth.{key}");
    }
    assert!(b.manifest["rng"]["stage_seeds"]["synth/S01"].is_u64());
    assert_eq!(b.manifest["summary"]["ttests"].as_array().unwrap().len(), 2);
}

/// Trades of `n_instruments` synthetic instruments written as an
/// epoch-seconds CSV: `sessions` days from `day0` on a coarse grid, then
/// the same streams from `day1` on a fine grid.
fn write_trade_csv(path: &Path, n_instruments: usize, sessions: usize, day0: i64, day1: i64) {
    let mut f = fs::File::create(path).unwrap();
    writeln!(f, "symbol,epoch,price").unwrap();
    let open = 9.5 * 3600.0;
    for i in 0..n_instruments {
        for (tick, day) in [(0.0625, day0), (0.01, day1)] {
            let params = TradeStreamParams {
                n_sessions: sessions,
                tick: Some(tick),
                seed: 1000 + i as u64,
                ..TradeStreamParams::clustered_returns(0)
            };
            for t in synth_trades(&params).unwrap() {
                let secs = (day + t.session) as f64 * 86_400.0 + open + t.timestamp;
                writeln!(f, "X{i},{secs},{}", t.price).unwrap();
            }
        }
    }
}

fn csv_config(kind: ExperimentKind, path: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind, 8);
    cfg.input.source = InputSource::Csv;
    cfg.input.path = Some(path.to_path_buf());
    cfg.input.schema = TradeCsvSchema {
        timestamp_column: "epoch".into(),
        instrument_column: Some("symbol".into()),
        timestamp_format: "epoch".into(),
        ..TradeCsvSchema::default()
    };
    cfg
}

fn date(day: i64) -> String {
    (NaiveDate::from_ymd_opt(1970, 1, 1).unwrap() + chrono::Duration::days(day))
        .format("%Y-%m-%d")
        .to_string()
}

#[test]
fn csv_panel_with_date_windows() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("trades.csv");
    let (day0, day1) = (11_000, 11_100);
    write_trade_csv(&path, 3, 25, day0, day1);
    let mut cfg = csv_config(ExperimentKind::DistributionCompare, &path);
    cfg.windows.before = Some(DateRange {
        start: date(day0),
        end: date(day0 + 24),
    });
    cfg.windows.after = Some(DateRange {
        start: date(day1),
        end: date(day1 + 24),
    });
    let b = compute_experiment(&cfg).unwrap();
    let t = &b.manifest["summary"]["ttests"][0];
    assert_eq!(t["statistic"], "p0");
    assert_eq!(t["alternative"], "less");
    assert!(t["mean"].as_f64().unwrap() < 0.0);
    assert!(t["p_value"].as_f64().unwrap() < 0.05, "{t}");
    assert_eq!(b.manifest["input"]["accepted"], b.manifest["input"]["rows"]);
    assert_eq!(session_of(NaiveDate::from_ymd_opt(1970, 1, 2).unwrap()), 1);

    // the same file split by session fraction gives the same two windows
    let mut split = csv_config(ExperimentKind::DistributionCompare, &path);
    split.windows.split_fraction = 0.5;
    let s = compute_experiment(&split).unwrap();
    assert_eq!(s.table("ttests"), b.table("ttests"));
}

#[test]
fn empty_window_aborts_without_output() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("trades.csv");
    write_trade_csv(&path, 2, 5, 11_000, 11_010);
    let mut cfg = csv_config(ExperimentKind::PanelTest, &path);
    cfg.windows.before = Some(DateRange {
        start: "1990-01-01".into(),
        end: "1990-02-01".into(),
    });
    cfg.windows.after = Some(DateRange {
        start: date(11_010),
        end: date(11_020),
    });
    cfg.out_dir = tmp.path().join("out");
    let err = run_experiment(&cfg).unwrap_err();
    assert!(matches!(err, RunError::Data { .. }), "{err}");
    assert_eq!(err.exit_code(), 3);
    assert!(!cfg.out_dir.exists());
}

#[test]
fn subordination_from_csv_instrument() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("trades.csv");
    write_trade_csv(&path, 2, 10, 11_000, 11_020);
    let mut cfg = csv_config(ExperimentKind::SubordinationCompare, &path);
    assert!(compute_experiment(&cfg).is_err(), "two instruments need a choice");
    cfg.input.instrument = Some("X1".into());
    let b = compute_experiment(&cfg).unwrap();
    let bins = b.table("subordination_bins").unwrap();
    assert_eq!(bins.rows.len(), 3);
    assert_eq!(b.manifest["summary"]["sessions"], 20);
}

#[test]
fn real_time_trades_round_trip_through_csv() {
    let trades = vec![
        TradeRecord::new(0, 1.0, 10.0),
        TradeRecord::new(0, 2.0, 10.5),
        TradeRecord::new(1, 0.5, 11.0),
    ];
    let mut text = String::from("session,timestamp,price\n");
    for t in &trades {
        text.push_str(&format!("{},{},{}\n", t.session, t.timestamp, t.price));
    }
    let schema = TradeCsvSchema {
        session_column: Some("session".into()),
        ..TradeCsvSchema::default()
    };
    let rep = tickdiff_runner::read_trades(text.as_bytes(), &schema).unwrap();
    assert_eq!(rep.instrument(None).unwrap(), trades.as_slice());
}
