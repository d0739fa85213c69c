//! Experiment pipelines: simulate or ingest, bin, estimate, test, and
//! collect plot-ready tables plus a manifest.
//!
//! Every random stage draws from its own sub-seed, `stage_seed(seed, name)`,
//! and the names are listed in the manifest.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use tickdiff::arch::{
    coarse_grain_experiment, fit_decay_timescale, squared_acf_baseline, CoarseGrainSweep,
};
use tickdiff::clocks::{bin_real_time, bin_trades, mean_transactions_per_bin, ClockMode, TradeRecord};
use tickdiff::estimators::{
    acf, ccdf, hill, log_spaced_thresholds, zero_frequency, AcfEstimate, CcdfEstimate, DfaEstimate,
    HillEstimate,
};
use tickdiff::panel::{build_panel, paired_one_sided_ttest, Statistic, TTestResult};
use tickdiff::rng::{stage_seed, GAUSSIAN_SAMPLER};
use tickdiff::synth::{synth_trades, TradeStreamParams};

use crate::config::{ExperimentConfig, ExperimentKind, InputSource};
use crate::error::{at_stage, RunError, RunResult};
use crate::ingest::{load_trades_csv, parse_date, session_of, IngestReport};
use crate::output::{sha256_hex, write_bundle, RunBundle, Table};
use crate::row;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Named sub-seeds handed out during a run.
#[derive(Default)]
struct Seeds {
    global: u64,
    issued: BTreeMap<String, u64>,
}

impl Seeds {
    fn new(global: u64) -> Self {
        Self {
            global,
            issued: BTreeMap::new(),
        }
    }

    fn stage(&mut self, name: &str) -> u64 {
        let s = stage_seed(self.global, name);
        self.issued.insert(name.to_string(), s);
        s
    }
}

/// Resolve, compute and write to `config.out_dir`. Nothing is left behind
/// in the output directory if any stage fails.
pub fn run_experiment(config: &ExperimentConfig) -> RunResult<RunBundle> {
    let bundle = compute_experiment(config)?;
    write_bundle(&config.out_dir, &bundle)?;
    Ok(bundle)
}

/// Run the pipeline without touching the filesystem (other than reading
/// CSV input).
pub fn compute_experiment(config: &ExperimentConfig) -> RunResult<RunBundle> {
    let cfg = config.clone().resolve()?;
    let mut seeds = Seeds::new(cfg.seed()?);
    log::info!("running {} with seed {}", cfg.kind.name(), seeds.global);
    let (tables, summary, input) = match cfg.kind {
        ExperimentKind::ArchSweep => {
            let (t, s) = arch_sweep(&cfg, &mut seeds)?;
            (t, s, Value::Null)
        }
        ExperimentKind::SubordinationCompare => subordination(&cfg, &mut seeds)?,
        ExperimentKind::DistributionCompare | ExperimentKind::AcfCompare | ExperimentKind::PanelTest => {
            panel(&cfg, &mut seeds)?
        }
    };
    let config_value = serde_json::to_value(&cfg).map_err(|e| RunError::Config(e.to_string()))?;
    let canonical = serde_json::to_string(&config_value).map_err(|e| RunError::Config(e.to_string()))?;
    let manifest = json!({
        "kind": cfg.kind.name(),
        "seed": seeds.global,
        "config": config_value,
        "config_sha256": sha256_hex(canonical.as_bytes()),
        "tool": { "name": "tickdiff", "version": VERSION },
        "rng": {
            "generator": "ChaCha8",
            "gaussian_sampler": GAUSSIAN_SAMPLER,
            "stage_seeds": seeds.issued,
        },
        "input": input,
        "summary": summary,
    });
    Ok(RunBundle { tables, manifest })
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

// ---------------------------------------------------------------------------
// arch_sweep

fn arch_sweep(cfg: &ExperimentConfig, seeds: &mut Seeds) -> RunResult<(Vec<Table>, Value)> {
    let params = cfg.arch.params(seeds.stage("arch"));
    let s = &cfg.sweep;
    let sweep = CoarseGrainSweep::from_multiples(&params, &s.delta_multiples, s.max_lag, s.n_seeds);
    let table = coarse_grain_experiment(&params, &sweep).map_err(at_stage("arch_sweep"))?;
    let baseline = squared_acf_baseline(&params, s.n_seeds, s.max_lag).map_err(at_stage("arch_baseline"))?;

    let multiple_of = |delta: f64| {
        sweep
            .deltas
            .iter()
            .position(|d| *d == delta)
            .map(|i| s.delta_multiples[i])
    };
    let mut acf_t = Table::new(
        "arch_sweep_acf",
        &["delta_multiple", "delta", "lag", "mean_acf", "stderr", "n_valid"],
    );
    for r in &table.acf_rows {
        acf_t.push(row![multiple_of(r.delta), r.delta, r.lag, r.mean_acf, r.stderr, r.n_valid]);
    }
    let mut zero_t = Table::new("arch_sweep_zero", &["delta_multiple", "delta", "mean_p0", "stderr"]);
    for r in &table.zero_rows {
        zero_t.push(row![multiple_of(r.delta), r.delta, r.mean_p0, r.stderr]);
    }
    let mut base_t = Table::new("arch_baseline", &["lag", "mean_sq_acf", "stderr", "analytic"]);
    for r in &baseline {
        base_t.push(row![r.lag, r.mean_acf, r.stderr, r.analytic]);
    }

    let rho: Vec<f64> = baseline.iter().map(|r| r.mean_acf).collect();
    let fitted = fit_decay_timescale(&rho);
    let max_dev = baseline
        .iter()
        .map(|r| (r.mean_acf - r.analytic).abs())
        .fold(0.0, f64::max);
    let per_delta: Vec<Value> = sweep
        .deltas
        .iter()
        .zip(&s.delta_multiples)
        .map(|(&d, &m)| {
            let lag1 = table.row(d, 1);
            json!({
                "delta_multiple": m,
                "delta": d,
                "mean_acf_lag1": lag1.and_then(|r| r.mean_acf),
                "mean_p0": table.zero_row(d).map(|z| z.mean_p0),
                "degenerate_lags": table.acf_rows.iter().filter(|r| r.delta == d && r.degenerate()).count(),
            })
        })
        .collect();
    let summary = json!({
        "stationary_variance": params.stationary_variance(),
        "stationary_std": params.stationary_std(),
        "analytic_timescale": params.clustering_timescale(),
        "fitted_timescale": fitted,
        "baseline_max_abs_deviation": max_dev,
        "replicate_seeds": table.seeds,
        "per_delta": per_delta,
    });
    Ok((vec![acf_t, zero_t, base_t], summary))
}

// ---------------------------------------------------------------------------
// input

fn ingest_summary(report: &IngestReport) -> Value {
    json!({
        "rows": report.rows,
        "accepted": report.accepted(),
        "malformed": report.malformed.len(),
        "rejected": report.rejected.len(),
        "out_of_session": report.out_of_session,
        "warnings": report.warnings,
        "instruments": report.instruments.iter().map(|(k, v)| (k.clone(), v.len())).collect::<BTreeMap<_, _>>(),
    })
}

fn load_csv(cfg: &ExperimentConfig) -> RunResult<IngestReport> {
    let path = cfg
        .input
        .path
        .as_ref()
        .ok_or_else(|| RunError::Config("input.path is required for csv input".into()))?;
    let report = load_trades_csv(path, &cfg.input.schema)?;
    log::info!(
        "ingested {} trades ({} rejected, {} malformed, {} out of session)",
        report.accepted(),
        report.rejected.len(),
        report.malformed.len(),
        report.out_of_session
    );
    Ok(report)
}

fn synth_stream(params: &TradeStreamParams, seed: u64) -> RunResult<Vec<TradeRecord>> {
    synth_trades(&TradeStreamParams {
        seed,
        ..params.clone()
    })
    .map_err(at_stage("synth"))
}

// ---------------------------------------------------------------------------
// subordination_compare

fn subordination(cfg: &ExperimentConfig, seeds: &mut Seeds) -> RunResult<(Vec<Table>, Value, Value)> {
    let (trades, session_seconds, input) = match cfg.input.source {
        InputSource::Synthetic => {
            let params = cfg.synth_params();
            let trades = synth_stream(&params, seeds.stage("synth"))?;
            let info = json!({ "source": "synthetic", "trades": trades.len() });
            (trades, params.session_seconds, info)
        }
        InputSource::Csv => {
            let report = load_csv(cfg)?;
            let trades = report.instrument(cfg.input.instrument.as_deref())?.to_vec();
            let mut info = ingest_summary(&report);
            info["source"] = json!("csv");
            (trades, cfg.input.schema.session_seconds()?, info)
        }
    };
    let shuffle_seed = seeds.stage("clock/shuffle");
    let max_lag = cfg.estimators.max_lag;

    let mut binned = Vec::new();
    let mut n_per_bin = None;
    for mode in ClockMode::ALL {
        let spec = cfg.clock.spec(mode, session_seconds, shuffle_seed);
        let stage = format!("clock/{}", mode.name());
        if mode == ClockMode::TransactionTime {
            n_per_bin = Some(match spec.n_per_bin {
                Some(n) => n,
                None => mean_transactions_per_bin(&trades, &spec).map_err(at_stage(&stage))?,
            });
        }
        let b = bin_trades(&trades, &spec).map_err(at_stage(&stage))?;
        let abs = b.abs_returns();
        let est = acf(&abs, max_lag).map_err(at_stage(&format!("acf/{}", mode.name())))?;
        binned.push((mode, b, abs, est));
    }

    let mut acf_t = Table::new(
        "subordination_acf",
        &["lag", "real_time", "transaction_time", "shuffled_transaction_time"],
    );
    for lag in 1..=max_lag {
        let mut r = row![lag];
        r.extend(binned.iter().map(|(_, _, _, e)| row![e.at(lag)].remove(0)));
        acf_t.push(r);
    }

    let thresholds = log_spaced_thresholds(&binned[0].2, cfg.estimators.ccdf_points)
        .map_err(at_stage("ccdf/real_time"))?;
    let curves: Vec<CcdfEstimate> = binned
        .iter()
        .map(|(m, _, abs, _)| ccdf(abs, &thresholds).map_err(at_stage(&format!("ccdf/{}", m.name()))))
        .collect::<RunResult<_>>()?;
    let mut ccdf_t = Table::new(
        "subordination_ccdf",
        &["threshold", "real_time", "transaction_time", "shuffled_transaction_time"],
    );
    for (i, x) in thresholds.iter().enumerate() {
        ccdf_t.push(row![*x, curves[0].probabilities[i], curves[1].probabilities[i], curves[2].probabilities[i]]);
    }

    let mut bins_t = Table::new(
        "subordination_bins",
        &["clock", "bins", "transactions", "dropped_transactions", "mean_abs_return"],
    );
    let mut clocks = serde_json::Map::new();
    for (mode, b, abs, est) in &binned {
        let dropped: usize = b.sessions.iter().map(|s| s.dropped_count).sum();
        let mean_abs = abs.iter().sum::<f64>() / abs.len() as f64;
        bins_t.push(row![mode.name(), b.len(), b.total_count(), dropped, mean_abs]);
        clocks.insert(
            mode.name().into(),
            json!({
                "bins": b.len(),
                "acf_lag1": est.at(1),
                "mean_abs_return": mean_abs,
            }),
        );
    }
    let acf1 = |i: usize| binned[i].3.at(1).unwrap_or(f64::NAN);
    let summary = json!({
        "clocks": clocks,
        "transactions_per_bin": n_per_bin,
        "sessions": binned[0].1.sessions.len(),
        "session_seconds": session_seconds,
        "transaction_over_real_lag1": finite_or_null(acf1(1) / acf1(0)),
        "shuffled_over_real_lag1": finite_or_null(acf1(2) / acf1(0)),
    });
    Ok((vec![acf_t, ccdf_t, bins_t], summary, input))
}

// ---------------------------------------------------------------------------
// before/after panels

const WINDOWS: [&str; 2] = ["before", "after"];

struct Instrument {
    label: String,
    /// Real-time bin returns, before and after.
    returns: [Vec<f64>; 2],
}

fn real_time_returns(trades: &[TradeRecord], cfg: &ExperimentConfig, session_seconds: f64, stage: &str) -> RunResult<Vec<f64>> {
    let spec = cfg.clock.spec(ClockMode::RealTime, session_seconds, 0);
    Ok(bin_real_time(trades, &spec).map_err(at_stage(stage))?.returns)
}

fn panel_inputs(cfg: &ExperimentConfig, seeds: &mut Seeds) -> RunResult<(Vec<Instrument>, Value)> {
    match cfg.input.source {
        InputSource::Synthetic => {
            let base = cfg.synth_params();
            let r = &cfg.regimes;
            let ticks = [r.before_tick, r.after_tick];
            let mut out = Vec::new();
            for i in 1..=r.instruments {
                let label = format!("S{i:02}");
                let seed = seeds.stage(&format!("synth/{label}"));
                let mut returns: [Vec<f64>; 2] = Default::default();
                for (w, tick) in ticks.iter().enumerate() {
                    let params = TradeStreamParams {
                        tick: (*tick > 0.0).then_some(*tick),
                        ..base.clone()
                    };
                    let trades = synth_stream(&params, seed)?;
                    let stage = format!("clock/{label}/{}", WINDOWS[w]);
                    returns[w] = real_time_returns(&trades, cfg, base.session_seconds, &stage)?;
                }
                out.push(Instrument { label, returns });
            }
            let info = json!({
                "source": "synthetic",
                "instruments": r.instruments,
                "ticks": { "before": r.before_tick, "after": r.after_tick },
            });
            Ok((out, info))
        }
        InputSource::Csv => {
            let report = load_csv(cfg)?;
            let session_seconds = cfg.input.schema.session_seconds()?;
            let mut out = Vec::new();
            let mut windows_info = BTreeMap::new();
            for (label, trades) in &report.instruments {
                let (before, after) = split_windows(cfg, label, trades)?;
                let mut returns: [Vec<f64>; 2] = Default::default();
                for (w, part) in [before, after].iter().enumerate() {
                    let stage = format!("clock/{label}/{}", WINDOWS[w]);
                    returns[w] = real_time_returns(part, cfg, session_seconds, &stage)?;
                }
                windows_info.insert(
                    label.clone(),
                    json!({ "before_trades": before.len(), "after_trades": after.len() }),
                );
                out.push(Instrument {
                    label: label.clone(),
                    returns,
                });
            }
            let mut info = ingest_summary(&report);
            info["source"] = json!("csv");
            info["windows"] = json!(windows_info);
            Ok((out, info))
        }
    }
}

/// Before/after trades of one instrument. Trades are sorted by session.
fn split_windows<'a>(
    cfg: &ExperimentConfig,
    label: &str,
    trades: &'a [TradeRecord],
) -> RunResult<(&'a [TradeRecord], &'a [TradeRecord])> {
    let pick = |lo: i64, hi: i64| -> &'a [TradeRecord] {
        let a = trades.partition_point(|t| t.session < lo);
        let b = trades.partition_point(|t| t.session <= hi);
        &trades[a..b.max(a)]
    };
    let w = &cfg.windows;
    let (before, after) = match (&w.before, &w.after) {
        (Some(b), Some(a)) => {
            let range = |r: &crate::config::DateRange| -> RunResult<(i64, i64)> {
                Ok((session_of(parse_date(&r.start)?), session_of(parse_date(&r.end)?)))
            };
            let (b0, b1) = range(b)?;
            let (a0, a1) = range(a)?;
            (pick(b0, b1), pick(a0, a1))
        }
        _ => {
            let mut sessions: Vec<i64> = trades.iter().map(|t| t.session).collect();
            sessions.dedup();
            let cut = (w.split_fraction * sessions.len() as f64).floor() as usize;
            if cut == 0 || cut >= sessions.len() {
                return Err(RunError::data(
                    "windows",
                    format!(
                        "instrument {label}: {} sessions cannot be split at fraction {}",
                        sessions.len(),
                        w.split_fraction
                    ),
                ));
            }
            let at = trades.partition_point(|t| t.session < sessions[cut]);
            (&trades[..at], &trades[at..])
        }
    };
    for (name, part) in [("before", before), ("after", after)] {
        if part.is_empty() {
            return Err(RunError::data(
                "windows",
                format!("instrument {label}: no trades in the {name} window"),
            ));
        }
    }
    Ok((before, after))
}

#[derive(Default)]
struct WindowEstimates {
    n: usize,
    p0: Option<f64>,
    hill: Option<HillEstimate>,
    ccdf: Option<CcdfEstimate>,
    acf: Option<AcfEstimate>,
    dfa: Option<DfaEstimate>,
}

fn panel(cfg: &ExperimentConfig, seeds: &mut Seeds) -> RunResult<(Vec<Table>, Value, Value)> {
    let (instruments, input) = panel_inputs(cfg, seeds)?;
    let want_dist = matches!(cfg.kind, ExperimentKind::DistributionCompare | ExperimentKind::PanelTest);
    let want_acf = matches!(cfg.kind, ExperimentKind::AcfCompare | ExperimentKind::PanelTest);
    let est_cfg = &cfg.estimators;
    let dfa = est_cfg.dfa();

    // estimates[i][w]
    let mut estimates: Vec<[WindowEstimates; 2]> = Vec::new();
    for inst in &instruments {
        let thresholds = if want_dist {
            let pooled: Vec<f64> = inst.returns.concat();
            Some(log_spaced_thresholds(&pooled, est_cfg.ccdf_points).map_err(at_stage(&format!("ccdf/{}", inst.label)))?)
        } else {
            None
        };
        let mut pair: [WindowEstimates; 2] = Default::default();
        for (w, r) in inst.returns.iter().enumerate() {
            let tag = format!("{}/{}", inst.label, WINDOWS[w]);
            let e = &mut pair[w];
            e.n = r.len();
            if let Some(th) = &thresholds {
                e.p0 = Some(zero_frequency(r).map_err(at_stage(&format!("p0/{tag}")))?.p0);
                e.hill = Some(hill(r, est_cfg.tail_fraction).map_err(at_stage(&format!("hill/{tag}")))?);
                e.ccdf = Some(ccdf(r, th).map_err(at_stage(&format!("ccdf/{tag}")))?);
            }
            if want_acf {
                let abs: Vec<f64> = r.iter().map(|x| x.abs()).collect();
                e.acf = Some(acf(&abs, est_cfg.max_lag).map_err(at_stage(&format!("acf/{tag}")))?);
                e.dfa = Some(dfa.estimate(&abs).map_err(at_stage(&format!("dfa/{tag}")))?);
            }
        }
        estimates.push(pair);
    }

    let mut statistics = Vec::new();
    if want_dist {
        statistics.extend([Statistic::ZeroFrequency, Statistic::HillAlpha]);
    }
    if want_acf {
        statistics.extend((1..=est_cfg.max_lag).map(Statistic::Rho));
        statistics.push(Statistic::Hurst);
    }
    let value_of = |e: &WindowEstimates, s: Statistic| -> f64 {
        match s {
            Statistic::ZeroFrequency => e.p0.unwrap_or(f64::NAN),
            Statistic::HillAlpha => e.hill.map_or(f64::NAN, |h| h.alpha_h),
            Statistic::Rho(k) => e.acf.as_ref().and_then(|a| a.at(k)).unwrap_or(f64::NAN),
            Statistic::Hurst => e.dfa.as_ref().map_or(f64::NAN, |d| d.hurst),
        }
    };

    let mut diff_t = Table::new(
        "panel_differences",
        &["statistic", "lag", "instrument", "before", "after", "difference"],
    );
    let mut test_t = Table::new(
        "ttests",
        &["statistic", "lag", "alternative", "n", "mean", "sd", "t_stat", "dof", "p_value"],
    );
    let mut tests_json = Vec::new();
    for &stat in &statistics {
        let side = |w: usize| -> Vec<(String, f64)> {
            instruments
                .iter()
                .zip(&estimates)
                .map(|(inst, e)| (inst.label.clone(), value_of(&e[w], stat)))
                .collect()
        };
        let stage = format!("ttest/{stat}");
        let p = build_panel(stat, &side(0), &side(1)).map_err(at_stage(&stage))?;
        for i in 0..p.len() {
            diff_t.push(row![stat.label(), stat.lag(), p.labels[i], p.before[i], p.after[i], p.differences[i]]);
        }
        let t: TTestResult = paired_one_sided_ttest(&p, stat.reduction_alternative()).map_err(at_stage(&stage))?;
        test_t.push(row![stat.label(), stat.lag(), t.alternative.name(), t.n, t.mean, t.sd, t.t_stat, t.dof, t.p_value]);
        tests_json.push(json!({
            "statistic": stat.to_string(),
            "alternative": t.alternative.name(),
            "n": t.n,
            "mean": t.mean,
            "sd": t.sd,
            "t_stat": t.t_stat,
            "dof": t.dof,
            "p_value": t.p_value,
        }));
    }

    let mut tables = Vec::new();
    if want_dist {
        let mut summary_t = Table::new(
            "distribution_summary",
            &["instrument", "window", "n_returns", "p0", "alpha_h", "alpha_h_ci95", "k_tail", "tail_threshold"],
        );
        let mut ccdf_t = Table::new("distribution_ccdf", &["instrument", "window", "threshold", "probability"]);
        for (inst, pair) in instruments.iter().zip(&estimates) {
            for (w, e) in pair.iter().enumerate() {
                let h = e.hill.expect("hill computed");
                summary_t.push(row![inst.label, WINDOWS[w], e.n, e.p0, h.alpha_h, h.ci95, h.k_tail, h.threshold]);
                let c = e.ccdf.as_ref().expect("ccdf computed");
                for (x, p) in c.thresholds.iter().zip(&c.probabilities) {
                    ccdf_t.push(row![inst.label, WINDOWS[w], *x, *p]);
                }
            }
        }
        tables.push(ccdf_t);
        tables.push(summary_t);
    }
    if want_acf {
        let mut acf_t = Table::new("acf", &["instrument", "window", "lag", "rho"]);
        let mut hurst_t = Table::new(
            "hurst",
            &["instrument", "window", "hurst", "fit_stderr", "gamma", "min_window", "max_window", "n_windows"],
        );
        let mut fluct_t = Table::new("dfa_fluctuation", &["instrument", "window", "window_size", "fluctuation"]);
        for (inst, pair) in instruments.iter().zip(&estimates) {
            for (w, e) in pair.iter().enumerate() {
                let a = e.acf.as_ref().expect("acf computed");
                for (lag, rho) in a.lags.iter().zip(&a.rho) {
                    acf_t.push(row![inst.label, WINDOWS[w], *lag, *rho]);
                }
                let d = e.dfa.as_ref().expect("dfa computed");
                hurst_t.push(row![
                    inst.label,
                    WINDOWS[w],
                    d.hurst,
                    d.fit_stderr,
                    d.gamma(),
                    d.window_sizes[0],
                    d.window_sizes[d.window_sizes.len() - 1],
                    d.window_sizes.len()
                ]);
                for (s, f) in d.window_sizes.iter().zip(&d.fluctuation) {
                    fluct_t.push(row![inst.label, WINDOWS[w], *s, *f]);
                }
            }
        }
        tables.extend([acf_t, hurst_t, fluct_t]);
    }
    tables.push(diff_t);
    tables.push(test_t);

    let per_instrument: BTreeMap<String, Value> = instruments
        .iter()
        .zip(&estimates)
        .map(|(inst, pair)| {
            let window = |e: &WindowEstimates| {
                json!({
                    "n_returns": e.n,
                    "p0": e.p0,
                    "alpha_h": e.hill.map(|h| h.alpha_h),
                    "rho_lag1": e.acf.as_ref().and_then(|a| a.at(1)),
                    "hurst": e.dfa.as_ref().map(|d| d.hurst),
                })
            };
            (inst.label.clone(), json!({ "before": window(&pair[0]), "after": window(&pair[1]) }))
        })
        .collect();
    let summary = json!({
        "instruments": per_instrument,
        "ttests": tests_json,
    });
    Ok((tables, summary, input))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_seeds_are_recorded_and_independent() {
        let mut a = Seeds::new(1);
        let x = a.stage("synth");
        let mut b = Seeds::new(1);
        b.stage("extra");
        assert_eq!(b.stage("synth"), x);
        assert_eq!(a.issued.len(), 1);
        assert_ne!(a.stage("clock/shuffle"), x);
    }

    #[test]
    fn small_arch_sweep_tables() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ArchSweep, 4);
        cfg.arch.n = 4096;
        cfg.sweep.n_seeds = 4;
        cfg.sweep.delta_multiples = vec![0.0, 1.0];
        let bundle = compute_experiment(&cfg).unwrap();
        let acf_t = bundle.table("arch_sweep_acf").unwrap();
        assert_eq!(acf_t.rows.len(), 2 * 10);
        assert_eq!(acf_t.column("delta_multiple").unwrap()[0], "0.0");
        assert_eq!(bundle.table("arch_sweep_zero").unwrap().rows.len(), 2);
        assert_eq!(bundle.manifest["kind"], "arch_sweep");
        assert_eq!(bundle.manifest["config"]["arch"]["alpha1"], 0.9);
        assert!(bundle.manifest["rng"]["stage_seeds"]["arch"].is_u64());
    }
}
