use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tickdiff::arch::{simulate_arch, ArchParams};
use tickdiff::clocks::{bin_trades, ClockMode, ShuffleScope};
use tickdiff::estimators::{acf, ccdf, hill, log_spaced_thresholds, zero_frequency, DfaSettings};
use tickdiff::panel::{build_panel, paired_one_sided_ttest, Alternative, PanelDifference, Statistic};
use tickdiff::rng::stage_seed;
use tickdiff::synth::{synth_trades, TradeStreamParams};
use tickdiff::TickGrid;
use tickdiff_runner::config::{ClockSection, EstimatorSection};
use tickdiff_runner::error::at_stage;
use tickdiff_runner::{read_trades, row, run_experiment, ExperimentConfig, RunError, RunResult, Table};

/// Tick size and price diffusion: simulation, coarse-graining, estimators,
/// subordination clocks and panel t-tests.
///
/// Every subcommand except `run` reads CSV from INPUT (or standard input)
/// and writes CSV to --output (or DIR/<subcommand>.csv with --out, or
/// standard output). Exit codes: 0 success, 2 config error, 3 data error,
/// 4 numerical degeneracy.
#[derive(Parser)]
#[command(name = "tickdiff", version)]
struct Cli {
    /// Experiment config (TOML); its sections also supply defaults to the
    /// single-stage subcommands.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Global seed; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Only log errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an ARCH(1) return path, or a synthetic trade stream with --trades.
    Simulate(SimulateArgs),
    /// Snap a price column onto a tick grid.
    Discretize(DiscretizeArgs),
    /// Run one estimator on a return series.
    Estimate(EstimateArgs),
    /// Bin trades in real, transaction or shuffled transaction time.
    Clock(ClockArgs),
    /// Paired one-sided t-test on before/after values.
    Ttest(TtestArgs),
    /// Run a full experiment from a config file.
    Run(RunArgs),
}

#[derive(Args)]
struct Io {
    /// Input CSV; standard input when absent.
    input: Option<PathBuf>,
    /// Output CSV; standard output when absent (unless --out is given).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    alpha0: Option<f64>,
    #[arg(long)]
    alpha1: Option<f64>,
    /// Path length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    init_price: Option<f64>,
    /// Emit a synthetic trade stream (session,timestamp,price) instead.
    #[arg(long)]
    trades: bool,
    /// Trade-stream preset; the config's [synth] section when absent.
    #[arg(long, value_enum, requires = "trades")]
    preset: Option<Preset>,
    #[arg(long, requires = "trades")]
    sessions: Option<usize>,
    /// Coarse-grain trade prices on this tick grid.
    #[arg(long, requires = "trades")]
    tick: Option<f64>,
    /// Output CSV; standard output when absent (unless --out is given).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Constant rate, ARCH-modulated returns.
    ClusteredReturns,
    /// Doubly-stochastic rate, IID returns.
    ClusteredActivity,
    /// Constant rate, IID returns.
    Iid,
}

#[derive(Args)]
struct DiscretizeArgs {
    /// Tick size (> 0).
    #[arg(long)]
    tick: f64,
    /// Price column to snap; a `return` column, if present, is recomputed.
    #[arg(long, default_value = "price")]
    column: String,
    #[command(flatten)]
    io: Io,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Estimator {
    Ccdf,
    Zero,
    Hill,
    Acf,
    Dfa,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(value_enum)]
    which: Estimator,
    /// Return column; without one, returns are differenced from `price`.
    #[arg(long, default_value = "return")]
    column: String,
    /// ACF and DFA use |r| by default; use the signed returns instead.
    #[arg(long)]
    signed: bool,
    #[arg(long)]
    tail_fraction: Option<f64>,
    #[arg(long)]
    max_lag: Option<usize>,
    /// Number of ccdf thresholds.
    #[arg(long)]
    points: Option<usize>,
    #[arg(long)]
    min_window: Option<usize>,
    #[arg(long)]
    max_window: Option<usize>,
    #[arg(long)]
    windows: Option<usize>,
    /// DFA: print F(s) per scale instead of the summary row.
    #[arg(long)]
    scales: bool,
    #[command(flatten)]
    io: Io,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClockArg {
    Real,
    Transaction,
    Shuffled,
}

#[derive(Args)]
struct ClockArgs {
    #[arg(value_enum)]
    mode: ClockArg,
    #[arg(long)]
    bin_seconds: Option<f64>,
    /// Transaction-time bin size; default is the mean per real-time bin.
    #[arg(long)]
    n_per_bin: Option<usize>,
    /// Shuffle within sessions instead of across the full sample.
    #[arg(long)]
    per_session_shuffle: bool,
    #[arg(long)]
    timestamp_column: Option<String>,
    #[arg(long)]
    price_column: Option<String>,
    /// Integer session column; timestamps are then seconds since the open.
    #[arg(long)]
    session_column: Option<String>,
    #[arg(long)]
    instrument_column: Option<String>,
    /// Instrument to bin when the file holds several.
    #[arg(long)]
    instrument: Option<String>,
    /// `iso8601`, `epoch` or a strftime pattern.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    session_open: Option<String>,
    #[arg(long)]
    session_close: Option<String>,
    #[arg(long)]
    utc_offset_minutes: Option<i32>,
    #[command(flatten)]
    io: Io,
}

#[derive(Args)]
struct TtestArgs {
    /// Statistic the values refer to: p0, alpha_h, hurst or rho:K.
    #[arg(long, default_value = "p0")]
    statistic: String,
    /// Alternative on the mean of after - before; defaults to the direction
    /// a tick-size reduction predicts for the statistic.
    #[arg(long, value_enum)]
    alternative: Option<AltArg>,
    #[command(flatten)]
    io: Io,
}

#[derive(Clone, Copy, ValueEnum)]
enum AltArg {
    Less,
    Greater,
}

#[derive(Args)]
struct RunArgs {
    /// Config file (or --config).
    config_file: Option<PathBuf>,
}

struct Globals {
    config: Option<ExperimentConfig>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

impl Globals {
    fn seed(&self, what: &str) -> RunResult<u64> {
        self.seed
            .or_else(|| self.config.as_ref().and_then(|c| c.seed))
            .ok_or_else(|| RunError::Config(format!("{what} needs a seed: pass --seed or a config with `seed`")))
    }

    fn estimators(&self) -> EstimatorSection {
        self.config.as_ref().map(|c| c.estimators.clone()).unwrap_or_default()
    }

    fn emit(&self, name: &str, output: Option<&Path>, table: &Table) -> RunResult<()> {
        let bytes = table.to_csv_bytes()?;
        let target = match (output, &self.out) {
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(dir)) => {
                fs::create_dir_all(dir)?;
                Some(dir.join(format!("{name}.csv")))
            }
            (None, None) => None,
        };
        match target {
            Some(path) => {
                if let Err(e) = fs::write(&path, &bytes) {
                    let _ = fs::remove_file(&path);
                    return Err(e.into());
                }
                log::info!("wrote {}", path.display());
            }
            None => {
                let mut out = io::stdout().lock();
                match out.write_all(&bytes).and_then(|_| out.flush()) {
                    // downstream closed the pipe (e.g. `| head`)
                    Err(e) if e.kind() == io::ErrorKind::BrokenPipe => {}
                    other => other?,
                }
            }
        }
        Ok(())
    }
}

/// A CSV held in memory: header plus string rows.
struct InputCsv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn read_input_bytes(path: Option<&Path>) -> RunResult<Vec<u8>> {
    let mut buf = Vec::new();
    match path {
        Some(p) => {
            buf = fs::read(p).map_err(|e| RunError::data("input", format!("cannot read {}: {e}", p.display())))?;
        }
        None => {
            io::stdin().lock().read_to_end(&mut buf)?;
        }
    }
    Ok(buf)
}

fn read_csv(path: Option<&Path>) -> RunResult<InputCsv> {
    let bytes = read_input_bytes(path)?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes.as_slice());
    let header = rdr.headers()?.iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.map(|rec| rec.iter().map(String::from).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()?;
    Ok(InputCsv { header, rows })
}

impl InputCsv {
    fn position(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    fn floats(&self, col: usize) -> RunResult<Vec<f64>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let raw = &r[col];
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| {
                        RunError::data(
                            "input",
                            format!("line {}: column `{}` value `{raw}` is not a finite number", i + 2, self.header[col]),
                        )
                    })
            })
            .collect()
    }

    /// Returns from `column`, or price differences when only `price` exists.
    fn returns(&self, column: &str) -> RunResult<Vec<f64>> {
        if let Some(c) = self.position(column) {
            return self.floats(c);
        }
        if let Some(c) = self.position("price") {
            let p = self.floats(c)?;
            return Ok(p.windows(2).map(|w| w[1] - w[0]).collect());
        }
        Err(RunError::data(
            "input",
            format!("no `{column}` or `price` column in header {:?}", self.header),
        ))
    }
}

fn simulate(g: &Globals, a: &SimulateArgs) -> RunResult<()> {
    let seed = g.seed("simulate")?;
    if a.trades {
        let mut params = match a.preset {
            Some(Preset::ClusteredReturns) => TradeStreamParams::clustered_returns(0),
            Some(Preset::ClusteredActivity) => TradeStreamParams::clustered_activity(0),
            Some(Preset::Iid) => TradeStreamParams::default(),
            None => g
                .config
                .as_ref()
                .map(|c| c.synth_params())
                .unwrap_or_else(|| TradeStreamParams::clustered_returns(0)),
        };
        params.seed = stage_seed(seed, "synth");
        if let Some(n) = a.sessions {
            params.n_sessions = n;
        }
        if a.tick.is_some() {
            params.tick = a.tick;
        }
        let trades = synth_trades(&params).map_err(at_stage("synth"))?;
        let mut t = Table::new("trades", &["session", "timestamp", "price"]);
        for tr in &trades {
            t.push(row![tr.session, tr.timestamp, tr.price]);
        }
        return g.emit("trades", a.output.as_deref(), &t);
    }
    let base = g.config.as_ref().map(|c| c.arch.params(0)).unwrap_or_default();
    let params = ArchParams {
        alpha0: a.alpha0.unwrap_or(base.alpha0),
        alpha1: a.alpha1.unwrap_or(base.alpha1),
        n: a.n.unwrap_or(base.n),
        burn_in: a.burn_in.unwrap_or(base.burn_in),
        init_price: a.init_price.unwrap_or(base.init_price),
        seed: stage_seed(seed, "arch"),
        ..base
    };
    let r = simulate_arch(&params).map_err(at_stage("simulate"))?;
    let mut t = Table::new("simulate", &["t", "return", "price"]);
    let mut price = params.init_price;
    for (i, v) in r.values().iter().enumerate() {
        price += v;
        t.push(row![i + 1, *v, price]);
    }
    g.emit("simulate", a.output.as_deref(), &t)
}

fn discretize(g: &Globals, a: &DiscretizeArgs) -> RunResult<()> {
    let grid = TickGrid::new(a.tick).map_err(at_stage("discretize"))?;
    let input = read_csv(a.io.input.as_deref())?;
    let pc = input.position(&a.column).ok_or_else(|| {
        RunError::data("input", format!("no `{}` column in header {:?}", a.column, input.header))
    })?;
    let prices = input.floats(pc)?;
    let rc = input.position("return");
    let returns = rc.map(|c| input.floats(c)).transpose()?;
    let snapped: Vec<f64> = prices.iter().map(|p| grid.snap(*p)).collect();
    let header: Vec<&str> = input.header.iter().map(String::as_str).collect();
    let mut t = Table::new("discretize", &header);
    for (i, row) in input.rows.iter().enumerate() {
        let mut out = row.clone();
        out[pc] = row![snapped[i]].remove(0);
        if let (Some(c), Some(r)) = (rc, &returns) {
            // the price before row i is p_i - r_i
            let prev = if i == 0 { grid.snap(prices[0] - r[0]) } else { snapped[i - 1] };
            out[c] = row![snapped[i] - prev].remove(0);
        }
        t.push(out);
    }
    g.emit("discretize", a.io.output.as_deref(), &t)
}

fn estimate(g: &Globals, a: &EstimateArgs) -> RunResult<()> {
    let mut e = g.estimators();
    if let Some(v) = a.tail_fraction {
        e.tail_fraction = v;
    }
    if let Some(v) = a.max_lag {
        e.max_lag = v;
    }
    if let Some(v) = a.points {
        e.ccdf_points = v;
    }
    if let Some(v) = a.min_window {
        e.dfa_min_window = v;
    }
    if a.max_window.is_some() {
        e.dfa_max_window = a.max_window;
    }
    if let Some(v) = a.windows {
        e.dfa_windows = v;
    }
    let input = read_csv(a.io.input.as_deref())?;
    let mut r = input.returns(&a.column)?;
    if matches!(a.which, Estimator::Acf | Estimator::Dfa) && !a.signed {
        r.iter_mut().for_each(|x| *x = x.abs());
    }
    let out = a.io.output.as_deref();
    match a.which {
        Estimator::Ccdf => {
            let th = log_spaced_thresholds(&r, e.ccdf_points).map_err(at_stage("ccdf"))?;
            let c = ccdf(&r, &th).map_err(at_stage("ccdf"))?;
            let mut t = Table::new("ccdf", &["threshold", "probability"]);
            for (x, p) in c.thresholds.iter().zip(&c.probabilities) {
                t.push(row![*x, *p]);
            }
            g.emit("ccdf", out, &t)
        }
        Estimator::Zero => {
            let z = zero_frequency(&r).map_err(at_stage("zero"))?;
            let mut t = Table::new("zero", &["n", "p0"]);
            t.push(row![z.n, z.p0]);
            g.emit("zero", out, &t)
        }
        Estimator::Hill => {
            let h = hill(&r, e.tail_fraction).map_err(at_stage("hill"))?;
            let mut t = Table::new("hill", &["alpha_h", "ci95", "k_tail", "threshold", "tail_fraction"]);
            t.push(row![h.alpha_h, h.ci95, h.k_tail, h.threshold, e.tail_fraction]);
            g.emit("hill", out, &t)
        }
        Estimator::Acf => {
            let est = acf(&r, e.max_lag).map_err(at_stage("acf"))?;
            let mut t = Table::new("acf", &["lag", "rho"]);
            for (k, v) in est.lags.iter().zip(&est.rho) {
                t.push(row![*k, *v]);
            }
            g.emit("acf", out, &t)
        }
        Estimator::Dfa => {
            let settings = DfaSettings {
                min_window: e.dfa_min_window,
                max_window: e.dfa_max_window,
                n_windows: e.dfa_windows,
            };
            let d = settings.estimate(&r).map_err(at_stage("dfa"))?;
            let t = if a.scales {
                let mut t = Table::new("dfa", &["window_size", "fluctuation"]);
                for (s, f) in d.window_sizes.iter().zip(&d.fluctuation) {
                    t.push(row![*s, *f]);
                }
                t
            } else {
                let mut t = Table::new(
                    "dfa",
                    &["hurst", "fit_stderr", "gamma", "min_window", "max_window", "n_windows"],
                );
                t.push(row![
                    d.hurst,
                    d.fit_stderr,
                    d.gamma(),
                    d.window_sizes[0],
                    d.window_sizes[d.window_sizes.len() - 1],
                    d.window_sizes.len()
                ]);
                t
            };
            g.emit("dfa", out, &t)
        }
    }
}

fn clock(g: &Globals, a: &ClockArgs) -> RunResult<()> {
    let cfg = g.config.as_ref();
    let mut schema = cfg.map(|c| c.input.schema.clone()).unwrap_or_default();
    let overrides = [
        (&a.timestamp_column, &mut schema.timestamp_column),
        (&a.price_column, &mut schema.price_column),
        (&a.format, &mut schema.timestamp_format),
        (&a.session_open, &mut schema.session_open),
        (&a.session_close, &mut schema.session_close),
    ];
    for (flag, field) in overrides {
        if let Some(v) = flag {
            *field = v.clone();
        }
    }
    if a.session_column.is_some() {
        schema.session_column = a.session_column.clone();
    }
    if a.instrument_column.is_some() {
        schema.instrument_column = a.instrument_column.clone();
    }
    if let Some(v) = a.utc_offset_minutes {
        schema.utc_offset_minutes = v;
    }
    let mut section: ClockSection = cfg.map(|c| c.clock.clone()).unwrap_or_default();
    if let Some(v) = a.bin_seconds {
        section.bin_seconds = v;
    }
    if a.n_per_bin.is_some() {
        section.n_per_bin = a.n_per_bin;
    }
    if a.per_session_shuffle {
        section.shuffle_scope = ShuffleScope::PerSession;
    }
    let mode = match a.mode {
        ClockArg::Real => ClockMode::RealTime,
        ClockArg::Transaction => ClockMode::TransactionTime,
        ClockArg::Shuffled => ClockMode::ShuffledTransactionTime,
    };
    let shuffle_seed = match mode {
        ClockMode::ShuffledTransactionTime => stage_seed(g.seed("shuffled clock")?, "clock/shuffle"),
        _ => 0,
    };
    let session_seconds = schema.session_seconds()?;
    let bytes = read_input_bytes(a.io.input.as_deref())?;
    let report = read_trades(bytes.as_slice(), &schema)?;
    let instrument = a.instrument.clone().or_else(|| cfg.and_then(|c| c.input.instrument.clone()));
    let trades = report.instrument(instrument.as_deref())?;
    let spec = section.spec(mode, session_seconds, shuffle_seed);
    let binned = bin_trades(trades, &spec).map_err(at_stage("clock"))?;
    let mut t = Table::new("clock", &["session", "start", "end", "count", "return"]);
    for ((b, c), r) in binned.bounds.iter().zip(&binned.counts).zip(&binned.returns) {
        t.push(row![b.session, b.start, b.end, *c, *r]);
    }
    g.emit("clock", a.io.output.as_deref(), &t)
}

fn parse_statistic(s: &str) -> RunResult<Statistic> {
    match s {
        "p0" => Ok(Statistic::ZeroFrequency),
        "alpha_h" => Ok(Statistic::HillAlpha),
        "hurst" => Ok(Statistic::Hurst),
        other => other
            .strip_prefix("rho:")
            .and_then(|k| k.parse::<usize>().ok())
            .filter(|k| *k >= 1)
            .map(Statistic::Rho)
            .ok_or_else(|| RunError::Config(format!("unknown statistic `{other}` (p0, alpha_h, hurst, rho:K)"))),
    }
}

fn ttest(g: &Globals, a: &TtestArgs) -> RunResult<()> {
    let stat = parse_statistic(&a.statistic)?;
    let alternative = match a.alternative {
        Some(AltArg::Less) => Alternative::Less,
        Some(AltArg::Greater) => Alternative::Greater,
        None => stat.reduction_alternative(),
    };
    let input = read_csv(a.io.input.as_deref())?;
    let labels: Vec<String> = match input.position("instrument") {
        Some(c) => input.rows.iter().map(|r| r[c].clone()).collect(),
        None => (0..input.rows.len()).map(|i| i.to_string()).collect(),
    };
    let panel = match (input.position("before"), input.position("after"), input.position("difference")) {
        (Some(b), Some(af), _) => {
            let pair = |c: usize| -> RunResult<Vec<(String, f64)>> {
                Ok(labels.iter().cloned().zip(input.floats(c)?).collect())
            };
            build_panel(stat, &pair(b)?, &pair(af)?).map_err(at_stage("ttest"))?
        }
        (_, _, Some(d)) => PanelDifference::from_differences(stat, input.floats(d)?),
        _ => {
            return Err(RunError::data(
                "input",
                "ttest needs `before` and `after` columns, or a `difference` column",
            ))
        }
    };
    let r = paired_one_sided_ttest(&panel, alternative).map_err(at_stage("ttest"))?;
    let mut t = Table::new(
        "ttest",
        &["statistic", "alternative", "n", "mean", "sd", "t_stat", "dof", "p_value"],
    );
    t.push(row![stat.to_string(), r.alternative.name(), r.n, r.mean, r.sd, r.t_stat, r.dof, r.p_value]);
    g.emit("ttest", a.io.output.as_deref(), &t)
}

fn run(g: &Globals, a: &RunArgs, config_path: Option<&Path>) -> RunResult<()> {
    let mut cfg = match (&a.config_file, config_path) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(_)) => g.config.clone().expect("config loaded"),
        (None, None) => return Err(RunError::Config("run needs a config file".into())),
    };
    if let Some(s) = g.seed {
        cfg.seed = Some(s);
    }
    if let Some(dir) = &g.out {
        cfg.out_dir = dir.clone();
    }
    let bundle = run_experiment(&cfg)?;
    for t in &bundle.tables {
        log::info!("wrote {} ({} rows)", cfg.out_dir.join(t.file_name()).display(), t.rows.len());
    }
    println!("{}", cfg.out_dir.display());
    Ok(())
}

fn dispatch(cli: &Cli) -> RunResult<()> {
    let config = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    let g = Globals {
        config,
        seed: cli.seed,
        out: cli.out.clone(),
    };
    match &cli.command {
        Command::Simulate(a) => simulate(&g, a),
        Command::Discretize(a) => discretize(&g, a),
        Command::Estimate(a) => estimate(&g, a),
        Command::Clock(a) => clock(&g, a),
        Command::Ttest(a) => ttest(&g, a),
        Command::Run(a) => run(&g, a, cli.config.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tickdiff: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
