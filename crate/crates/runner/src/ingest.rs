//! Trade CSV ingestion.
//!
//! Each row becomes a [`TradeRecord`] whose session is the local calendar
//! day (days since 1970-01-01) and whose timestamp is seconds since the
//! session open. Rows outside session hours are skipped, rows with a
//! non-positive price are rejected, and unparseable rows are counted as
//! malformed; more than 1% malformed rows aborts the load.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};
use tickdiff::clocks::TradeRecord;

use crate::error::{RunError, RunResult};

const STAGE: &str = "ingest";
const MAX_MALFORMED_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TradeCsvSchema {
    pub timestamp_column: String,
    pub price_column: String,
    pub size_column: Option<String>,
    pub instrument_column: Option<String>,
    /// Integer session-id column. When set, the timestamp column holds
    /// seconds since the session open instead of a calendar time.
    pub session_column: Option<String>,
    /// `iso8601`, `epoch` (seconds, possibly fractional) or a chrono
    /// `strftime` pattern.
    pub timestamp_format: String,
    pub session_open: String,
    pub session_close: String,
    /// Offset applied to epoch and zoned timestamps to get local time.
    pub utc_offset_minutes: i32,
    /// Instrument name used when there is no instrument column.
    pub default_instrument: String,
}

impl Default for TradeCsvSchema {
    fn default() -> Self {
        Self {
            timestamp_column: "timestamp".into(),
            price_column: "price".into(),
            size_column: None,
            instrument_column: None,
            session_column: None,
            timestamp_format: "iso8601".into(),
            session_open: "09:30:00".into(),
            session_close: "16:00:00".into(),
            utc_offset_minutes: 0,
            default_instrument: "default".into(),
        }
    }
}

fn parse_clock(s: &str, field: &str) -> RunResult<NaiveTime> {
    NaiveTime::parse_from_str(s, "%H:%M:%S")
        .or_else(|_| NaiveTime::parse_from_str(s, "%H:%M"))
        .map_err(|e| RunError::Config(format!("{field} `{s}`: {e}")))
}

fn seconds_of_day(t: NaiveTime) -> f64 {
    f64::from(t.num_seconds_from_midnight()) + f64::from(t.nanosecond()) * 1e-9
}

impl TradeCsvSchema {
    pub fn open_close(&self) -> RunResult<(f64, f64)> {
        let open = seconds_of_day(parse_clock(&self.session_open, "session_open")?);
        let close = seconds_of_day(parse_clock(&self.session_close, "session_close")?);
        if close <= open {
            return Err(RunError::Config(format!(
                "session_close {} is not after session_open {}",
                self.session_close, self.session_open
            )));
        }
        Ok((open, close))
    }

    pub fn session_seconds(&self) -> RunResult<f64> {
        let (open, close) = self.open_close()?;
        Ok(close - open)
    }

    fn parse_timestamp(&self, raw: &str) -> Result<NaiveDateTime, String> {
        let raw = raw.trim();
        let offset = chrono::Duration::minutes(i64::from(self.utc_offset_minutes));
        match self.timestamp_format.as_str() {
            "epoch" => {
                let secs: f64 = raw.parse().map_err(|_| format!("bad epoch seconds `{raw}`"))?;
                if !secs.is_finite() {
                    return Err(format!("bad epoch seconds `{raw}`"));
                }
                let whole = secs.floor();
                let nanos = ((secs - whole) * 1e9).round().min(999_999_999.0) as u32;
                DateTime::from_timestamp(whole as i64, nanos)
                    .map(|dt| dt.naive_utc() + offset)
                    .ok_or_else(|| format!("epoch seconds out of range `{raw}`"))
            }
            "iso8601" => {
                if let Ok(dt) = DateTime::parse_from_rfc3339(raw) {
                    return Ok(dt.naive_utc() + offset);
                }
                NaiveDateTime::parse_from_str(raw, "%Y-%m-%dT%H:%M:%S%.f")
                    .or_else(|_| NaiveDateTime::parse_from_str(raw, "%Y-%m-%d %H:%M:%S%.f"))
                    .map_err(|_| format!("bad ISO-8601 timestamp `{raw}`"))
            }
            pattern => NaiveDateTime::parse_from_str(raw, pattern)
                .map_err(|e| format!("timestamp `{raw}` does not match `{pattern}`: {e}")),
        }
    }
}

/// Where a row falls: calendar time, or an explicit session and offset.
enum When {
    Calendar(NaiveDateTime),
    Session(i64, f64),
}

/// Session id of a calendar day: days since 1970-01-01.
pub fn session_of(date: NaiveDate) -> i64 {
    date.signed_duration_since(NaiveDate::from_ymd_opt(1970, 1, 1).expect("epoch date"))
        .num_days()
}

pub fn parse_date(s: &str) -> RunResult<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d")
        .map_err(|e| RunError::Config(format!("date `{s}` is not YYYY-MM-DD: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowIssue {
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    /// Trades per instrument, sorted by (session, timestamp).
    pub instruments: BTreeMap<String, Vec<TradeRecord>>,
    pub rows: usize,
    pub malformed: Vec<RowIssue>,
    pub rejected: Vec<RowIssue>,
    pub out_of_session: usize,
    pub warnings: Vec<String>,
}

impl IngestReport {
    pub fn accepted(&self) -> usize {
        self.instruments.values().map(Vec::len).sum()
    }

    /// Trades of one instrument, or of the only instrument when `name` is
    /// `None`.
    pub fn instrument(&self, name: Option<&str>) -> RunResult<&[TradeRecord]> {
        match name {
            Some(n) => self
                .instruments
                .get(n)
                .map(Vec::as_slice)
                .ok_or_else(|| RunError::data(STAGE, format!("instrument `{n}` not found"))),
            None if self.instruments.len() == 1 => {
                Ok(self.instruments.values().next().expect("one instrument"))
            }
            None => Err(RunError::data(
                STAGE,
                format!(
                    "{} instruments in file; pick one of {:?}",
                    self.instruments.len(),
                    self.instruments.keys().collect::<Vec<_>>()
                ),
            )),
        }
    }
}

pub fn load_trades_csv(path: &Path, schema: &TradeCsvSchema) -> RunResult<IngestReport> {
    let file = std::fs::File::open(path)
        .map_err(|e| RunError::data(STAGE, format!("cannot open {}: {e}", path.display())))?;
    read_trades(file, schema)
}

struct Columns {
    timestamp: usize,
    price: usize,
    size: Option<usize>,
    instrument: Option<usize>,
    session: Option<usize>,
}

fn locate_columns(headers: &csv::StringRecord, schema: &TradeCsvSchema) -> RunResult<Columns> {
    let find = |name: &str| -> RunResult<usize> {
        headers.iter().position(|h| h.trim() == name).ok_or_else(|| {
            RunError::data(
                STAGE,
                format!(
                    "schema: column `{name}` not in header {:?}",
                    headers.iter().collect::<Vec<_>>()
                ),
            )
        })
    };
    Ok(Columns {
        timestamp: find(&schema.timestamp_column)?,
        price: find(&schema.price_column)?,
        size: schema.size_column.as_deref().map(find).transpose()?,
        instrument: schema.instrument_column.as_deref().map(find).transpose()?,
        session: schema.session_column.as_deref().map(find).transpose()?,
    })
}

pub fn read_trades<R: Read>(reader: R, schema: &TradeCsvSchema) -> RunResult<IngestReport> {
    let (open, close) = schema.open_close()?;
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| RunError::data(STAGE, format!("schema: unreadable header: {e}")))?
        .clone();
    let cols = locate_columns(&headers, schema)?;

    let mut report = IngestReport::default();
    // (instrument) -> rows in file order
    let mut staged: BTreeMap<String, Vec<TradeRecord>> = BTreeMap::new();
    for result in rdr.records() {
        report.rows += 1;
        let record = match result {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                report.malformed.push(RowIssue {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        let parsed = (|| -> Result<(String, When, f64, Option<u64>), String> {
            let field = |i: usize| record.get(i).ok_or_else(|| format!("missing field {}", i + 1));
            let ts = match cols.session {
                Some(i) => {
                    let raw_s = field(i)?;
                    let session: i64 = raw_s.parse().map_err(|_| format!("bad session `{raw_s}`"))?;
                    let raw_t = field(cols.timestamp)?;
                    let secs: f64 = raw_t
                        .parse()
                        .map_err(|_| format!("bad seconds since open `{raw_t}`"))?;
                    if !secs.is_finite() {
                        return Err(format!("bad seconds since open `{raw_t}`"));
                    }
                    When::Session(session, secs)
                }
                None => When::Calendar(schema.parse_timestamp(field(cols.timestamp)?)?),
            };
            let raw_price = field(cols.price)?;
            let price: f64 = raw_price
                .parse()
                .map_err(|_| format!("bad price `{raw_price}`"))?;
            if !price.is_finite() {
                return Err(format!("non-finite price `{raw_price}`"));
            }
            let size = match cols.size {
                Some(i) => {
                    let raw = field(i)?;
                    if raw.is_empty() {
                        None
                    } else {
                        Some(raw.parse::<u64>().map_err(|_| format!("bad size `{raw}`"))?)
                    }
                }
                None => None,
            };
            let instrument = match cols.instrument {
                Some(i) => field(i)?.to_string(),
                None => schema.default_instrument.clone(),
            };
            Ok((instrument, ts, price, size))
        })();
        let (instrument, ts, price, size) = match parsed {
            Ok(v) => v,
            Err(reason) => {
                report.malformed.push(RowIssue { line, reason });
                continue;
            }
        };
        if price <= 0.0 {
            log::warn!("line {line}: rejected non-positive price {price}");
            report.rejected.push(RowIssue {
                line,
                reason: format!("non-positive price {price}"),
            });
            continue;
        }
        let (session, offset) = match ts {
            When::Calendar(dt) => (session_of(dt.date()), seconds_of_day(dt.time()) - open),
            When::Session(s, secs) => (s, secs),
        };
        if offset < 0.0 || offset > close - open {
            report.out_of_session += 1;
            continue;
        }
        staged.entry(instrument).or_default().push(TradeRecord {
            session,
            timestamp: offset,
            price,
            size,
        });
    }

    if report.rows > 0 {
        let frac = report.malformed.len() as f64 / report.rows as f64;
        if frac > MAX_MALFORMED_FRACTION {
            let sample: Vec<String> = report
                .malformed
                .iter()
                .take(10)
                .map(|r| format!("line {}: {}", r.line, r.reason))
                .collect();
            return Err(RunError::data(
                STAGE,
                format!(
                    "{} of {} rows malformed ({:.2}% > 1%); first issues: {}",
                    report.malformed.len(),
                    report.rows,
                    100.0 * frac,
                    sample.join("; ")
                ),
            ));
        }
    }
    for issue in &report.malformed {
        log::warn!("line {}: skipped malformed row: {}", issue.line, issue.reason);
    }

    for (name, mut trades) in staged {
        let ordered = trades
            .windows(2)
            .all(|w| (w[0].session, w[0].timestamp) <= (w[1].session, w[1].timestamp));
        if !ordered {
            trades.sort_by(|a, b| {
                a.session
                    .cmp(&b.session)
                    .then(a.timestamp.total_cmp(&b.timestamp))
            });
            let msg = format!("instrument {name}: out-of-order timestamps, stable-sorted");
            log::warn!("{msg}");
            report.warnings.push(msg);
        }
        report.instruments.insert(name, trades);
    }
    Ok(report)
}
