//! Trade-file parsing and resampling into fixed-interval bins.
//!
//! Bins are anchored at `t_start` and right-open: bin `k` covers
//! `[t_start + k dt, t_start + (k+1) dt)`. Empty bins carry the previous
//! close forward, so their return is zero. Bins before the first trade are
//! dropped; the first bin that holds a trade is the *base* bin whose close
//! anchors the first return. Volume and count of the base bin are kept in
//! [`BaseBin`] so that the triple stays index-aligned with the returns.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{MfxError, Result};
use crate::numeric::CompensatedSum;
use crate::series::Series;

/// Minimum number of bins shared by an aligned pair.
pub const MIN_OVERLAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeRecord {
    pub trade_id: i64,
    pub price: f64,
    pub qty: f64,
    /// Epoch milliseconds.
    pub timestamp: i64,
}

/// Column layout of a delimiter-separated trade file (0-based columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TradeFormat {
    pub id_col: usize,
    pub price_col: usize,
    pub qty_col: usize,
    pub time_col: usize,
    pub delimiter: u8,
    pub has_header: bool,
}

impl TradeFormat {
    /// Binance trade export order:
    /// `id, price, qty, quote_qty, time_ms, is_buyer_maker, is_best_match`.
    pub fn binance() -> Self {
        Self {
            id_col: 0,
            price_col: 1,
            qty_col: 2,
            time_col: 4,
            delimiter: b',',
            has_header: false,
        }
    }

    /// Binance aggregate-trade export order:
    /// `agg_id, price, qty, first_id, last_id, time_ms, is_buyer_maker, is_best_match`.
    pub fn binance_agg() -> Self {
        Self {
            time_col: 5,
            ..Self::binance()
        }
    }

    /// Four columns: `id, price, qty, time_ms`.
    pub fn compact() -> Self {
        Self {
            time_col: 3,
            ..Self::binance()
        }
    }
}

impl Default for TradeFormat {
    fn default() -> Self {
        Self::binance()
    }
}

fn field<'a>(rec: &'a csv::StringRecord, col: usize, line: u64, name: &str) -> Result<&'a str> {
    rec.get(col)
        .map(str::trim)
        .ok_or_else(|| MfxError::MalformedRow {
            line,
            reason: format!("missing {name} column {col}"),
        })
}

fn number<T: std::str::FromStr>(s: &str, line: u64, name: &str) -> Result<T> {
    s.parse().map_err(|_| MfxError::MalformedRow {
        line,
        reason: format!("bad {name} {s:?}"),
    })
}

/// Parses trade rows and returns them sorted by `(timestamp, trade_id)`.
pub fn parse_trades<R: Read>(reader: R, format: &TradeFormat) -> Result<Vec<TradeRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(format.delimiter)
        .has_headers(format.has_header)
        .flexible(true)
        .from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| MfxError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            reason: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let price: f64 = number(field(&rec, format.price_col, line, "price")?, line, "price")?;
        if !price.is_finite() {
            return Err(MfxError::MalformedRow {
                line,
                reason: "non-finite price".into(),
            });
        }
        if price <= 0.0 {
            return Err(MfxError::NonPositivePrice(line));
        }
        let qty: f64 = number(field(&rec, format.qty_col, line, "qty")?, line, "qty")?;
        if !(qty >= 0.0 && qty.is_finite()) {
            return Err(MfxError::MalformedRow {
                line,
                reason: format!("bad qty {qty}"),
            });
        }
        out.push(TradeRecord {
            trade_id: number(field(&rec, format.id_col, line, "id")?, line, "id")?,
            price,
            qty,
            timestamp: number(
                field(&rec, format.time_col, line, "timestamp")?,
                line,
                "timestamp",
            )?,
        });
    }
    out.sort_by_key(|t| (t.timestamp, t.trade_id));
    if !is_sorted(&out) {
        return Err(MfxError::UnsortedAfterSort);
    }
    Ok(out)
}

fn is_sorted(trades: &[TradeRecord]) -> bool {
    trades.windows(2).all(|w| w[0].timestamp <= w[1].timestamp)
}

/// Sampling interval in integer milliseconds.
pub fn dt_to_millis(dt: f64) -> Result<i64> {
    let ms = dt * 1000.0;
    if dt.is_nan()
        || dt <= 0.0
        || !ms.is_finite()
        || (ms - ms.round()).abs() > 1e-6
        || ms.round() < 1.0
    {
        return Err(MfxError::NonPositiveDt(dt));
    }
    Ok(ms.round() as i64)
}

/// Raw per-bin aggregates before return construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeBins {
    pub t_start: i64,
    pub dt_ms: i64,
    pub count: Vec<u64>,
    pub volume: Vec<f64>,
    /// Price of the last trade in the bin, if any.
    pub last_price: Vec<Option<f64>>,
}

/// Incremental binning for inputs too large to hold at once. Trades must
/// arrive in nondecreasing timestamp order; those outside the window are
/// skipped.
#[derive(Debug, Clone)]
pub struct TradeBinner {
    t_start: i64,
    t_end: i64,
    dt_ms: i64,
    count: Vec<u64>,
    volume: Vec<CompensatedSum>,
    last_price: Vec<Option<f64>>,
    last_ts: i64,
}

impl TradeBinner {
    pub fn new(dt: f64, t_start: i64, t_end: i64) -> Result<Self> {
        if t_start >= t_end {
            return Err(MfxError::InvalidWindow(format!(
                "start {t_start} not before end {t_end}"
            )));
        }
        let dt_ms = dt_to_millis(dt)?;
        let nbins = ((t_end - t_start) + dt_ms - 1) / dt_ms;
        let nbins = nbins as usize;
        Ok(Self {
            t_start,
            t_end,
            dt_ms,
            count: vec![0; nbins],
            volume: vec![CompensatedSum::new(); nbins],
            last_price: vec![None; nbins],
            last_ts: i64::MIN,
        })
    }

    pub fn push(&mut self, t: &TradeRecord) -> Result<()> {
        if t.timestamp < self.last_ts {
            return Err(MfxError::UnsortedInput);
        }
        self.last_ts = t.timestamp;
        if t.timestamp >= self.t_start && t.timestamp < self.t_end {
            let k = ((t.timestamp - self.t_start) / self.dt_ms) as usize;
            self.count[k] += 1;
            self.volume[k].add(t.qty);
            self.last_price[k] = Some(t.price);
        }
        Ok(())
    }

    pub fn extend(&mut self, trades: &[TradeRecord]) -> Result<()> {
        trades.iter().try_for_each(|t| self.push(t))
    }

    pub fn finish(self) -> TradeBins {
        TradeBins {
            t_start: self.t_start,
            dt_ms: self.dt_ms,
            count: self.count,
            volume: self.volume.iter().map(|v| v.value()).collect(),
            last_price: self.last_price,
        }
    }
}

/// Counts, volumes and last prices per bin over `[t_start, t_end)`.
pub fn bin_trades(trades: &[TradeRecord], dt: f64, t_start: i64, t_end: i64) -> Result<TradeBins> {
    let mut b = TradeBinner::new(dt, t_start, t_end)?;
    b.extend(trades)?;
    Ok(b.finish())
}

/// The bin whose close anchors the first return.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseBin {
    pub timestamp: i64,
    pub close: f64,
    pub count: u64,
    pub volume: f64,
}

/// Aligned returns, volume and transaction-count series of one asset.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedTriple {
    pub asset: String,
    pub returns: Series,
    pub volume: Series,
    pub count: Series,
    pub base: BaseBin,
}

impl BinnedTriple {
    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.returns.dt()
    }

    pub fn t0(&self) -> i64 {
        self.returns.t0()
    }

    /// Close prices of every bin, rebuilt from the base close and returns.
    pub fn close_prices(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::new();
        self.returns
            .values()
            .iter()
            .map(|r| {
                acc.add(*r);
                self.base.close * acc.value().exp()
            })
            .collect()
    }

    /// Samples `[start, end)`; the base bin moves to the sample before `start`.
    pub fn slice(&self, start: usize, end: usize) -> Result<BinnedTriple> {
        let base = if start == 0 {
            self.base
        } else {
            let r = self.returns.values();
            let mut acc = CompensatedSum::new();
            r[..start].iter().for_each(|v| acc.add(*v));
            BaseBin {
                timestamp: self.returns.timestamp(start - 1),
                close: self.base.close * acc.value().exp(),
                count: self.count.values()[start - 1] as u64,
                volume: self.volume.values()[start - 1],
            }
        };
        Ok(BinnedTriple {
            asset: self.asset.clone(),
            returns: self.returns.slice(start, end)?,
            volume: self.volume.slice(start, end)?,
            count: self.count.slice(start, end)?,
            base,
        })
    }
}

/// `r[i] = ln p[i+1] - ln p[i]`; the output starts at the second sample.
pub fn log_returns(prices: &Series) -> Result<Series> {
    if prices.len() < 2 {
        return Err(MfxError::LengthOne);
    }
    if let Some(i) = prices.values().iter().position(|&p| p <= 0.0) {
        return Err(MfxError::NonPositivePrice(i as u64));
    }
    let logs: Vec<f64> = prices.values().iter().map(|p| p.ln()).collect();
    let r = logs.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(Series::new(r, prices.dt(), prices.timestamp(1))?.with_label(prices.label()))
}

/// Bins trades over `[t_start, t_end)` and builds the aligned triple.
pub fn resample(trades: &[TradeRecord], dt: f64, t_start: i64, t_end: i64) -> Result<BinnedTriple> {
    resample_asset(trades, dt, t_start, t_end, "")
}

pub fn resample_asset(
    trades: &[TradeRecord],
    dt: f64,
    t_start: i64,
    t_end: i64,
    asset: &str,
) -> Result<BinnedTriple> {
    triple_from_bins(&bin_trades(trades, dt, t_start, t_end)?, asset)
}

/// Builds the aligned triple from raw bins.
pub fn triple_from_bins(bins: &TradeBins, asset: &str) -> Result<BinnedTriple> {
    let dt = bins.dt_ms as f64 / 1000.0;
    let base = bins
        .count
        .iter()
        .position(|&c| c > 0)
        .ok_or(MfxError::NoTradesInWindow)?;
    let n = bins.count.len();
    if base + 1 >= n {
        return Err(MfxError::InvalidWindow(
            "no bins after the first traded bin".into(),
        ));
    }
    let mut closes = Vec::with_capacity(n - base);
    let mut last = bins.last_price[base].expect("base bin has a trade");
    for p in &bins.last_price[base..] {
        if let Some(p) = p {
            last = *p;
        }
        closes.push(last);
    }
    let base_ts = bins.t_start + base as i64 * bins.dt_ms;
    let prices = Series::new(closes, dt, base_ts)?;
    let returns = log_returns(&prices)?.with_label(format!("{asset}:returns"));
    let t0 = returns.t0();
    let volume = Series::new(bins.volume[base + 1..].to_vec(), dt, t0)?
        .with_label(format!("{asset}:volume"));
    let count = Series::new(
        bins.count[base + 1..].iter().map(|&c| c as f64).collect(),
        dt,
        t0,
    )?
    .with_label(format!("{asset}:count"));
    Ok(BinnedTriple {
        asset: asset.to_string(),
        returns,
        volume,
        count,
        base: BaseBin {
            timestamp: base_ts,
            close: prices.values()[0],
            count: bins.count[base],
            volume: bins.volume[base],
        },
    })
}

/// Truncates every triple to the common time range.
pub fn align_all(triples: &[BinnedTriple]) -> Result<Vec<BinnedTriple>> {
    let first = triples.first().ok_or(MfxError::EmptyInput)?;
    let dt_ms = dt_to_millis(first.dt())?;
    for t in triples {
        if t.dt() != first.dt() {
            return Err(MfxError::DtMismatch(first.dt(), t.dt()));
        }
        if (t.t0() - first.t0()).rem_euclid(dt_ms) != 0 {
            return Err(MfxError::GridMisaligned);
        }
    }
    let start = triples.iter().map(|t| t.t0()).max().unwrap();
    let end = triples
        .iter()
        .map(|t| t.t0() + t.len() as i64 * dt_ms)
        .min()
        .unwrap();
    let got = if end > start {
        ((end - start) / dt_ms) as usize
    } else {
        0
    };
    if got < MIN_OVERLAP {
        return Err(MfxError::InsufficientOverlap {
            got,
            min: MIN_OVERLAP,
        });
    }
    triples
        .iter()
        .map(|t| {
            let s = ((start - t.t0()) / dt_ms) as usize;
            t.slice(s, s + got)
        })
        .collect()
}

pub fn align_pair(a: &BinnedTriple, b: &BinnedTriple) -> Result<(BinnedTriple, BinnedTriple)> {
    let mut v = align_all(&[a.clone(), b.clone()])?;
    let b = v.pop().unwrap();
    let a = v.pop().unwrap();
    Ok((a, b))
}
