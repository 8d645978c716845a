//! `mfx ingest`: trade files to aligned binned triples.

use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate};
use mfx_core::ingest::{
    align_all, dt_to_millis, parse_trades, triple_from_bins, BinnedTriple, TradeBinner,
    TradeFormat, TradeRecord,
};
use mfx_core::io::write_triple;
use mfx_core::stats::{correlation_matrix, pearson_p_value, CorrelationMatrix};
use mfx_core::{MfxError, Series};
use serde::{Deserialize, Serialize};

use crate::cli::{FormatName, IngestArgs};
use crate::{read_text, sha256_hex, write_json, write_text, CliError, CliResult};

pub const MANIFEST: &str = "ingest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
    pub trades: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssetSummary {
    pub asset: String,
    pub files: Vec<InputFile>,
    /// Trades inside the window.
    pub trades_in_window: u64,
    pub t0: i64,
    #[serde(rename = "T")]
    pub len: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IngestManifest {
    pub tool: String,
    pub version: String,
    pub dt: f64,
    pub window_start: i64,
    pub window_end: i64,
    pub format: TradeFormat,
    pub assets: Vec<AssetSummary>,
    /// Why the correlation tables were not written, if they were not.
    pub correlation_skipped: Option<String>,
}

pub fn trade_format(name: FormatName, header: bool, delimiter: char) -> CliResult<TradeFormat> {
    let mut f = match name {
        FormatName::Binance => TradeFormat::binance(),
        FormatName::BinanceAgg => TradeFormat::binance_agg(),
        FormatName::Compact => TradeFormat::compact(),
    };
    f.has_header = header;
    f.delimiter =
        u8::try_from(delimiter).map_err(|_| CliError::invalid("delimiter must be ASCII"))?;
    Ok(f)
}

/// Epoch milliseconds, `YYYY-MM-DD` (midnight UTC) or RFC 3339.
pub fn parse_instant(s: &str) -> CliResult<i64> {
    let s = s.trim();
    if let Ok(ms) = s.parse::<i64>() {
        return Ok(ms);
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d
            .and_hms_opt(0, 0, 0)
            .expect("midnight")
            .and_utc()
            .timestamp_millis());
    }
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.timestamp_millis())
        .map_err(|_| CliError::invalid(format!("bad time {s:?}")))
}

/// Splits `ASSET=FILE[,FILE...]`; a bare path uses its file stem.
pub fn parse_input_spec(spec: &str) -> CliResult<(String, Vec<PathBuf>)> {
    match spec.split_once('=') {
        Some((asset, files)) if !asset.is_empty() => Ok((
            asset.to_string(),
            files.split(',').map(PathBuf::from).collect(),
        )),
        _ => {
            let p = PathBuf::from(spec);
            let stem = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .ok_or_else(|| CliError::invalid(format!("cannot name asset from {spec:?}")))?;
            Ok((stem, vec![p]))
        }
    }
}

fn read_file(path: &Path, format: &TradeFormat) -> CliResult<(Vec<TradeRecord>, InputFile)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let trades = parse_trades(bytes.as_slice(), format)
        .map_err(|e| CliError::from(e).context(path.display().to_string()))?;
    let meta = InputFile {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
        trades: trades.len(),
    };
    Ok((trades, meta))
}

/// First and last trade timestamps over all files.
fn time_span(
    inputs: &[(String, Vec<PathBuf>)],
    format: &TradeFormat,
) -> CliResult<Option<(i64, i64)>> {
    let mut span: Option<(i64, i64)> = None;
    for path in inputs.iter().flat_map(|(_, f)| f) {
        let (trades, _) = read_file(path, format)?;
        if let (Some(a), Some(b)) = (trades.first(), trades.last()) {
            span = Some(match span {
                Some((lo, hi)) => (lo.min(a.timestamp), hi.max(b.timestamp)),
                None => (a.timestamp, b.timestamp),
            });
        }
    }
    Ok(span)
}

/// Series entering the correlation table, in a fixed order per asset.
pub fn correlation_inputs(triples: &[BinnedTriple]) -> (Vec<Series>, Vec<String>) {
    let mut series = Vec::new();
    let mut labels = Vec::new();
    for t in triples {
        let abs = mfx_core::stats::abs_series(&t.returns);
        for (name, s) in [
            ("r", &t.returns),
            ("|r|", &abs),
            ("V", &t.volume),
            ("N", &t.count),
        ] {
            series.push(s.clone());
            labels.push(format!("{}:{name}", t.asset));
        }
    }
    (series, labels)
}

pub fn p_value_csv(m: &CorrelationMatrix, len: usize) -> String {
    let mut out = String::from("label");
    for l in &m.labels {
        out.push(',');
        out.push_str(l);
    }
    out.push('\n');
    for (l, row) in m.labels.iter().zip(&m.values) {
        out.push_str(l);
        for r in row {
            out.push_str(&format!(",{}", pearson_p_value(*r, len)));
        }
        out.push('\n');
    }
    out
}

pub fn run(args: &IngestArgs) -> CliResult<IngestManifest> {
    let format = trade_format(args.format, args.header, args.delimiter)?;
    let dt_ms = dt_to_millis(args.dt)?;
    let inputs = args
        .inputs
        .iter()
        .map(|s| parse_input_spec(s))
        .collect::<CliResult<Vec<_>>>()?;
    let (start, end) = match (&args.start, &args.end) {
        (Some(s), Some(e)) => (parse_instant(s)?, parse_instant(e)?),
        (s, e) => {
            let (first, last) = time_span(&inputs, &format)?.ok_or(MfxError::NoTradesInWindow)?;
            (
                s.as_deref()
                    .map_or(Ok(first.div_euclid(dt_ms) * dt_ms), parse_instant)?,
                e.as_deref()
                    .map_or(Ok((last.div_euclid(dt_ms) + 1) * dt_ms), parse_instant)?,
            )
        }
    };

    // Files of one asset are binned in the order given, one at a time.
    let mut triples = Vec::new();
    let mut summaries = Vec::new();
    for (asset, files) in &inputs {
        let mut binner = TradeBinner::new(args.dt, start, end)?;
        let mut metas = Vec::new();
        let mut in_window = 0u64;
        for path in files {
            let (trades, meta) = read_file(path, &format)?;
            binner
                .extend(&trades)
                .map_err(|e| CliError::from(e).context(path.display().to_string()))?;
            in_window += trades
                .iter()
                .filter(|t| t.timestamp >= start && t.timestamp < end)
                .count() as u64;
            metas.push(meta);
        }
        let t = triple_from_bins(&binner.finish(), asset)
            .map_err(|e| CliError::from(e).context(asset.clone()))?;
        triples.push(t);
        summaries.push(AssetSummary {
            asset: asset.clone(),
            files: metas,
            trades_in_window: in_window,
            t0: 0,
            len: 0,
        });
    }
    if triples.len() > 1 {
        triples = align_all(&triples)?;
    }
    for (t, s) in triples.iter().zip(&mut summaries) {
        write_triple(&args.out, t)
            .map_err(|e| CliError::from(e).context(args.out.display().to_string()))?;
        s.t0 = t.t0();
        s.len = t.len();
    }

    let (series, labels) = correlation_inputs(&triples);
    let correlation_skipped = match correlation_matrix(&series, &labels) {
        Ok(m) => {
            write_text(&args.out.join("correlation.csv"), &m.to_csv())?;
            write_text(
                &args.out.join("correlation_pvalues.csv"),
                &p_value_csv(&m, triples[0].len()),
            )?;
            None
        }
        Err(e) => Some(e.to_string()),
    };

    let manifest = IngestManifest {
        tool: "mfx".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        dt: args.dt,
        window_start: start,
        window_end: end,
        format,
        assets: summaries,
        correlation_skipped,
    };
    write_json(&args.out.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> CliResult<IngestManifest> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Err(CliError::MissingArtifact(path));
    }
    serde_json::from_str(&read_text(&path)?)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}
