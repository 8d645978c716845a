//! Plain-text persistence: series CSVs with JSON sidecars and lattice tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! written-then-read value is bitwise identical. Missing values are empty
//! fields.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{MfxError, Result};
use crate::grid::{QGrid, ScaleGrid};
use crate::ingest::{BaseBin, BinnedTriple};
use crate::scaling::ExponentGap;
use crate::series::Series;
use crate::surface::{FluctuationSurface, RhoPanel, ScalingFit, SurfaceKind};

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| MfxError::Parse(format!("bad {what} {s:?}")))
}

fn parse_opt(s: &str, what: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_f64(s, what).map(Some)
    }
}

fn read_rows(text: &str) -> Result<Vec<csv::StringRecord>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes())
        .records()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| MfxError::Parse(e.to_string()))
}

pub fn series_csv(s: &Series) -> String {
    let mut out = String::with_capacity(s.len() * 24 + 20);
    out.push_str("timestamp_ms,value\n");
    for (i, v) in s.values().iter().enumerate() {
        out.push_str(&format!("{},{}\n", s.timestamp(i), v));
    }
    out
}

/// Parses a `timestamp_ms,value` table sampled every `dt` seconds.
pub fn parse_series_csv(text: &str, dt: f64) -> Result<Series> {
    let rows = read_rows(text)?;
    let first = rows.first().ok_or(MfxError::EmptyInput)?;
    let t0: i64 = first[0]
        .trim()
        .parse()
        .map_err(|_| MfxError::Parse(format!("bad timestamp {:?}", &first[0])))?;
    let values = rows
        .iter()
        .map(|r| parse_f64(&r[1], "value"))
        .collect::<Result<Vec<_>>>()?;
    let s = Series::new(values, dt, t0)?;
    for (i, r) in rows.iter().enumerate() {
        let ts: i64 = r[0]
            .trim()
            .parse()
            .map_err(|_| MfxError::Parse(format!("bad timestamp {:?}", &r[0])))?;
        if ts != s.timestamp(i) {
            return Err(MfxError::GridMisaligned);
        }
    }
    Ok(s)
}

/// Sidecar describing one asset's binned triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleMeta {
    pub asset: String,
    pub dt: f64,
    pub t0: i64,
    #[serde(rename = "T")]
    pub len: usize,
    pub base: BaseBin,
    pub returns: String,
    pub volume: String,
    pub count: String,
}

pub fn triple_paths(dir: &Path, asset: &str) -> (PathBuf, [PathBuf; 3]) {
    (
        dir.join(format!("{asset}.json")),
        [
            dir.join(format!("{asset}_returns.csv")),
            dir.join(format!("{asset}_volume.csv")),
            dir.join(format!("{asset}_count.csv")),
        ],
    )
}

pub fn write_triple(dir: &Path, t: &BinnedTriple) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let (meta_path, [rp, vp, cp]) = triple_paths(dir, &t.asset);
    let name = |p: &Path| p.file_name().unwrap().to_string_lossy().into_owned();
    let meta = TripleMeta {
        asset: t.asset.clone(),
        dt: t.dt(),
        t0: t.t0(),
        len: t.len(),
        base: t.base,
        returns: name(&rp),
        volume: name(&vp),
        count: name(&cp),
    };
    fs::write(&rp, series_csv(&t.returns))?;
    fs::write(&vp, series_csv(&t.volume))?;
    fs::write(&cp, series_csv(&t.count))?;
    let json = serde_json::to_string_pretty(&meta).map_err(|e| MfxError::Parse(e.to_string()))?;
    fs::write(&meta_path, json + "\n")?;
    Ok(vec![rp, vp, cp, meta_path])
}

pub fn read_triple(dir: &Path, asset: &str) -> Result<BinnedTriple> {
    let (meta_path, _) = triple_paths(dir, asset);
    let meta: TripleMeta = serde_json::from_str(&fs::read_to_string(&meta_path)?)
        .map_err(|e| MfxError::Parse(format!("{}: {e}", meta_path.display())))?;
    let load = |file: &str, kind: &str| -> Result<Series> {
        let s = parse_series_csv(&fs::read_to_string(dir.join(file))?, meta.dt)?;
        if s.len() != meta.len || s.t0() != meta.t0 {
            return Err(MfxError::Parse(format!(
                "{file} disagrees with {}",
                meta_path.display()
            )));
        }
        Ok(s.with_label(format!("{}:{kind}", meta.asset)))
    };
    Ok(BinnedTriple {
        returns: load(&meta.returns, "returns")?,
        volume: load(&meta.volume, "volume")?,
        count: load(&meta.count, "count")?,
        asset: meta.asset,
        base: meta.base,
    })
}

/// Long-format table `q,s,F,M_s,excluded`.
pub fn surface_csv(f: &FluctuationSurface) -> String {
    let mut out = String::from("q,s,F,M_s,excluded\n");
    for (qi, q) in f.qgrid.qs().iter().enumerate() {
        for (si, s) in f.grid.scales().iter().enumerate() {
            out.push_str(&format!(
                "{q},{s},{},{},{}\n",
                fmt_opt(f.get(qi, si)),
                f.segment_counts[si],
                f.excluded_at(qi, si)
            ));
        }
    }
    out
}

pub fn parse_surface_csv(text: &str, kind: SurfaceKind) -> Result<FluctuationSurface> {
    let rows = read_rows(text)?;
    let mut qs: Vec<f64> = Vec::new();
    let mut scales: Vec<usize> = Vec::new();
    for r in &rows {
        let q = parse_f64(&r[0], "q")?;
        let s: usize = r[1]
            .trim()
            .parse()
            .map_err(|_| MfxError::Parse(format!("bad scale {:?}", &r[1])))?;
        if qs.last() != Some(&q) {
            qs.push(q);
        }
        if qs.len() == 1 {
            scales.push(s);
        }
    }
    let grid = ScaleGrid::new(scales)?;
    let qgrid = QGrid::new(qs)?;
    if rows.len() != grid.len() * qgrid.len() {
        return Err(MfxError::GridMismatch);
    }
    let mut values = Vec::with_capacity(rows.len());
    let mut excluded = Vec::with_capacity(rows.len());
    let mut segment_counts = vec![0; grid.len()];
    for (k, r) in rows.iter().enumerate() {
        let si = k % grid.len();
        if r[1].trim().parse::<usize>().ok() != Some(grid.scales()[si]) {
            return Err(MfxError::GridMismatch);
        }
        values.push(parse_opt(&r[2], "F")?);
        segment_counts[si] = r[3]
            .trim()
            .parse()
            .map_err(|_| MfxError::Parse("bad M_s".into()))?;
        excluded.push(
            r[4].trim()
                .parse()
                .map_err(|_| MfxError::Parse("bad excluded".into()))?,
        );
    }
    Ok(FluctuationSurface {
        grid,
        qgrid,
        kind,
        values,
        segment_counts,
        excluded,
    })
}

/// Table `q,exponent,stderr,r2,issue`; failed fits leave the numbers empty.
pub fn fit_csv(fit: &ScalingFit) -> String {
    let mut out = String::from("q,exponent,stderr,r2,issue\n");
    for (q, f) in fit.qgrid.qs().iter().zip(&fit.fits) {
        match f {
            Ok(p) => out.push_str(&format!("{q},{},{},{},\n", p.exponent, p.stderr, p.r2)),
            Err(e) => out.push_str(&format!("{q},,,,{}\n", issue_name(*e))),
        }
    }
    out
}

fn issue_name(e: crate::surface::FitIssue) -> &'static str {
    use crate::surface::FitIssue::*;
    match e {
        MixedSign => "mixed-sign",
        MissingPoint => "missing-point",
        ZeroValue => "zero-value",
        Upstream => "upstream",
    }
}

/// `(q, value, stderr)`; missing fields are `None`.
pub type FitRow = (f64, Option<f64>, Option<f64>);

/// Rows of `(q, exponent, stderr)` from a fit table.
pub fn parse_fit_csv(text: &str) -> Result<Vec<FitRow>> {
    read_rows(text)?
        .iter()
        .map(|r| {
            Ok((
                parse_f64(&r[0], "q")?,
                parse_opt(&r[1], "exponent")?,
                parse_opt(&r[2], "stderr")?,
            ))
        })
        .collect()
}

pub fn gap_csv(gap: &ExponentGap) -> String {
    let mut out = String::from("q,d,stderr\n");
    for (i, q) in gap.qgrid.qs().iter().enumerate() {
        out.push_str(&format!(
            "{q},{},{}\n",
            fmt_opt(gap.d[i]),
            fmt_opt(gap.stderr[i])
        ));
    }
    out
}

pub fn rho_csv(panel: &RhoPanel) -> String {
    let mut out = String::from("q,s,rho\n");
    for (qi, q) in panel.qgrid.qs().iter().enumerate() {
        for (si, s) in panel.grid.scales().iter().enumerate() {
            out.push_str(&format!("{q},{s},{}\n", fmt_opt(panel.get(qi, si))));
        }
    }
    out
}

/// Rows of `(q, s, rho)` from a rho table.
pub fn parse_rho_csv(text: &str) -> Result<Vec<(f64, usize, Option<f64>)>> {
    read_rows(text)?
        .iter()
        .map(|r| {
            let s = r[1]
                .trim()
                .parse()
                .map_err(|_| MfxError::Parse(format!("bad scale {:?}", &r[1])))?;
            Ok((parse_f64(&r[0], "q")?, s, parse_opt(&r[2], "rho")?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fluct::analyze_pair;
    use crate::ingest::{resample_asset, TradeRecord};
    use crate::synth::gen_white;

    #[test]
    fn series_round_trip_is_exact() {
        let s = gen_white(300, 4).unwrap().with_t0(1_585_699_200_000);
        let s10 = Series::new(s.values().to_vec(), 10.0, s.t0()).unwrap();
        let back = parse_series_csv(&series_csv(&s10), 10.0).unwrap();
        assert_eq!(back.values(), s10.values());
        assert_eq!(back.t0(), s10.t0());
        assert_eq!(
            parse_series_csv(&series_csv(&s10), 5.0),
            Err(MfxError::GridMisaligned)
        );
    }

    #[test]
    fn triple_round_trip() {
        let trades: Vec<TradeRecord> = (0..300)
            .map(|k| TradeRecord {
                trade_id: k,
                price: 50.0 + (k % 5) as f64,
                qty: 0.1 * k as f64,
                timestamp: k * 10_000 + 3,
            })
            .collect();
        let t = resample_asset(&trades, 10.0, 0, 3_000_000, "AAA").unwrap();
        let dir = tempdir();
        write_triple(&dir, &t).unwrap();
        let back = read_triple(&dir, "AAA").unwrap();
        assert_eq!(back, t);
        fs::remove_dir_all(&dir).unwrap();
    }

    fn tempdir() -> PathBuf {
        let d = std::env::temp_dir().join(format!(
            "mfx-io-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn surface_round_trip() {
        let x = gen_white(2000, 1).unwrap();
        let y = gen_white(2000, 2).unwrap();
        let grid = ScaleGrid::new(vec![20, 40, 80]).unwrap();
        let qgrid = QGrid::new(vec![-2.0, 1.0, 2.0]).unwrap();
        let p = analyze_pair(&x, &y, &grid, &qgrid, 2).unwrap();
        let back = parse_surface_csv(&surface_csv(&p.xy), SurfaceKind::BivariateXy).unwrap();
        assert_eq!(back, p.xy);
    }
}
