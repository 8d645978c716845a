//! `mfx analyze`: the full pair pipeline for every requested lag.

use std::path::Path;

use mfx_core::io::{fit_csv, gap_csv, parse_series_csv, rho_csv, surface_csv};
use mfx_core::scaling::{suggest_fit_range, value_at_zero};
use mfx_core::{
    analyze_pair, exponent_gap, fit_power_law, generalized_hurst, mean_hurst, rho_q, shift_pair,
    ExponentGap, FitIssue, LagSpec, Leader, PairSurfaces, QGrid, RangeSearch, RhoPanel, ScaleGrid,
    ScalingFit, Series,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cli::AnalyzeArgs;
use crate::config::{read_config_file, AnalyzeSettings, FitRangeSpec};
use crate::{read_text, sha256_hex, tau_tag, write_json, write_text, CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";
/// Tolerance used when counting `|rho| > 1` lattice points.
pub const RHO_BOUND_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub t0: i64,
    #[serde(rename = "T")]
    pub len: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Unfittable {
    pub q: f64,
    pub issue: FitIssue,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundViolation {
    pub q: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub tau_seconds: f64,
    pub tau_samples: usize,
    pub leader: Leader,
    pub dir: String,
    pub t0: i64,
    #[serde(rename = "T")]
    pub len: usize,
    pub missing_points: [usize; 3],
    pub unfittable_lambda: Vec<Unfittable>,
    pub unfittable_h_x: Vec<Unfittable>,
    pub unfittable_h_y: Vec<Unfittable>,
    pub rho_bound_violations: Vec<BoundViolation>,
    pub h_xy_at_zero: Option<f64>,
    pub lambda_at_zero: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeManifest {
    pub tool: String,
    pub version: String,
    pub x: InputDigest,
    pub y: InputDigest,
    pub dt: f64,
    pub order: usize,
    pub scale_spec: serde_json::Value,
    pub scales: Vec<usize>,
    pub qgrid: Vec<f64>,
    pub fit_range_mode: serde_json::Value,
    pub fit_range: (usize, usize),
    pub runs: Vec<RunRecord>,
    pub stability: Option<String>,
}

/// Surfaces and derived quantities for one lag.
#[derive(Debug, Clone)]
pub struct LagResult {
    pub spec: LagSpec,
    pub tau: f64,
    pub t0: i64,
    pub len: usize,
    pub surfaces: PairSurfaces,
}

#[derive(Debug, Clone)]
pub struct LagFits {
    pub lambda: ScalingFit,
    pub h_x: ScalingFit,
    pub h_y: ScalingFit,
    pub h_xy: ScalingFit,
    pub gap: ExponentGap,
    pub rho: RhoPanel,
}

pub fn fit_all(s: &PairSurfaces, range: (usize, usize)) -> CliResult<LagFits> {
    let lambda = fit_power_law(&s.xy, range)?;
    let h_x = generalized_hurst(&s.xx, range)?;
    let h_y = generalized_hurst(&s.yy, range)?;
    let h_xy = mean_hurst(&h_x, &h_y)?;
    let gap = exponent_gap(&lambda, &h_xy)?;
    let rho = rho_q(&s.xy, &s.xx, &s.yy)?;
    Ok(LagFits {
        lambda,
        h_x,
        h_y,
        h_xy,
        gap,
        rho,
    })
}

/// Reads a `timestamp_ms,value` file, inferring `dt` from the first two
/// timestamps when not given.
pub fn load_series(path: &Path, dt: Option<f64>) -> CliResult<(Series, String)> {
    let text = read_text(path)?;
    let dt = match dt {
        Some(dt) => dt,
        None => infer_dt(&text).map_err(|e| e.context(path.display().to_string()))?,
    };
    let s = parse_series_csv(&text, dt)
        .map_err(|e| CliError::from(e).context(path.display().to_string()))?;
    Ok((s, sha256_hex(text.as_bytes())))
}

fn infer_dt(text: &str) -> CliResult<f64> {
    let ts: Vec<i64> = text
        .lines()
        .skip(1)
        .take(2)
        .filter_map(|l| l.split(',').next()?.trim().parse().ok())
        .collect();
    match ts.as_slice() {
        [a, b] if b > a => Ok((b - a) as f64 / 1000.0),
        _ => Err(CliError::invalid(
            "cannot infer dt from timestamps; pass --dt",
        )),
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("plain data serialises")
}

fn unfittable(fit: &ScalingFit) -> Vec<Unfittable> {
    fit.unfittable()
        .into_iter()
        .map(|(q, issue)| Unfittable { q, issue })
        .collect()
}

/// Resolves settings from the config file and flags (flags win).
pub fn settings(args: &AnalyzeArgs) -> CliResult<AnalyzeSettings> {
    let mut s = AnalyzeSettings::default();
    if let Some(path) = &args.config {
        s.apply(&read_config_file(path)?)?;
    }
    let mut flags = std::collections::BTreeMap::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            flags.insert(k.to_string(), v);
        }
    };
    put("dt", args.dt.map(|v| v.to_string()));
    put("order", args.order.map(|v| v.to_string()));
    put("scales", args.scales.clone());
    put("qgrid", args.qgrid.clone());
    put("fit-range", args.fit_range.clone());
    put("tau", args.tau.clone());
    if args.stability {
        put("stability", Some("true".into()));
    }
    s.apply(&flags)?;
    Ok(s)
}

fn resolve_fit_range(
    spec: FitRangeSpec,
    grid: &ScaleGrid,
    reference: &PairSurfaces,
) -> CliResult<(usize, usize)> {
    Ok(match spec {
        FitRangeSpec::Full => (grid.min(), grid.max()),
        FitRangeSpec::Fixed { lo, hi } => {
            if grid.position(lo).is_none() || grid.position(hi).is_none() || lo >= hi {
                return Err(CliError::invalid(format!(
                    "fit range {lo}:{hi} is not a pair of grid scales"
                )));
            }
            (lo, hi)
        }
        FitRangeSpec::Auto => suggest_fit_range(
            &[&reference.xy, &reference.xx, &reference.yy],
            RangeSearch::default(),
        )
        .unwrap_or((grid.min(), grid.max())),
    })
}

/// Computes every lag; parallel over lags and, inside each, over scales.
pub fn compute(
    x: &Series,
    y: &Series,
    specs: &[(f64, LagSpec)],
    grid: &ScaleGrid,
    qgrid: &QGrid,
    order: usize,
) -> CliResult<Vec<LagResult>> {
    specs
        .par_iter()
        .map(|&(tau, spec)| {
            let (xs, ys) = shift_pair(x, y, spec)?;
            let surfaces = analyze_pair(&xs, &ys, grid, qgrid, order)?;
            Ok(LagResult {
                spec,
                tau,
                t0: xs.t0(),
                len: xs.len(),
                surfaces,
            })
        })
        .collect()
}

fn stability_csv(
    x: &Series,
    y: &Series,
    grid: &ScaleGrid,
    qgrid: &QGrid,
    range: (usize, usize),
) -> CliResult<String> {
    let mut out = String::from("order,q,lambda,h_x,h_y,h_xy\n");
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    for m in 1..=3 {
        let f = fit_all(&analyze_pair(x, y, grid, qgrid, m)?, range)?;
        for (qi, q) in qgrid.qs().iter().enumerate() {
            out.push_str(&format!(
                "{m},{q},{},{},{},{}\n",
                opt(f.lambda.exponent(qi)),
                opt(f.h_x.exponent(qi)),
                opt(f.h_y.exponent(qi)),
                opt(f.h_xy.exponent(qi))
            ));
        }
    }
    Ok(out)
}

pub fn run(args: &AnalyzeArgs) -> CliResult<AnalyzeManifest> {
    let settings = settings(args)?;
    let (x, x_digest) = load_series(&args.x, settings.dt)?;
    let (y, y_digest) = load_series(&args.y, Some(settings.dt.unwrap_or(x.dt())))?;
    if x.t0() != y.t0() || x.len() != y.len() {
        return Err(CliError::invalid(
            "x and y must share t0 and length; align them with `mfx ingest`",
        ));
    }
    let dt = x.dt();
    let qgrid = settings.qgrid()?;

    let mut specs = Vec::new();
    for &tau in &settings.taus {
        let spec = LagSpec::from_seconds(tau, dt)?;
        if specs.iter().any(|(t, _)| *t == tau) {
            return Err(CliError::invalid(format!("duplicate tau {tau}")));
        }
        specs.push((tau, spec));
    }
    if specs.is_empty() {
        return Err(CliError::invalid("no tau values"));
    }
    let max_k = specs.iter().map(|(_, s)| s.tau_samples).max().unwrap_or(0);
    if max_k + mfx_core::lag::MIN_REMAINING >= x.len() {
        return Err(mfx_core::MfxError::TauTooLarge {
            tau: max_k,
            len: x.len(),
        }
        .into());
    }
    let grid = settings.scales.build(x.len() - max_k, settings.order)?;

    let results = compute(&x, &y, &specs, &grid, &qgrid, settings.order)?;
    let reference = results
        .iter()
        .min_by(|a, b| a.tau.abs().total_cmp(&b.tau.abs()))
        .expect("at least one lag");
    let range = resolve_fit_range(settings.fit_range, &grid, &reference.surfaces)?;

    let mut runs = Vec::new();
    for r in &results {
        let f = fit_all(&r.surfaces, range)?;
        let tag = tau_tag(r.tau);
        let dir = args.out.join(&tag);
        let s = &r.surfaces;
        write_text(&dir.join("surface_xy.csv"), &surface_csv(&s.xy))?;
        write_text(&dir.join("surface_xx.csv"), &surface_csv(&s.xx))?;
        write_text(&dir.join("surface_yy.csv"), &surface_csv(&s.yy))?;
        write_text(&dir.join("lambda.csv"), &fit_csv(&f.lambda))?;
        write_text(&dir.join("h_x.csv"), &fit_csv(&f.h_x))?;
        write_text(&dir.join("h_y.csv"), &fit_csv(&f.h_y))?;
        write_text(&dir.join("h_xy.csv"), &fit_csv(&f.h_xy))?;
        write_text(&dir.join("gap.csv"), &gap_csv(&f.gap))?;
        write_text(&dir.join("rho.csv"), &rho_csv(&f.rho))?;
        runs.push(RunRecord {
            tau_seconds: r.tau,
            tau_samples: r.spec.tau_samples,
            leader: r.spec.leader,
            dir: tag,
            t0: r.t0,
            len: r.len,
            missing_points: [
                s.xy.missing_count(),
                s.xx.missing_count(),
                s.yy.missing_count(),
            ],
            unfittable_lambda: unfittable(&f.lambda),
            unfittable_h_x: unfittable(&f.h_x),
            unfittable_h_y: unfittable(&f.h_y),
            rho_bound_violations: qgrid
                .qs()
                .iter()
                .zip(f.rho.bound_violations(RHO_BOUND_TOL))
                .filter(|(_, c)| *c > 0)
                .map(|(&q, count)| BoundViolation { q, count })
                .collect(),
            h_xy_at_zero: value_at_zero(&f.h_xy),
            lambda_at_zero: value_at_zero(&f.lambda),
        });
    }

    let stability = if settings.stability {
        let (xs, ys) = shift_pair(&x, &y, reference.spec)?;
        write_text(
            &args.out.join("stability.csv"),
            &stability_csv(&xs, &ys, &grid, &qgrid, range)?,
        )?;
        Some("stability.csv".to_string())
    } else {
        None
    };

    let manifest = AnalyzeManifest {
        tool: "mfx".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        x: InputDigest {
            path: args.x.display().to_string(),
            sha256: x_digest,
            t0: x.t0(),
            len: x.len(),
        },
        y: InputDigest {
            path: args.y.display().to_string(),
            sha256: y_digest,
            t0: y.t0(),
            len: y.len(),
        },
        dt,
        order: settings.order,
        scale_spec: to_value(&settings.scales),
        scales: grid.scales().to_vec(),
        qgrid: qgrid.qs().to_vec(),
        fit_range_mode: to_value(&settings.fit_range),
        fit_range: range,
        runs,
        stability,
    };
    write_json(&args.out.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> CliResult<AnalyzeManifest> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Err(CliError::MissingArtifact(path));
    }
    serde_json::from_str(&read_text(&path)?)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}
