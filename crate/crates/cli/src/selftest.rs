//! Oracle suite: each check is an end-to-end property with a known answer.

use std::path::{Path, PathBuf};
use std::time::Instant;

use mfx_core::fluct::analyze_series;
use mfx_core::ingest::{bin_trades, parse_trades, resample, TradeFormat};
use mfx_core::scaling::suggest_fit_range;
use mfx_core::synth::{cascade_hurst, gen_cascade, gen_coupled_pair, gen_fgn, gen_white};
use mfx_core::{
    analyze_pair, default_scale_grid, generalized_hurst, shift_pair, LagSpec, Leader, PairSurfaces,
    ProcessKind, QGrid, RangeSearch, ScaleGrid, Series,
};

use crate::analyze::fit_all;

pub const FIXTURE_TRADES: &str = include_str!("../tests/fixtures/trades20.csv");
pub const FIXTURE_EXPECTED: &str = include_str!("../tests/fixtures/trades20_expected.csv");
/// Window of the trade fixture, epoch milliseconds.
pub const FIXTURE_WINDOW: (i64, i64) = (1_585_699_200_000, 1_585_699_280_000);

/// Environment variable naming a directory with `BTCUSDT/` and `ETHUSDT/`
/// subdirectories of Binance trade files.
pub const DATA_DIR_VAR: &str = "MFX_DATA_DIR";

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

impl Outcome {
    fn check(ok: bool, detail: String) -> Self {
        if ok {
            Self::Pass(detail)
        } else {
            Self::Fail(detail)
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Self::Fail(_))
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub run: fn() -> Outcome,
}

/// One report line: `[PASS] 3 diagonal-identity: ...`.
pub fn line(c: &Criterion, o: &Outcome) -> String {
    let (tag, detail) = match o {
        Outcome::Pass(d) => ("PASS", d),
        Outcome::Fail(d) => ("FAIL", d),
        Outcome::Skip(d) => ("SKIP", d),
    };
    format!("[{tag}] {:>2} {}: {detail}", c.id, c.name)
}

fn err(e: impl std::fmt::Display) -> Outcome {
    Outcome::Fail(format!("error: {e}"))
}

macro_rules! tryo {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return err(e),
        }
    };
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn full_range(g: &ScaleGrid) -> (usize, usize) {
    (g.min(), g.max())
}

pub fn hurst_closure() -> Outcome {
    let len = 1 << 16;
    let grid = tryo!(default_scale_grid(len, 2));
    let qgrid = tryo!(QGrid::new(vec![2.0]));
    let mut parts = Vec::new();
    let mut ok = true;
    let mut slowest = 0.0f64;
    for h in [0.3, 0.5, 0.8] {
        let mut est = Vec::new();
        for seed in 0..10 {
            let t = Instant::now();
            let x = tryo!(gen_fgn(h, len, seed));
            let f = tryo!(analyze_series(&x, &grid, &qgrid, 2));
            let fit = tryo!(generalized_hurst(&f, full_range(&grid)));
            slowest = slowest.max(t.elapsed().as_secs_f64());
            match fit.exponent(0) {
                Some(e) => est.push(e),
                None => return Outcome::Fail(format!("H={h} seed {seed}: h(2) unfittable")),
            }
        }
        let m = est.iter().sum::<f64>() / est.len() as f64;
        ok &= (m - h).abs() <= 0.05 && slowest < 60.0;
        parts.push(format!("H={h}: h(2)={m:.4}"));
    }
    Outcome::check(
        ok,
        format!("{}; slowest run {slowest:.2}s", parts.join(", ")),
    )
}

pub fn multifractal_closure() -> Outcome {
    let a = 0.7;
    let x = tryo!(gen_cascade(a, 16, 0));
    let grid = tryo!(default_scale_grid(x.len(), 2));
    let qs = [1.0, 1.5, 2.0, 3.0, 4.0];
    let qgrid = tryo!(QGrid::new(qs.to_vec()));
    let f = tryo!(analyze_series(&x, &grid, &qgrid, 2));
    let fit = tryo!(generalized_hurst(&f, full_range(&grid)));
    let mut worst: f64 = 0.0;
    let mut hs = Vec::new();
    for (i, &q) in qs.iter().enumerate() {
        let Some(h) = fit.exponent(i) else {
            return Outcome::Fail(format!("h({q}) unfittable"));
        };
        worst = worst.max((h - cascade_hurst(a, q)).abs());
        hs.push(h);
    }
    let monotone = hs.windows(2).all(|w| w[1] < w[0]);
    let shown: Vec<String> = hs.iter().map(|h| format!("{h:.3}")).collect();
    Outcome::check(
        worst <= 0.1 && monotone,
        format!(
            "h(q)=[{}], max |h - analytic|={worst:.4}, decreasing={monotone}",
            shown.join(", ")
        ),
    )
}

pub fn diagonal_identity() -> Outcome {
    let qgrid = QGrid::default();
    for (name, x) in [
        ("fgn", gen_fgn(0.7, 1 << 14, 3)),
        ("cascade", gen_cascade(0.7, 14, 3)),
    ] {
        let x = tryo!(x);
        let grid = tryo!(default_scale_grid(x.len(), 2));
        let p = tryo!(analyze_pair(&x, &x, &grid, &qgrid, 2));
        let bitwise =
            p.xy.values
                .iter()
                .zip(&p.xx.values)
                .all(|(a, b)| a.map(f64::to_bits) == b.map(f64::to_bits));
        if !bitwise {
            return Outcome::Fail(format!("{name}: Surface_XY differs from Surface_XX"));
        }
        let f = tryo!(fit_all(&p, full_range(&grid)));
        let rho_dev = f
            .rho
            .values
            .iter()
            .map(|r| r.map_or(f64::INFINITY, |r| (r - 1.0).abs()))
            .fold(0.0, f64::max);
        let d_dev = f
            .gap
            .d
            .iter()
            .map(|d| d.map_or(f64::INFINITY, f64::abs))
            .fold(0.0, f64::max);
        if rho_dev > 1e-12 || d_dev > 1e-12 {
            return Outcome::Fail(format!(
                "{name}: max |rho-1|={rho_dev:e}, max |d|={d_dev:e}"
            ));
        }
    }
    Outcome::Pass("XY == XX bitwise; rho = 1 and d = 0 within 1e-12 (fgn, cascade)".into())
}

/// A randomized pair of length `len` (a power of two) for pair index `i`.
fn random_pair(i: u64, len: usize) -> mfx_core::Result<(Series, Series, String)> {
    let depth = len.trailing_zeros();
    let u = |k: u64| {
        ((i.wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .rotate_left(k as u32 * 7)
            >> 11) as f64)
            / (1u64 << 53) as f64
    };
    let h = 0.2 + 0.7 * u(1);
    let a = 0.55 + 0.35 * u(2);
    let w = u(3);
    Ok(match i % 5 {
        0 => (
            gen_fgn(h, len, 2 * i)?,
            gen_fgn(0.2 + 0.7 * u(4), len, 2 * i + 1)?,
            format!("fgn/fgn H={h:.2}"),
        ),
        1 => (
            gen_cascade(a, depth, 2 * i)?,
            gen_cascade(a, depth, 2 * i + 1)?,
            format!("cascade/cascade a={a:.2}"),
        ),
        2 => (
            gen_white(len, 2 * i)?,
            gen_white(len, 2 * i + 1)?,
            "white/white".into(),
        ),
        3 => {
            let (x, y) = gen_coupled_pair(w, &ProcessKind::Fgn { hurst: h }, len, i)?;
            (x, y, format!("coupled fgn w={w:.2}"))
        }
        _ => (
            gen_fgn(h, len, 2 * i)?,
            gen_cascade(a, depth, 2 * i + 1)?,
            format!("fgn/cascade H={h:.2} a={a:.2}"),
        ),
    })
}

pub fn antisymmetry() -> Outcome {
    let qgrid = QGrid::default();
    for i in 0..20 {
        let (x, y, _) = tryo!(random_pair(i, 1 << 12));
        let grid = tryo!(default_scale_grid(x.len(), 2));
        let p = tryo!(analyze_pair(&x, &y, &grid, &qgrid, 2));
        let n = tryo!(analyze_pair(&x, &y.negated(), &grid, &qgrid, 2));
        let neg = |v: &[Option<f64>]| {
            v.iter()
                .map(|r| r.map(|r| (-r).to_bits()))
                .collect::<Vec<_>>()
        };
        let bits = |v: &[Option<f64>]| v.iter().map(|r| r.map(f64::to_bits)).collect::<Vec<_>>();
        if bits(&n.xy.values) != neg(&p.xy.values) {
            return Outcome::Fail(format!("pair {i}: Surface_XY not negated"));
        }
        let rp = tryo!(mfx_core::rho_q(&p.xy, &p.xx, &p.yy));
        let rn = tryo!(mfx_core::rho_q(&n.xy, &n.xx, &n.yy));
        if bits(&rn.values) != neg(&rp.values) {
            return Outcome::Fail(format!("pair {i}: rho not negated"));
        }
    }
    Outcome::Pass("20 pairs: Surface_XY and rho_q flip sign exactly".into())
}

pub fn rho_bound() -> Outcome {
    let qgrid = QGrid::default();
    let q2 = qgrid.position(2.0).expect("q = 2 on the default grid");
    let mut worst2: f64 = 0.0;
    let mut worst_any: (f64, f64) = (0.0, 0.0);
    let mut over_one = 0usize;
    let mut over_limit = 0usize;
    let mut over_limit_pos = 0usize;
    let mut points = 0usize;
    for i in 0..100 {
        let (x, y, _) = tryo!(random_pair(i, 1 << 13));
        let grid = tryo!(default_scale_grid(x.len(), 2));
        let p = tryo!(analyze_pair(&x, &y, &grid, &qgrid, 2));
        let r = tryo!(mfx_core::rho_q(&p.xy, &p.xx, &p.yy));
        for v in r.row(q2).iter().flatten() {
            worst2 = worst2.max(v.abs());
        }
        for (qi, &q) in qgrid.qs().iter().enumerate() {
            for v in r.row(qi).iter().flatten() {
                points += 1;
                if v.abs() > 1.0 + 1e-12 {
                    over_one += 1;
                }
                if v.abs() > 1.05 {
                    over_limit += 1;
                    over_limit_pos += usize::from(q > 0.0);
                }
                if v.abs() > worst_any.1 {
                    worst_any = (q, v.abs());
                }
            }
        }
    }
    Outcome::check(
        worst2 <= 1.0 + 1e-12 && over_limit == 0,
        format!(
            "max |rho_2|={worst2:.6}; all q: {over_one}/{points} points with |rho|>1, {over_limit} with |rho|>1.05 ({over_limit_pos} at q>0), max {:.4e} at q={}",
            worst_any.1, worst_any.0
        ),
    )
}

pub fn null_level() -> Outcome {
    let len = 1 << 16;
    let grid = tryo!(default_scale_grid(len, 2));
    let qgrid = tryo!(QGrid::new(vec![2.0]));
    let mut per_scale = vec![Vec::new(); grid.len()];
    for seed in 0..10 {
        let x = tryo!(gen_fgn(0.7, len, 2 * seed + 1000));
        let y = tryo!(gen_fgn(0.7, len, 2 * seed + 1001));
        let p = tryo!(analyze_pair(&x, &y, &grid, &qgrid, 2));
        let r = tryo!(mfx_core::rho_q(&p.xy, &p.xx, &p.yy));
        for (si, v) in r.row(0).iter().enumerate() {
            per_scale[si].push(v.map_or(f64::INFINITY, f64::abs));
        }
    }
    let limit = len / 50;
    let (mut worst, mut at) = (0.0, 0);
    for (si, &s) in grid
        .scales()
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= limit)
    {
        let m = median(per_scale[si].clone());
        if m > worst {
            (worst, at) = (m, s);
        }
    }
    Outcome::check(
        worst < 0.1,
        format!("max over s<={limit} of median |rho_2(s)| = {worst:.4} (s={at})"),
    )
}

fn rho2_all(x: &Series, y: &Series, grid: &ScaleGrid) -> mfx_core::Result<Vec<f64>> {
    let qgrid = QGrid::new(vec![2.0])?;
    let p = analyze_pair(x, y, grid, &qgrid, 2)?;
    Ok(mfx_core::rho_q(&p.xy, &p.xx, &p.yy)?
        .values
        .iter()
        .flatten()
        .copied()
        .collect())
}

pub fn coupling_monotonicity() -> Outcome {
    let len = 1 << 16;
    let base = ProcessKind::Fgn { hurst: 0.7 };
    let grid = tryo!(default_scale_grid(len, 2));
    let mut medians = Vec::new();
    for w in [0.2, 0.5, 0.8] {
        let mut all = Vec::new();
        for seed in 0..10 {
            let (x, y) = tryo!(gen_coupled_pair(w, &base, len, seed));
            all.extend(tryo!(rho2_all(&x, &y, &grid)));
        }
        medians.push(median(all));
    }
    let increasing = medians.windows(2).all(|m| m[1] > m[0]);
    let (x, y) = tryo!(gen_coupled_pair(1.0, &base, len, 0));
    let p: PairSurfaces = tryo!(analyze_pair(&x, &y, &grid, &QGrid::default(), 2));
    let r = tryo!(mfx_core::rho_q(&p.xy, &p.xx, &p.yy));
    let dev = r
        .values
        .iter()
        .map(|v| v.map_or(f64::INFINITY, |v| (v - 1.0).abs()))
        .fold(0.0, f64::max);
    Outcome::check(
        increasing && dev <= 1e-12,
        format!(
            "median rho_2 at w=0.2,0.5,0.8: {:.4}, {:.4}, {:.4}; w=1 max |rho-1|={dev:e}",
            medians[0], medians[1], medians[2]
        ),
    )
}

pub fn lag_direction() -> Outcome {
    let len = 1 << 14;
    let z = tryo!(gen_fgn(0.7, 2 * len, 11));
    let x = tryo!(Series::new(z.values()[6..6 + len].to_vec(), 10.0, 0));
    // y[t] = x[t - 6]
    let y = tryo!(Series::new(z.values()[..len].to_vec(), 10.0, 0));
    let (ax, bx) = tryo!(shift_pair(&x, &y, LagSpec::new(6, Leader::X)));
    let (ay, by) = tryo!(shift_pair(&x, &y, LagSpec::new(6, Leader::Y)));
    let grid = tryo!(default_scale_grid(ax.len(), 2));
    let qgrid = tryo!(QGrid::new(vec![1.0, 2.0, 3.0]));
    let px = tryo!(analyze_pair(&ax, &bx, &grid, &qgrid, 2));
    let py = tryo!(analyze_pair(&ay, &by, &grid, &qgrid, 2));
    let range = suggest_fit_range(&[&px.xy, &px.xx, &px.yy], RangeSearch::default())
        .unwrap_or(full_range(&grid));
    let rx = tryo!(mfx_core::rho_q(&px.xy, &px.xx, &px.yy));
    let ry = tryo!(mfx_core::rho_q(&py.xy, &py.xx, &py.yy));
    let (lo, hi) = (
        grid.position(range.0).unwrap(),
        grid.position(range.1).unwrap(),
    );
    let mut min_x = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut ok = true;
    for si in lo..=hi {
        match (rx.get(1, si), ry.get(1, si)) {
            (Some(a), Some(b)) => {
                ok &= a > b && a >= 0.999;
                min_x = min_x.min(a);
                max_y = max_y.max(b);
            }
            _ => ok = false,
        }
    }
    Outcome::check(
        ok,
        format!(
            "scales {}..{}: min rho_2 leader X = {min_x:.6}, max rho_2 leader Y = {max_y:.4}",
            range.0, range.1
        ),
    )
}

pub fn ingestion_fixture() -> Outcome {
    let trades = tryo!(parse_trades(
        FIXTURE_TRADES.as_bytes(),
        &TradeFormat::compact()
    ));
    let (start, end) = FIXTURE_WINDOW;
    let bins = tryo!(bin_trades(&trades, 10.0, start, end));
    let triple = tryo!(resample(&trades, 10.0, start, end));
    let rows: Vec<Vec<&str>> = FIXTURE_EXPECTED
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    if rows.len() != bins.count.len() || triple.len() + 1 != rows.len() {
        return Outcome::Fail(format!(
            "{} expected bins, got {} bins / {} returns",
            rows.len(),
            bins.count.len(),
            triple.len()
        ));
    }
    let mut worst_r: f64 = 0.0;
    for (k, r) in rows.iter().enumerate() {
        let count: u64 = tryo!(r[1].parse());
        let volume: f64 = tryo!(r[2].parse());
        if bins.count[k] != count || bins.volume[k] != volume {
            return Outcome::Fail(format!(
                "bin {k}: got N={} V={}",
                bins.count[k], bins.volume[k]
            ));
        }
        if k > 0 {
            let (i, ret): (usize, f64) = (k - 1, tryo!(r[4].parse()));
            if triple.count.values()[i] != count as f64 || triple.volume.values()[i] != volume {
                return Outcome::Fail(format!("triple sample {i} disagrees with bin {k}"));
            }
            worst_r = worst_r.max((triple.returns.values()[i] - ret).abs());
        }
    }
    let in_window: Vec<_> = trades
        .iter()
        .filter(|t| t.timestamp >= start && t.timestamp < end)
        .collect();
    let n_sum = triple.count.values().iter().sum::<f64>() as u64 + triple.base.count;
    let v_sum = triple.volume.values().iter().sum::<f64>() + triple.base.volume;
    let v_true: f64 = in_window.iter().map(|t| t.qty).sum();
    let conserved = n_sum == in_window.len() as u64 && ((v_sum - v_true) / v_true).abs() <= 1e-9;
    Outcome::check(
        worst_r <= 1e-12 && conserved,
        format!(
            "{} bins match; max return error {worst_r:e}; sum N={n_sum}, sum V={v_sum}",
            rows.len()
        ),
    )
}

/// Runs `analyze` on synthetic inputs under 1 and 4 worker threads and
/// compares every artifact byte for byte.
pub fn reproducibility() -> Outcome {
    let root = std::env::temp_dir().join(format!("mfx-selftest-{}", std::process::id()));
    let result = reproducibility_in(&root);
    let _ = std::fs::remove_dir_all(&root);
    result
}

fn reproducibility_in(root: &Path) -> Outcome {
    let (x, y) = tryo!(gen_coupled_pair(
        0.5,
        &ProcessKind::Fgn { hurst: 0.7 },
        1 << 13,
        5
    ));
    let xs = tryo!(Series::new(x.into_values(), 10.0, 0));
    let ys = tryo!(Series::new(y.into_values(), 10.0, 0));
    let (xp, yp) = (root.join("x.csv"), root.join("y.csv"));
    tryo!(crate::write_text(&xp, &mfx_core::io::series_csv(&xs)));
    tryo!(crate::write_text(&yp, &mfx_core::io::series_csv(&ys)));
    let mut outs = Vec::new();
    for threads in [1, 4] {
        let out = root.join(format!("run{threads}"));
        let args = crate::cli::AnalyzeArgs {
            x: xp.clone(),
            y: yp.clone(),
            out: out.clone(),
            config: None,
            dt: None,
            order: None,
            scales: None,
            qgrid: None,
            fit_range: None,
            tau: None,
            stability: false,
        };
        let pool = tryo!(rayon::ThreadPoolBuilder::new().num_threads(threads).build());
        tryo!(pool.install(|| crate::analyze::run(&args)));
        outs.push(out);
    }
    compare_trees(&outs[0], &outs[1])
}

/// Byte-compares two output trees.
pub fn compare_trees(a: &Path, b: &Path) -> Outcome {
    let fa = tryo!(list_files(a));
    let fb = tryo!(list_files(b));
    if fa != fb {
        return Outcome::Fail("different file sets".into());
    }
    for f in &fa {
        if tryo!(std::fs::read(a.join(f))) != tryo!(std::fs::read(b.join(f))) {
            return Outcome::Fail(format!("{} differs", f.display()));
        }
    }
    Outcome::Pass(format!("{} artifacts byte-identical", fa.len()))
}

pub fn list_files(root: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d)? {
            let p = e?.path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p.strip_prefix(root).expect("under root").to_path_buf());
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Reproduces the headline Pearson coefficients on user-supplied Binance
/// trade history; skipped when the data directory is not configured.
pub fn gated_integration() -> Outcome {
    let Ok(dir) = std::env::var(DATA_DIR_VAR) else {
        return Outcome::Skip(format!("{DATA_DIR_VAR} not set"));
    };
    let dir = PathBuf::from(dir);
    let mut inputs = Vec::new();
    for asset in ["BTCUSDT", "ETHUSDT"] {
        let mut files = tryo!(std::fs::read_dir(dir.join(asset)))
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect::<Vec<_>>();
        files.sort();
        if files.is_empty() {
            return Outcome::Skip(format!("no csv files under {}", dir.join(asset).display()));
        }
        let list: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
        inputs.push(format!("{asset}={}", list.join(",")));
    }
    let out = std::env::temp_dir().join(format!("mfx-gated-{}", std::process::id()));
    let args = crate::cli::IngestArgs {
        inputs,
        out: out.clone(),
        dt: 10.0,
        // One bin before the first day supplies the base close, so the
        // return series starts exactly at 2020-04-01T00:00:00Z.
        start: Some("2020-03-31T23:59:50Z".into()),
        end: Some("2022-06-01".into()),
        format: crate::cli::FormatName::Binance,
        header: false,
        delimiter: ',',
    };
    let result = crate::ingest::run(&args);
    let table = std::fs::read_to_string(out.join("correlation.csv"));
    let _ = std::fs::remove_dir_all(&out);
    let manifest = tryo!(result);
    let table = tryo!(table);
    let get = |a: &str, b: &str| -> Option<f64> {
        let mut lines = table.lines();
        let header: Vec<&str> = lines.next()?.split(',').collect();
        let j = header.iter().position(|h| *h == b)?;
        lines
            .map(|l| l.split(',').collect::<Vec<_>>())
            .find(|r| r[0] == a)?
            .get(j)?
            .parse()
            .ok()
    };
    let (Some(c_abs), Some(c_nv)) = (
        get("BTCUSDT:|r|", "ETHUSDT:|r|"),
        get("BTCUSDT:N", "BTCUSDT:V"),
    ) else {
        return Outcome::Fail("correlation table incomplete".into());
    };
    let len = manifest.assets[0].len;
    Outcome::check(
        (c_abs - 0.72).abs() <= 0.02 && (c_nv - 0.75).abs() <= 0.02 && len == 6_834_240,
        format!("C(|r| BTC, |r| ETH)={c_abs:.4}, C(N, V BTC)={c_nv:.4}, T={len}"),
    )
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            name: "hurst-closure",
            run: hurst_closure,
        },
        Criterion {
            id: 2,
            name: "multifractal-closure",
            run: multifractal_closure,
        },
        Criterion {
            id: 3,
            name: "diagonal-identity",
            run: diagonal_identity,
        },
        Criterion {
            id: 4,
            name: "antisymmetry",
            run: antisymmetry,
        },
        Criterion {
            id: 5,
            name: "rho-bound",
            run: rho_bound,
        },
        Criterion {
            id: 6,
            name: "null-level",
            run: null_level,
        },
        Criterion {
            id: 7,
            name: "coupling-monotonicity",
            run: coupling_monotonicity,
        },
        Criterion {
            id: 8,
            name: "lag-direction",
            run: lag_direction,
        },
        Criterion {
            id: 9,
            name: "ingestion-fixture",
            run: ingestion_fixture,
        },
        Criterion {
            id: 10,
            name: "reproducibility",
            run: reproducibility,
        },
        Criterion {
            id: 11,
            name: "gated-integration",
            run: gated_integration,
        },
    ]
}

/// Runs every check, printing one line each; returns the number failed.
pub fn run_all() -> usize {
    let mut failed = 0;
    for c in criteria() {
        let o = (c.run)();
        println!("{}", line(&c, &o));
        failed += o.is_fail() as usize;
    }
    failed
}
