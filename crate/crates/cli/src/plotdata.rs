//! `mfx plotdata`: curve files plus a manifest mapping them to panels.

use std::path::Path;

use mfx_core::io::{parse_fit_csv, parse_rho_csv, parse_surface_csv, read_triple};
use mfx_core::stats::{abs_series, rolling_mean};
use mfx_core::{Series, SurfaceKind};
use serde::Serialize;

use crate::analyze::{self, AnalyzeManifest};
use crate::cli::{Figure, PlotArgs};
use crate::config::parse_list;
use crate::{ingest, read_text, write_json, write_text, CliError, CliResult};

pub const MANIFEST: &str = "plot_manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub file: String,
    pub panel: String,
    pub legend: String,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlotManifest {
    pub figure: String,
    /// Scales bounding the fit range (dashed markers).
    pub fit_range: Option<(usize, usize)>,
    pub curves: Vec<Curve>,
}

struct Writer<'a> {
    out: &'a Path,
    curves: Vec<Curve>,
}

impl Writer<'_> {
    fn emit(
        &mut self,
        file: String,
        panel: String,
        legend: String,
        columns: &[&str],
        rows: &[Vec<String>],
    ) -> CliResult<()> {
        let mut text = columns.join(",");
        text.push('\n');
        for r in rows {
            text.push_str(&r.join(","));
            text.push('\n');
        }
        write_text(&self.out.join(&file), &text)?;
        self.curves.push(Curve {
            file,
            panel,
            legend,
            columns: columns.iter().map(|c| c.to_string()).collect(),
        });
        Ok(())
    }
}

fn artifact(path: &Path) -> CliResult<String> {
    if !path.exists() {
        return Err(CliError::MissingArtifact(path.to_path_buf()));
    }
    read_text(path)
}

fn fq_surface(dir: &Path, m: &AnalyzeManifest, w: &mut Writer) -> CliResult<()> {
    for run in &m.runs {
        for kind in [
            SurfaceKind::BivariateXy,
            SurfaceKind::UnivariateX,
            SurfaceKind::UnivariateY,
        ] {
            let path = dir
                .join(&run.dir)
                .join(format!("surface_{}.csv", kind.tag()));
            let f = parse_surface_csv(&artifact(&path)?, kind)?;
            for (qi, q) in f.qgrid.qs().iter().enumerate() {
                let rows: Vec<Vec<String>> = f
                    .grid
                    .scales()
                    .iter()
                    .enumerate()
                    .filter_map(|(si, s)| f.get(qi, si).map(|v| vec![s.to_string(), v.to_string()]))
                    .collect();
                w.emit(
                    format!("fq_{}_{}_q{q}.csv", kind.tag(), run.dir),
                    format!("{} {}", kind.tag(), run.dir),
                    format!("q={q}"),
                    &["s", "F"],
                    &rows,
                )?;
            }
        }
    }
    Ok(())
}

fn exponents(dir: &Path, m: &AnalyzeManifest, w: &mut Writer) -> CliResult<()> {
    for run in &m.runs {
        for name in ["lambda", "h_x", "h_y", "h_xy"] {
            let fit = parse_fit_csv(&artifact(&dir.join(&run.dir).join(format!("{name}.csv")))?)?;
            let rows: Vec<Vec<String>> = fit
                .iter()
                .filter_map(|&(q, e, se)| {
                    Some(vec![q.to_string(), e?.to_string(), se?.to_string()])
                })
                .collect();
            w.emit(
                format!("exponents_{name}_{}.csv", run.dir),
                run.dir.clone(),
                name.into(),
                &["q", "exponent", "stderr"],
                &rows,
            )?;
        }
    }
    Ok(())
}

fn gap(dir: &Path, m: &AnalyzeManifest, w: &mut Writer) -> CliResult<()> {
    for run in &m.runs {
        // The gap table shares the (q, value, stderr) layout of fit tables.
        let g = parse_fit_csv(&artifact(&dir.join(&run.dir).join("gap.csv"))?)?;
        let rows: Vec<Vec<String>> = g
            .iter()
            .filter_map(|&(q, d, se)| Some(vec![q.to_string(), d?.to_string(), se?.to_string()]))
            .collect();
        w.emit(
            format!("gap_{}.csv", run.dir),
            "d_xy".into(),
            run.dir.clone(),
            &["q", "d", "stderr"],
            &rows,
        )?;
    }
    Ok(())
}

fn rho(dir: &Path, m: &AnalyzeManifest, qs: &[f64], w: &mut Writer) -> CliResult<()> {
    for &q in qs {
        if !m.qgrid.iter().any(|g| (g - q).abs() < 1e-9) {
            return Err(CliError::invalid(format!(
                "q={q} is not on the analysis q grid"
            )));
        }
        for run in &m.runs {
            let table = parse_rho_csv(&artifact(&dir.join(&run.dir).join("rho.csv"))?)?;
            let rows: Vec<Vec<String>> = table
                .iter()
                .filter(|(tq, _, _)| (tq - q).abs() < 1e-9)
                .filter_map(|&(_, s, r)| Some(vec![s.to_string(), r?.to_string()]))
                .collect();
            w.emit(
                format!("rho_q{q}_{}.csv", run.dir),
                format!("q={q}"),
                run.dir.clone(),
                &["s", "rho"],
                &rows,
            )?;
        }
    }
    Ok(())
}

fn curve_rows(s: &Series) -> Vec<Vec<String>> {
    s.values()
        .iter()
        .enumerate()
        .map(|(i, v)| vec![s.timestamp(i).to_string(), v.to_string()])
        .collect()
}

fn evolution(dir: &Path, window: f64, step: f64, w: &mut Writer) -> CliResult<()> {
    let manifest = ingest::read_manifest(dir)?;
    for a in &manifest.assets {
        let t =
            read_triple(dir, &a.asset).map_err(|e| CliError::from(e).context(a.asset.clone()))?;
        let price = t.returns.with_values(t.close_prices())?;
        let quantities = [
            ("price", price),
            ("abs_returns", abs_series(&t.returns)),
            ("volume", t.volume.clone()),
            ("count", t.count.clone()),
        ];
        for (name, s) in quantities {
            let r = rolling_mean(&s, window, step)?;
            w.emit(
                format!("evolution_{name}_{}.csv", a.asset),
                name.into(),
                a.asset.clone(),
                &["timestamp_ms", "mean"],
                &curve_rows(&r),
            )?;
        }
    }
    Ok(())
}

pub fn run(args: &PlotArgs) -> CliResult<PlotManifest> {
    let mut w = Writer {
        out: &args.out,
        curves: Vec::new(),
    };
    let (name, fit_range) = match args.figure {
        Figure::Evolution => {
            evolution(&args.dir, args.window, args.step, &mut w)?;
            ("evolution", None)
        }
        fig => {
            let m = analyze::read_manifest(&args.dir)?;
            let name = match fig {
                Figure::FqSurface => {
                    fq_surface(&args.dir, &m, &mut w)?;
                    "fq-surface"
                }
                Figure::Exponents => {
                    exponents(&args.dir, &m, &mut w)?;
                    "exponents"
                }
                Figure::Gap => {
                    gap(&args.dir, &m, &mut w)?;
                    "gap"
                }
                _ => {
                    rho(&args.dir, &m, &parse_list(&args.q, "q")?, &mut w)?;
                    "rho"
                }
            };
            (name, Some(m.fit_range))
        }
    };
    let manifest = PlotManifest {
        figure: name.into(),
        fit_range,
        curves: w.curves,
    };
    write_json(&args.out.join(MANIFEST), &manifest)?;
    Ok(manifest)
}
