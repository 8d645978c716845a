//! Analysis settings: a flat `key = value` file merged with flag overrides.
//!
//! Recognised keys mirror the long flag names: `dt`, `order`, `scales`,
//! `qgrid`, `fit-range`, `tau`, `stability`. Lines starting with `#` are
//! comments.

use std::collections::BTreeMap;
use std::path::Path;

use mfx_core::grid::{default_scale_grid, QGrid, ScaleGrid};
use serde::Serialize;

use crate::CliError;

/// Default detrending order.
pub const DEFAULT_ORDER: usize = 2;
/// Default lags in seconds: simultaneous, X leading and Y leading by 1 min.
pub const DEFAULT_TAUS: [f64; 3] = [0.0, 60.0, -60.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum ScaleSpec {
    /// 40 log-spaced scales from `max(20, 4(m+2))` to `T/20`.
    Default,
    LogSpaced {
        min: usize,
        max: usize,
        count: usize,
    },
    List {
        scales: Vec<usize>,
    },
}

impl ScaleSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s == "default" || s == "auto" {
            return Ok(Self::Default);
        }
        if s.contains(':') {
            let p: Vec<&str> = s.split(':').collect();
            if p.len() != 3 {
                return Err(CliError::invalid(format!(
                    "scales {s:?}: expected min:max:count"
                )));
            }
            return Ok(Self::LogSpaced {
                min: parse_num(p[0], "scale")?,
                max: parse_num(p[1], "scale")?,
                count: parse_num(p[2], "scale count")?,
            });
        }
        Ok(Self::List {
            scales: s
                .split(',')
                .map(|v| parse_num(v, "scale"))
                .collect::<Result<_, _>>()?,
        })
    }

    pub fn build(&self, len: usize, order: usize) -> Result<ScaleGrid, CliError> {
        let g = match self {
            Self::Default => default_scale_grid(len, order)?,
            Self::LogSpaced { min, max, count } => ScaleGrid::log_spaced(*min, *max, *count)?,
            Self::List { scales } => ScaleGrid::new(scales.clone())?,
        };
        g.validate_for(len, order)?;
        Ok(g)
    }
}

/// `lo:hi:step` or a comma-separated list.
pub fn parse_qgrid(s: &str) -> Result<QGrid, CliError> {
    let s = s.trim();
    if s == "default" {
        return Ok(QGrid::default());
    }
    if s.contains(':') {
        let p: Vec<&str> = s.split(':').collect();
        if p.len() != 3 {
            return Err(CliError::invalid(format!(
                "qgrid {s:?}: expected lo:hi:step"
            )));
        }
        return Ok(QGrid::stepped(
            parse_num(p[0], "q")?,
            parse_num(p[1], "q")?,
            parse_num(p[2], "q step")?,
        )?);
    }
    Ok(QGrid::new(parse_list(s, "q")?)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum FitRangeSpec {
    /// Searched from the surfaces of the smallest |tau|.
    Auto,
    Full,
    Fixed {
        lo: usize,
        hi: usize,
    },
}

impl FitRangeSpec {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "auto" => Ok(Self::Auto),
            "full" => Ok(Self::Full),
            other => {
                let (lo, hi) = other.split_once(':').ok_or_else(|| {
                    CliError::invalid(format!("fit-range {other:?}: expected auto, full or lo:hi"))
                })?;
                Ok(Self::Fixed {
                    lo: parse_num(lo, "fit-range")?,
                    hi: parse_num(hi, "fit-range")?,
                })
            }
        }
    }
}

pub fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::invalid(format!("bad {what} {:?}", s.trim())))
}

pub fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(|v| parse_num(v, what)).collect()
}

/// Reads a flat `key = value` file.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::invalid(format!("config line {}: expected key = value", i + 1))
        })?;
        out.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(out)
}

/// Fully resolved analysis parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyzeSettings {
    /// `None` infers the interval from the input timestamps.
    pub dt: Option<f64>,
    pub order: usize,
    pub scales: ScaleSpec,
    pub qgrid: Vec<f64>,
    pub fit_range: FitRangeSpec,
    pub taus: Vec<f64>,
    pub stability: bool,
}

impl Default for AnalyzeSettings {
    fn default() -> Self {
        Self {
            dt: None,
            order: DEFAULT_ORDER,
            scales: ScaleSpec::Default,
            qgrid: QGrid::default().qs().to_vec(),
            fit_range: FitRangeSpec::Auto,
            taus: DEFAULT_TAUS.to_vec(),
            stability: false,
        }
    }
}

impl AnalyzeSettings {
    /// Applies `key = value` entries; unknown keys are rejected.
    pub fn apply(&mut self, entries: &BTreeMap<String, String>) -> Result<(), CliError> {
        for (k, v) in entries {
            match k.as_str() {
                "dt" => self.dt = Some(parse_num(v, "dt")?),
                "order" => self.order = parse_num(v, "order")?,
                "scales" => self.scales = ScaleSpec::parse(v)?,
                "qgrid" => self.qgrid = parse_qgrid(v)?.qs().to_vec(),
                "fit-range" => self.fit_range = FitRangeSpec::parse(v)?,
                "tau" => self.taus = parse_list(v, "tau")?,
                "stability" => self.stability = parse_num(v, "stability")?,
                other => return Err(CliError::invalid(format!("unknown config key {other:?}"))),
            }
        }
        Ok(())
    }

    pub fn qgrid(&self) -> Result<QGrid, CliError> {
        Ok(QGrid::new(self.qgrid.clone())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_config_and_overrides() {
        let mut s = AnalyzeSettings::default();
        let cfg =
            parse_config("# run\norder = 3\nfit_range = 40:4000\ntau = 0, 10\nqgrid = -2:2:1\n")
                .unwrap();
        s.apply(&cfg).unwrap();
        assert_eq!(s.order, 3);
        assert_eq!(s.fit_range, FitRangeSpec::Fixed { lo: 40, hi: 4000 });
        assert_eq!(s.taus, vec![0.0, 10.0]);
        assert_eq!(s.qgrid, vec![-2.0, -1.0, 1.0, 2.0]);
        assert!(s.apply(&parse_config("colour = red").unwrap()).is_err());
        assert!(parse_config("nonsense").is_err());
    }

    #[test]
    fn default_grids() {
        let s = AnalyzeSettings::default();
        assert_eq!(s.qgrid.len(), 40);
        assert_eq!(s.qgrid[0], -4.0);
        let g = s.scales.build(1_000_000, 2).unwrap();
        assert_eq!(g.len(), 40);
        assert_eq!(
            ScaleSpec::parse("10,20,40").unwrap(),
            ScaleSpec::List {
                scales: vec![10, 20, 40]
            }
        );
        assert!(ScaleSpec::parse("1:2").is_err());
    }
}
