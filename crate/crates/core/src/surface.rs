//! Lattice-valued results: fluctuation surfaces, scaling fits and the
//! detrended cross-correlation panel.

use serde::{Deserialize, Serialize};

use crate::grid::{QGrid, ScaleGrid};

/// Which fluctuation function a surface holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceKind {
    UnivariateX,
    UnivariateY,
    BivariateXy,
}

impl SurfaceKind {
    pub fn is_univariate(self) -> bool {
        !matches!(self, SurfaceKind::BivariateXy)
    }

    pub fn tag(self) -> &'static str {
        match self {
            SurfaceKind::UnivariateX => "xx",
            SurfaceKind::UnivariateY => "yy",
            SurfaceKind::BivariateXy => "xy",
        }
    }
}

/// `F_q(s)` over a (q, s) lattice. Missing lattice points are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSurface {
    pub grid: ScaleGrid,
    pub qgrid: QGrid,
    pub kind: SurfaceKind,
    /// Row-major by q: index `qi * grid.len() + si`.
    pub values: Vec<Option<f64>>,
    /// `M_s` per scale.
    pub segment_counts: Vec<usize>,
    /// Segments excluded from the negative-q moments, per (q, s).
    pub excluded: Vec<usize>,
}

impl FluctuationSurface {
    #[inline]
    pub fn index(&self, qi: usize, si: usize) -> usize {
        qi * self.grid.len() + si
    }

    pub fn get(&self, qi: usize, si: usize) -> Option<f64> {
        self.values[self.index(qi, si)]
    }

    pub fn row(&self, qi: usize) -> &[Option<f64>] {
        let n = self.grid.len();
        &self.values[qi * n..(qi + 1) * n]
    }

    pub fn excluded_at(&self, qi: usize, si: usize) -> usize {
        self.excluded[self.index(qi, si)]
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Elementwise negation (missing points stay missing).
    pub fn negated(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.map(|x| -x)).collect(),
            ..self.clone()
        }
    }

    pub fn same_lattice(&self, other: &Self) -> bool {
        self.grid == other.grid && self.qgrid == other.qgrid
    }
}

/// One successful power-law fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub r2: f64,
    pub points: usize,
}

/// Why a q value could not be fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitIssue {
    /// In-range values do not share one sign.
    MixedSign,
    /// A lattice point inside the range is missing.
    MissingPoint,
    /// A lattice point inside the range is exactly zero.
    ZeroValue,
    /// Source fit for a derived quantity failed.
    Upstream,
}

/// Per-q power-law exponents over a common fit range.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub qgrid: QGrid,
    /// Inclusive `(s_lo, s_hi)`, both grid members.
    pub fit_range: (usize, usize),
    pub fits: Vec<std::result::Result<PowerLawFit, FitIssue>>,
}

impl ScalingFit {
    pub fn exponent(&self, qi: usize) -> Option<f64> {
        self.fits[qi].as_ref().ok().map(|f| f.exponent)
    }

    pub fn stderr(&self, qi: usize) -> Option<f64> {
        self.fits[qi].as_ref().ok().map(|f| f.stderr)
    }

    pub fn r2(&self, qi: usize) -> Option<f64> {
        self.fits[qi].as_ref().ok().map(|f| f.r2)
    }

    pub fn exponents(&self) -> Vec<Option<f64>> {
        (0..self.fits.len()).map(|i| self.exponent(i)).collect()
    }

    /// q values that could not be fitted.
    pub fn unfittable(&self) -> Vec<(f64, FitIssue)> {
        self.qgrid
            .qs()
            .iter()
            .zip(&self.fits)
            .filter_map(|(&q, f)| f.as_ref().err().map(|e| (q, *e)))
            .collect()
    }
}

/// `rho_q(s)` over a (q, s) lattice. Missing points are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoPanel {
    pub grid: ScaleGrid,
    pub qgrid: QGrid,
    pub values: Vec<Option<f64>>,
}

impl RhoPanel {
    pub fn get(&self, qi: usize, si: usize) -> Option<f64> {
        self.values[qi * self.grid.len() + si]
    }

    pub fn row(&self, qi: usize) -> &[Option<f64>] {
        let n = self.grid.len();
        &self.values[qi * n..(qi + 1) * n]
    }

    /// Number of lattice points with `|rho| > 1 + tol`, per q.
    pub fn bound_violations(&self, tol: f64) -> Vec<usize> {
        (0..self.qgrid.len())
            .map(|qi| {
                self.row(qi)
                    .iter()
                    .flatten()
                    .filter(|r| r.abs() > 1.0 + tol)
                    .count()
            })
            .collect()
    }
}
