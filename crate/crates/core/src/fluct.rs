//! Univariate and bivariate fluctuation functions over the (q, s) lattice.
//!
//! For a set of segment covariances `f_v` the bivariate function is
//!
//! ```text
//! S     = (1/M) * sum_v sign(f_v) * |f_v|^(q/2)
//! F_q   = sign(S) * |S|^(1/q)
//! ```
//!
//! and the univariate one is the same expression with all signs positive.
//! For negative q, segments with `|f_v| < EXCLUSION_THRESHOLD` are skipped
//! and `M` counts only the remaining ones.

use rayon::prelude::*;

use crate::detrend::{
    check_order, segment_stats_pair_with, segment_stats_with, PolyBasis, SegmentStats,
};
use crate::error::{MfxError, Result};
use crate::grid::{QGrid, ScaleGrid};
use crate::numeric::{sign, CompensatedSum};
use crate::series::Series;
use crate::surface::{FluctuationSurface, SurfaceKind};

/// Segments with |f^2| below this are dropped from negative-q moments.
pub const EXCLUSION_THRESHOLD: f64 = 1e-300;

/// One lattice point: value (if defined) and the number of excluded segments.
struct Moment {
    value: Option<f64>,
    excluded: usize,
}

fn signed_moment(values: &[f64], q: f64, signed: bool) -> Moment {
    let half = 0.5 * q;
    let mut acc = CompensatedSum::new();
    let mut used = 0usize;
    for &f in values {
        let a = f.abs();
        if q < 0.0 && a < EXCLUSION_THRESHOLD {
            continue;
        }
        let term = a.powf(half);
        acc.add(if signed { sign(f) * term } else { term });
        used += 1;
    }
    let excluded = values.len() - used;
    if used == 0 {
        return Moment {
            value: None,
            excluded,
        };
    }
    let s = acc.value() / used as f64;
    if !s.is_finite() {
        return Moment {
            value: None,
            excluded,
        };
    }
    let f = if signed {
        sign(s) * s.abs().powf(1.0 / q)
    } else {
        s.powf(1.0 / q)
    };
    Moment {
        value: f.is_finite().then_some(f),
        excluded,
    }
}

fn build_surface(
    stats: &[SegmentStats],
    grid: &ScaleGrid,
    qgrid: &QGrid,
    kind: SurfaceKind,
) -> Result<FluctuationSurface> {
    if stats.len() != grid.len()
        || stats
            .iter()
            .zip(grid.scales())
            .any(|(st, &s)| st.scale != s)
    {
        return Err(MfxError::GridMismatch);
    }
    let signed = !kind.is_univariate();
    if !signed {
        for st in stats {
            if let Some(&v) = st.values.iter().find(|v| **v < 0.0) {
                return Err(MfxError::NegativeVariance {
                    scale: st.scale,
                    value: v,
                });
            }
        }
    }
    let n = grid.len();
    let mut values = vec![None; qgrid.len() * n];
    let mut excluded = vec![0; qgrid.len() * n];
    for (qi, &q) in qgrid.qs().iter().enumerate() {
        for (si, st) in stats.iter().enumerate() {
            let m = signed_moment(&st.values, q, signed);
            values[qi * n + si] = m.value;
            excluded[qi * n + si] = m.excluded;
        }
    }
    Ok(FluctuationSurface {
        grid: grid.clone(),
        qgrid: qgrid.clone(),
        kind,
        values,
        segment_counts: stats.iter().map(|s| s.values.len()).collect(),
        excluded,
    })
}

/// Signed bivariate fluctuation function `F_q^XY(s)`.
///
/// Lattice points where every segment is excluded (or the moment
/// overflows) are recorded as missing rather than failing the whole
/// surface.
pub fn fluctuation_xy(
    stats: &[SegmentStats],
    grid: &ScaleGrid,
    qgrid: &QGrid,
) -> Result<FluctuationSurface> {
    build_surface(stats, grid, qgrid, SurfaceKind::BivariateXy)
}

/// Univariate fluctuation function `F_q^XX(s)`; all stats must be >= 0.
pub fn fluctuation_xx(
    stats: &[SegmentStats],
    grid: &ScaleGrid,
    qgrid: &QGrid,
    kind: SurfaceKind,
) -> Result<FluctuationSurface> {
    if !kind.is_univariate() {
        return Err(MfxError::WrongSurfaceKind("univariate"));
    }
    build_surface(stats, grid, qgrid, kind)
}

/// The three surfaces of one pair analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSurfaces {
    pub xy: FluctuationSurface,
    pub xx: FluctuationSurface,
    pub yy: FluctuationSurface,
}

fn check_inputs(len: usize, grid: &ScaleGrid, order: usize) -> Result<()> {
    check_order(order)?;
    grid.validate_for(len, order)
}

/// Full bivariate pipeline: segment layout, detrended profiles, segment
/// statistics and all three surfaces, one pass over segments per scale.
///
/// Scales are processed in parallel on the current rayon pool; results do
/// not depend on the number of workers.
pub fn analyze_pair(
    x: &Series,
    y: &Series,
    grid: &ScaleGrid,
    qgrid: &QGrid,
    order: usize,
) -> Result<PairSurfaces> {
    if x.len() != y.len() {
        return Err(MfxError::LengthMismatch(x.len(), y.len()));
    }
    check_inputs(x.len(), grid, order)?;
    let per_scale = grid
        .scales()
        .par_iter()
        .map(|&s| {
            let basis = PolyBasis::new(s, order)?;
            segment_stats_pair_with(x.values(), y.values(), &basis)
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut xy, mut xx, mut yy) = (Vec::new(), Vec::new(), Vec::new());
    for p in per_scale {
        xy.push(p.xy);
        xx.push(p.xx);
        yy.push(p.yy);
    }
    Ok(PairSurfaces {
        xy: fluctuation_xy(&xy, grid, qgrid)?,
        xx: fluctuation_xx(&xx, grid, qgrid, SurfaceKind::UnivariateX)?,
        yy: fluctuation_xx(&yy, grid, qgrid, SurfaceKind::UnivariateY)?,
    })
}

/// Univariate MFDFA of a single series.
pub fn analyze_series(
    x: &Series,
    grid: &ScaleGrid,
    qgrid: &QGrid,
    order: usize,
) -> Result<FluctuationSurface> {
    check_inputs(x.len(), grid, order)?;
    let stats = grid
        .scales()
        .par_iter()
        .map(|&s| segment_stats_with(x.values(), &PolyBasis::new(s, order)?))
        .collect::<Result<Vec<_>>>()?;
    fluctuation_xx(&stats, grid, qgrid, SurfaceKind::UnivariateX)
}
