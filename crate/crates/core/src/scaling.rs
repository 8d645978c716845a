//! Power-law fits of fluctuation surfaces and the quantities derived from
//! them: generalized Hurst exponents `h(q)`, the bivariate exponent
//! `lambda(q)`, the mean univariate exponent `h_xy(q)`, the gap
//! `d(q) = lambda(q) - h_xy(q)` and the coefficient panel `rho_q(s)`.

use serde::{Deserialize, Serialize};

use crate::error::{MfxError, Result};
use crate::grid::QGrid;
use crate::numeric::CompensatedSum;
use crate::surface::{
    FitIssue, FluctuationSurface, PowerLawFit, RhoPanel, ScalingFit, SurfaceKind,
};

/// Minimum number of grid scales inside a fit range.
pub const MIN_FIT_SCALES: usize = 5;

/// Ordinary least squares of `y` on `x` with the slope standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r2: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> LinearFit {
    let n = x.len();
    debug_assert!(n >= 2 && n == y.len());
    let nf = n as f64;
    let mx = crate::numeric::mean(x);
    let my = crate::numeric::mean(y);
    let (mut sxx, mut sxy, mut syy) = (
        CompensatedSum::new(),
        CompensatedSum::new(),
        CompensatedSum::new(),
    );
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx.add(dx * dx);
        sxy.add(dx * dy);
        syy.add(dy * dy);
    }
    let (sxx, sxy, syy) = (sxx.value(), sxy.value(), syy.value());
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ssr = CompensatedSum::new();
    for (&a, &b) in x.iter().zip(y) {
        let r = b - (intercept + slope * a);
        ssr.add(r * r);
    }
    let ssr = ssr.value();
    let slope_stderr = if n > 2 {
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r2 = if syy > 0.0 {
        (1.0 - ssr / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    LinearFit {
        slope,
        intercept,
        slope_stderr,
        r2,
    }
}

fn range_indices(
    surface: &FluctuationSurface,
    fit_range: (usize, usize),
) -> Result<(usize, usize)> {
    let (lo, hi) = fit_range;
    let i = surface
        .grid
        .position(lo)
        .ok_or(MfxError::ScaleNotInGrid(lo))?;
    let j = surface
        .grid
        .position(hi)
        .ok_or(MfxError::ScaleNotInGrid(hi))?;
    let got = if j >= i { j - i + 1 } else { 0 };
    if got < MIN_FIT_SCALES {
        return Err(MfxError::TooFewScales {
            got,
            min: MIN_FIT_SCALES,
        });
    }
    Ok((i, j))
}

fn fit_row(log_s: &[f64], row: &[Option<f64>]) -> std::result::Result<PowerLawFit, FitIssue> {
    let mut ys = Vec::with_capacity(row.len());
    let mut sign = 0.0;
    for v in row {
        let v = v.ok_or(FitIssue::MissingPoint)?;
        if v == 0.0 {
            return Err(FitIssue::ZeroValue);
        }
        let sg = v.signum();
        if sign == 0.0 {
            sign = sg;
        } else if sg != sign {
            return Err(FitIssue::MixedSign);
        }
        ys.push(v.abs().ln());
    }
    let f = ols(log_s, &ys);
    Ok(PowerLawFit {
        exponent: f.slope,
        stderr: f.slope_stderr,
        intercept: f.intercept,
        r2: f.r2,
        points: ys.len(),
    })
}

/// Least-squares slope of `ln|F_q(s)|` against `ln s` for every q, over the
/// inclusive scale range `fit_range`.
///
/// A q whose in-range values are missing, zero, or of mixed sign is marked
/// unfittable in the result instead of failing the call.
pub fn fit_power_law(
    surface: &FluctuationSurface,
    fit_range: (usize, usize),
) -> Result<ScalingFit> {
    let (i, j) = range_indices(surface, fit_range)?;
    let log_s: Vec<f64> = surface.grid.scales()[i..=j]
        .iter()
        .map(|&s| (s as f64).ln())
        .collect();
    let fits = (0..surface.qgrid.len())
        .map(|qi| fit_row(&log_s, &surface.row(qi)[i..=j]))
        .collect();
    Ok(ScalingFit {
        qgrid: surface.qgrid.clone(),
        fit_range,
        fits,
    })
}

/// Generalized Hurst exponents `h(q)` of a univariate surface.
pub fn generalized_hurst(
    surface: &FluctuationSurface,
    fit_range: (usize, usize),
) -> Result<ScalingFit> {
    if !surface.kind.is_univariate() {
        return Err(MfxError::WrongSurfaceKind("univariate"));
    }
    fit_power_law(surface, fit_range)
}

fn check_compatible(a: &ScalingFit, b: &ScalingFit) -> Result<()> {
    if a.qgrid != b.qgrid || a.fit_range != b.fit_range {
        return Err(MfxError::GridMismatch);
    }
    Ok(())
}

/// `h_xy(q) = (h_x(q) + h_y(q)) / 2` with stderr `sqrt(se_x^2 + se_y^2) / 2`.
///
/// The combined fit reports the smaller of the two R^2 values.
pub fn mean_hurst(fit_x: &ScalingFit, fit_y: &ScalingFit) -> Result<ScalingFit> {
    check_compatible(fit_x, fit_y)?;
    let fits = fit_x
        .fits
        .iter()
        .zip(&fit_y.fits)
        .map(|(a, b)| match (a, b) {
            (Ok(a), Ok(b)) => Ok(PowerLawFit {
                exponent: 0.5 * (a.exponent + b.exponent),
                stderr: 0.5 * (a.stderr * a.stderr + b.stderr * b.stderr).sqrt(),
                intercept: 0.5 * (a.intercept + b.intercept),
                r2: a.r2.min(b.r2),
                points: a.points.min(b.points),
            }),
            _ => Err(FitIssue::Upstream),
        })
        .collect();
    Ok(ScalingFit {
        qgrid: fit_x.qgrid.clone(),
        fit_range: fit_x.fit_range,
        fits,
    })
}

/// `d(q) = lambda(q) - h_xy(q)` with its combined standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentGap {
    pub qgrid: QGrid,
    pub fit_range: (usize, usize),
    pub d: Vec<Option<f64>>,
    pub stderr: Vec<Option<f64>>,
}

pub fn exponent_gap(lambda: &ScalingFit, h_xy: &ScalingFit) -> Result<ExponentGap> {
    check_compatible(lambda, h_xy)?;
    let (d, stderr) = lambda
        .fits
        .iter()
        .zip(&h_xy.fits)
        .map(|(l, h)| match (l, h) {
            (Ok(l), Ok(h)) => (
                Some(l.exponent - h.exponent),
                Some((l.stderr * l.stderr + h.stderr * h.stderr).sqrt()),
            ),
            _ => (None, None),
        })
        .unzip();
    Ok(ExponentGap {
        qgrid: lambda.qgrid.clone(),
        fit_range: lambda.fit_range,
        d,
        stderr,
    })
}

/// `rho_q(s)` as the ratio of signed q-th moments,
/// `S_xy / sqrt(S_xx * S_yy)`, at every lattice point.
///
/// With `r = F_xy / sqrt(F_xx * F_yy)` this is `sign(r) |r|^q`, so `rho_2` is
/// the detrended cross-correlation coefficient. Points with a missing input
/// or a zero denominator are missing in the panel. Values are not clamped.
pub fn rho_q(
    xy: &FluctuationSurface,
    xx: &FluctuationSurface,
    yy: &FluctuationSurface,
) -> Result<RhoPanel> {
    if xy.kind != SurfaceKind::BivariateXy {
        return Err(MfxError::WrongSurfaceKind("bivariate"));
    }
    if !xx.kind.is_univariate() || !yy.kind.is_univariate() {
        return Err(MfxError::WrongSurfaceKind("univariate"));
    }
    if !xy.same_lattice(xx) || !xy.same_lattice(yy) {
        return Err(MfxError::GridMismatch);
    }
    let ns = xy.grid.len();
    let qs = xy.qgrid.qs();
    let values = xy
        .values
        .iter()
        .zip(&xx.values)
        .zip(&yy.values)
        .enumerate()
        .map(|(i, ((f, a), b))| {
            let q = qs[i / ns];
            let (f, a, b) = (f.as_ref()?, a.as_ref()?, b.as_ref()?);
            let prod = a * b;
            let den = if prod > 0.0 && prod.is_finite() {
                prod.sqrt()
            } else {
                a.sqrt() * b.sqrt()
            };
            (den > 0.0 && den.is_finite()).then(|| {
                let r = f / den;
                r.signum() * r.abs().powf(q)
            })
        })
        .collect();
    Ok(RhoPanel {
        grid: xy.grid.clone(),
        qgrid: xy.qgrid.clone(),
        values,
    })
}

/// Exponent at q = 0, linearly interpolated between the grid q values
/// closest to zero on either side.
pub fn value_at_zero(fit: &ScalingFit) -> Option<f64> {
    let qs = fit.qgrid.qs();
    let hi = qs.iter().position(|&q| q > 0.0)?;
    if hi == 0 {
        return None;
    }
    let lo = hi - 1;
    let (ql, qh) = (qs[lo], qs[hi]);
    let (el, eh) = (fit.exponent(lo)?, fit.exponent(hi)?);
    Some(el + (eh - el) * (0.0 - ql) / (qh - ql))
}

/// Parameters of the automatic fit-range search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeSearch {
    /// Minimum width of a candidate window in decades of s.
    pub min_decades: f64,
    /// q values in `[q_lo, q_hi]` enter the score.
    pub q_lo: f64,
    pub q_hi: f64,
    /// Windows within this much of the best score count as ties; the
    /// widest tie wins.
    pub tie_tolerance: f64,
}

impl Default for RangeSearch {
    fn default() -> Self {
        Self {
            min_decades: 1.5,
            q_lo: 1.0,
            q_hi: 3.0,
            tie_tolerance: 1e-4,
        }
    }
}

/// Suggests a common fit range for several surfaces on one lattice.
///
/// Every contiguous window with at least [`MIN_FIT_SCALES`] scales spanning
/// `min_decades` is scored by the minimum R^2 over the selected q values and
/// all surfaces (an unfittable q scores 0). The best-scoring window is
/// chosen, preferring the widest among near-ties. If no window is wide
/// enough, the whole grid is returned.
pub fn suggest_fit_range(
    surfaces: &[&FluctuationSurface],
    search: RangeSearch,
) -> Result<(usize, usize)> {
    let first = *surfaces.first().ok_or(MfxError::EmptyInput)?;
    if surfaces.iter().any(|s| !s.same_lattice(first)) {
        return Err(MfxError::GridMismatch);
    }
    let grid = &first.grid;
    let n = grid.len();
    if n < MIN_FIT_SCALES {
        return Err(MfxError::TooFewScales {
            got: n,
            min: MIN_FIT_SCALES,
        });
    }
    let log_s: Vec<f64> = grid.scales().iter().map(|&s| (s as f64).ln()).collect();
    let q_idx: Vec<usize> = first
        .qgrid
        .qs()
        .iter()
        .enumerate()
        .filter(|(_, &q)| q >= search.q_lo && q <= search.q_hi)
        .map(|(i, _)| i)
        .collect();
    let min_width = search.min_decades * std::f64::consts::LN_10;

    // (score, width, i, j)
    let mut candidates: Vec<(f64, f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + MIN_FIT_SCALES - 1)..n {
            let width = log_s[j] - log_s[i];
            if width + 1e-12 < min_width {
                continue;
            }
            let mut score = f64::INFINITY;
            for s in surfaces {
                for &qi in &q_idx {
                    let r2 = fit_row(&log_s[i..=j], &s.row(qi)[i..=j])
                        .map(|f| f.r2)
                        .unwrap_or(0.0);
                    score = score.min(r2);
                }
            }
            if score.is_finite() {
                candidates.push((score, width, i, j));
            }
        }
    }
    let Some(best) = candidates.iter().map(|c| c.0).reduce(f64::max) else {
        return Ok((grid.min(), grid.max()));
    };
    let (_, _, i, j) = candidates
        .into_iter()
        .filter(|c| c.0 >= best - search.tie_tolerance)
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.2.cmp(&a.2)))
        .expect("best candidate exists");
    Ok((grid.scales()[i], grid.scales()[j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::ScaleGrid;

    fn surface_from(
        grid: &ScaleGrid,
        qgrid: &QGrid,
        kind: SurfaceKind,
        f: impl Fn(f64, usize) -> Option<f64>,
    ) -> FluctuationSurface {
        let mut values = Vec::new();
        for &q in qgrid.qs() {
            for &s in grid.scales() {
                values.push(f(q, s));
            }
        }
        FluctuationSurface {
            grid: grid.clone(),
            qgrid: qgrid.clone(),
            kind,
            values,
            segment_counts: vec![0; grid.len()],
            excluded: vec![0; grid.len() * qgrid.len()],
        }
    }

    fn lattice() -> (ScaleGrid, QGrid) {
        (
            ScaleGrid::log_spaced(10, 10_000, 20).unwrap(),
            QGrid::new(vec![-2.0, 1.0, 2.0, 4.0]).unwrap(),
        )
    }

    #[test]
    fn exact_power_law() {
        let (g, q) = lattice();
        let s = surface_from(&g, &q, SurfaceKind::UnivariateX, |_, s| {
            Some((s as f64).powf(0.7))
        });
        let fit = fit_power_law(&s, (g.min(), g.max())).unwrap();
        for qi in 0..q.len() {
            let f = fit.fits[qi].unwrap();
            assert!((f.exponent - 0.7).abs() < 1e-12);
            assert!(f.stderr < 1e-12);
            assert!((f.r2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prefactor_goes_to_intercept() {
        let (g, q) = lattice();
        let s = surface_from(&g, &q, SurfaceKind::BivariateXy, |_, s| {
            Some(-3.0 * (s as f64).powf(1.2))
        });
        let fit = fit_power_law(&s, (g.scales()[2], g.scales()[12])).unwrap();
        let f = fit.fits[0].unwrap();
        assert!((f.exponent - 1.2).abs() < 1e-12);
        assert!((f.intercept - 3.0f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn mixed_sign_and_missing_are_unfittable() {
        let (g, q) = lattice();
        let s = surface_from(&g, &q, SurfaceKind::BivariateXy, |q, s| {
            if q == 1.0 {
                Some(if s % 2 == 0 { 1.0 } else { -1.0 } * s as f64)
            } else if q == -2.0 && s == g.scales()[3] {
                None
            } else {
                Some(s as f64)
            }
        });
        let fit = fit_power_law(&s, (g.min(), g.max())).unwrap();
        assert_eq!(fit.fits[0], Err(FitIssue::MissingPoint));
        assert_eq!(fit.fits[1], Err(FitIssue::MixedSign));
        assert!(fit.fits[2].is_ok());
        assert_eq!(fit.unfittable().len(), 2);
    }

    #[test]
    fn range_validation() {
        let (g, q) = lattice();
        let s = surface_from(&g, &q, SurfaceKind::UnivariateX, |_, s| Some(s as f64));
        assert!(matches!(
            fit_power_law(&s, (11, g.max())),
            Err(MfxError::ScaleNotInGrid(11))
        ));
        assert!(matches!(
            fit_power_law(&s, (g.scales()[0], g.scales()[3])),
            Err(MfxError::TooFewScales { got: 4, .. })
        ));
        assert!(matches!(
            generalized_hurst(
                &surface_from(&g, &q, SurfaceKind::BivariateXy, |_, s| Some(s as f64)),
                (g.min(), g.max())
            ),
            Err(MfxError::WrongSurfaceKind(_))
        ));
    }

    fn const_fit(q: &QGrid, e: f64, se: f64) -> ScalingFit {
        ScalingFit {
            qgrid: q.clone(),
            fit_range: (10, 100),
            fits: q
                .qs()
                .iter()
                .map(|_| {
                    Ok(PowerLawFit {
                        exponent: e,
                        stderr: se,
                        intercept: 0.0,
                        r2: 1.0,
                        points: 5,
                    })
                })
                .collect(),
        }
    }

    #[test]
    fn mean_hurst_rules() {
        let q = QGrid::new(vec![1.0, 2.0]).unwrap();
        let m = mean_hurst(&const_fit(&q, 0.6, 0.01), &const_fit(&q, 0.8, 0.01)).unwrap();
        assert!((m.exponent(0).unwrap() - 0.7).abs() < 1e-15);
        // 0.5 * sqrt(2e-4)
        assert!((m.stderr(1).unwrap() - 0.007_071_067_811_865_476).abs() < 1e-15);
        let same = mean_hurst(&const_fit(&q, 0.6, 0.0), &const_fit(&q, 0.6, 0.0)).unwrap();
        assert_eq!(same.exponent(0), Some(0.6));
        let other = const_fit(&QGrid::new(vec![1.0]).unwrap(), 0.6, 0.0);
        assert_eq!(
            mean_hurst(&other, &const_fit(&q, 0.6, 0.0)),
            Err(MfxError::GridMismatch)
        );
    }

    #[test]
    fn gap_of_identical_fits_is_zero() {
        let q = QGrid::new(vec![1.0, 2.0]).unwrap();
        let a = const_fit(&q, 0.63, 0.02);
        let g = exponent_gap(&a, &a).unwrap();
        assert!(g.d.iter().all(|d| *d == Some(0.0)));
        assert!((g.stderr[0].unwrap() - 0.02 * 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rho_missing_and_zero_denominator() {
        let (g, q) = lattice();
        let xy = surface_from(&g, &q, SurfaceKind::BivariateXy, |_, s| {
            Some(if s == 10 { 1.0 } else { 0.5 })
        });
        let xx = surface_from(&g, &q, SurfaceKind::UnivariateX, |q, s| {
            if q == 4.0 {
                None
            } else {
                Some(if s == 10 { 0.0 } else { 1.0 })
            }
        });
        let yy = surface_from(&g, &q, SurfaceKind::UnivariateY, |_, _| Some(1.0));
        let r = rho_q(&xy, &xx, &yy).unwrap();
        assert_eq!(r.get(0, 0), None);
        assert_eq!(r.get(0, 1), Some(4.0));
        assert_eq!(r.get(1, 1), Some(0.5));
        assert_eq!(r.get(2, 1), Some(0.25));
        assert!(r.row(3).iter().all(|v| v.is_none()));
        assert!(rho_q(&xx, &xx, &yy).is_err());
    }

    #[test]
    fn zero_interpolation() {
        let q = QGrid::new(vec![-0.2, 0.2]).unwrap();
        let mut f = const_fit(&q, 0.5, 0.0);
        f.fits[1] = Ok(PowerLawFit {
            exponent: 0.7,
            stderr: 0.0,
            intercept: 0.0,
            r2: 1.0,
            points: 5,
        });
        assert!((value_at_zero(&f).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn range_suggestion_prefers_clean_scaling() {
        let g = ScaleGrid::log_spaced(10, 100_000, 40).unwrap();
        let q = QGrid::new(vec![1.0, 2.0, 3.0]).unwrap();
        // Clean power law between 100 and 20000, crossovers outside.
        let s = surface_from(&g, &q, SurfaceKind::UnivariateX, |_, s| {
            let s = s as f64;
            Some(if s < 100.0 {
                100f64.powf(0.5) * (s / 100.0).powf(1.5)
            } else if s > 20_000.0 {
                20_000f64.powf(0.5)
            } else {
                s.powf(0.5)
            })
        });
        let (lo, hi) = suggest_fit_range(&[&s], RangeSearch::default()).unwrap();
        assert!(lo >= 90 && hi <= 21_000, "{lo}..{hi}");
        assert!((hi as f64 / lo as f64).log10() >= 1.5);
    }
}
