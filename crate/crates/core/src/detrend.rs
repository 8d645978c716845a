//! Segmentation, profile detrending and segment-wise detrended
//! (co)variances.
//!
//! A series of length `T` is cut into `M_s = 2 floor(T/s)` segments of
//! length `s`: `floor(T/s)` taken from the front and the same number taken
//! from the back, so every sample is covered even when `s` does not divide
//! `T`. Within each segment the series is integrated and a least-squares
//! polynomial of degree `m` is removed from the resulting profile.

use crate::error::{MfxError, Result};
use crate::numeric::{dot, mean, CompensatedSum};
use crate::series::Series;

/// Supported polynomial orders.
pub const ORDER_RANGE: std::ops::RangeInclusive<usize> = 1..=5;

pub fn check_order(order: usize) -> Result<()> {
    if ORDER_RANGE.contains(&order) {
        Ok(())
    } else {
        Err(MfxError::InvalidOrder(order))
    }
}

/// Start offsets of the `M_s` segments at scale `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentLayout {
    pub scale: usize,
    pub len: usize,
    /// Front segments first (`0, s, 2s, ...`), then back segments
    /// (`T-s, T-2s, ...`).
    pub offsets: Vec<usize>,
}

impl SegmentLayout {
    pub fn segment_count(&self) -> usize {
        self.offsets.len()
    }
}

pub fn segment_layout(len: usize, scale: usize) -> Result<SegmentLayout> {
    if scale == 0 || scale > len {
        return Err(MfxError::ScaleExceedsLength { scale, len });
    }
    let n = len / scale;
    let front = (0..n).map(|v| v * scale);
    let back = (1..=n).map(|v| len - v * scale);
    Ok(SegmentLayout {
        scale,
        len,
        offsets: front.chain(back).collect(),
    })
}

/// Orthonormal discrete polynomial basis of degree `order` on `s` points.
///
/// Built by Stieltjes orthogonalisation of `t * q_k` on `t` in `[-1, 1]`
/// (with a second Gram-Schmidt pass), which stays well conditioned for
/// segment lengths far beyond where a raw Vandermonde system breaks down.
#[derive(Debug, Clone)]
pub struct PolyBasis {
    scale: usize,
    columns: Vec<Vec<f64>>,
}

impl PolyBasis {
    pub fn new(scale: usize, order: usize) -> Result<Self> {
        if scale < order + 2 {
            return Err(MfxError::SegmentTooShortForOrder { scale, order });
        }
        let t: Vec<f64> = (0..scale)
            .map(|j| 2.0 * j as f64 / (scale - 1) as f64 - 1.0)
            .collect();
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        let mut v = vec![1.0; scale];
        for k in 0..=order {
            if k > 0 {
                v = columns[k - 1].iter().zip(&t).map(|(q, t)| q * t).collect();
            }
            for _ in 0..2 {
                for q in &columns {
                    let c = dot(&v, q);
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            let norm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|a| *a /= norm);
            columns.push(v.clone());
        }
        Ok(Self { scale, columns })
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn order(&self) -> usize {
        self.columns.len() - 1
    }

    pub fn column(&self, k: usize) -> &[f64] {
        &self.columns[k]
    }

    /// Removes the least-squares polynomial from `profile` in place.
    pub fn remove_trend(&self, profile: &mut [f64]) {
        debug_assert_eq!(profile.len(), self.scale);
        let coeffs: Vec<f64> = self.columns.iter().map(|q| dot(profile, q)).collect();
        for (j, p) in profile.iter_mut().enumerate() {
            let mut trend = 0.0;
            for (c, q) in coeffs.iter().zip(&self.columns) {
                trend += c * q[j];
            }
            *p -= trend;
        }
    }

    /// Integrates `window` and detrends the profile into `out`.
    pub fn detrend_into(&self, window: &[f64], out: &mut [f64]) {
        let mut acc = CompensatedSum::new();
        for (o, &x) in out.iter_mut().zip(window) {
            acc.add(x);
            *o = acc.value();
        }
        self.remove_trend(out);
    }
}

/// Residuals of the integrated `window` after removing a degree-`order`
/// least-squares polynomial.
pub fn detrended_profile(window: &[f64], order: usize) -> Result<Vec<f64>> {
    let basis = PolyBasis::new(window.len(), order)?;
    let mut out = vec![0.0; window.len()];
    basis.detrend_into(window, &mut out);
    Ok(out)
}

/// Detrended covariance of two residual vectors, means removed.
pub fn detrended_covariance(x_res: &[f64], y_res: &[f64]) -> Result<f64> {
    if x_res.len() != y_res.len() {
        return Err(MfxError::LengthMismatch(x_res.len(), y_res.len()));
    }
    if x_res.is_empty() {
        return Err(MfxError::EmptyInput);
    }
    Ok(centered_covariance(x_res, y_res))
}

fn centered_covariance(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let mut acc = CompensatedSum::new();
    for (a, b) in x.iter().zip(y) {
        acc.add((a - mx) * (b - my));
    }
    acc.value() / x.len() as f64
}

fn centered_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    let mut acc = CompensatedSum::new();
    for a in x {
        let d = a - m;
        acc.add(d * d);
    }
    acc.value() / x.len() as f64
}

/// Per-segment detrended (co)variances at one scale, in layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentStats {
    pub scale: usize,
    pub values: Vec<f64>,
}

/// Covariance and both variances from one pass over the segments.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStats {
    pub xy: SegmentStats,
    pub xx: SegmentStats,
    pub yy: SegmentStats,
}

fn check_pair(x: &Series, y: &Series) -> Result<()> {
    if x.len() != y.len() {
        return Err(MfxError::LengthMismatch(x.len(), y.len()));
    }
    Ok(())
}

pub fn segment_stats_pair(x: &Series, y: &Series, scale: usize, order: usize) -> Result<PairStats> {
    check_pair(x, y)?;
    check_order(order)?;
    let basis = PolyBasis::new(scale, order)?;
    segment_stats_pair_with(x.values(), y.values(), &basis)
}

pub(crate) fn segment_stats_pair_with(
    x: &[f64],
    y: &[f64],
    basis: &PolyBasis,
) -> Result<PairStats> {
    let scale = basis.scale();
    let layout = segment_layout(x.len(), scale)?;
    let m = layout.segment_count();
    let (mut xy, mut xx, mut yy) = (
        Vec::with_capacity(m),
        Vec::with_capacity(m),
        Vec::with_capacity(m),
    );
    let mut xr = vec![0.0; scale];
    let mut yr = vec![0.0; scale];
    for &off in &layout.offsets {
        basis.detrend_into(&x[off..off + scale], &mut xr);
        basis.detrend_into(&y[off..off + scale], &mut yr);
        xy.push(centered_covariance(&xr, &yr));
        xx.push(centered_variance(&xr));
        yy.push(centered_variance(&yr));
    }
    Ok(PairStats {
        xy: SegmentStats { scale, values: xy },
        xx: SegmentStats { scale, values: xx },
        yy: SegmentStats { scale, values: yy },
    })
}

/// Detrended variances of a single series at one scale.
pub fn segment_stats(x: &Series, scale: usize, order: usize) -> Result<SegmentStats> {
    check_order(order)?;
    let basis = PolyBasis::new(scale, order)?;
    segment_stats_with(x.values(), &basis)
}

pub(crate) fn segment_stats_with(x: &[f64], basis: &PolyBasis) -> Result<SegmentStats> {
    let scale = basis.scale();
    let layout = segment_layout(x.len(), scale)?;
    let mut xr = vec![0.0; scale];
    let values = layout
        .offsets
        .iter()
        .map(|&off| {
            basis.detrend_into(&x[off..off + scale], &mut xr);
            centered_variance(&xr)
        })
        .collect();
    Ok(SegmentStats { scale, values })
}
