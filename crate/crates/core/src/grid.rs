//! Scale and moment-order grids.

use serde::{Deserialize, Serialize};

use crate::error::{MfxError, Result};

/// Smallest admissible |q|; q = 0 is a singular point of the signed moments.
pub const MIN_ABS_Q: f64 = 0.1;

/// Default number of log-spaced scales.
pub const DEFAULT_SCALE_COUNT: usize = 40;

/// Strictly increasing segment lengths, in samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleGrid {
    scales: Vec<usize>,
}

impl ScaleGrid {
    pub fn new(scales: Vec<usize>) -> Result<Self> {
        if scales.is_empty() {
            return Err(MfxError::InvalidScaleGrid("no scales".into()));
        }
        if scales[0] == 0 {
            return Err(MfxError::InvalidScaleGrid("scale 0".into()));
        }
        if scales.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MfxError::InvalidScaleGrid(
                "scales not strictly increasing".into(),
            ));
        }
        Ok(Self { scales })
    }

    /// `count` log-spaced scales from `min` to `max`, rounded and deduplicated.
    pub fn log_spaced(min: usize, max: usize, count: usize) -> Result<Self> {
        if min == 0 || min > max {
            return Err(MfxError::InvalidScaleGrid(format!(
                "bad bounds {min}..{max}"
            )));
        }
        if count < 2 || min == max {
            return Self::new(vec![min]);
        }
        let ratio = max as f64 / min as f64;
        let mut scales: Vec<usize> = Vec::with_capacity(count);
        for i in 0..count {
            let s = if i == count - 1 {
                max
            } else {
                (min as f64 * ratio.powf(i as f64 / (count - 1) as f64)).round() as usize
            };
            if scales.last().is_none_or(|&last| s > last) {
                scales.push(s);
            }
        }
        Self::new(scales)
    }

    pub fn scales(&self) -> &[usize] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn min(&self) -> usize {
        self.scales[0]
    }

    pub fn max(&self) -> usize {
        *self.scales.last().unwrap()
    }

    pub fn position(&self, scale: usize) -> Option<usize> {
        self.scales.binary_search(&scale).ok()
    }

    /// Checks the grid against a series of length `len` detrended with
    /// polynomials of degree `order`.
    pub fn validate_for(&self, len: usize, order: usize) -> Result<()> {
        let min_scale = order + 2;
        if self.min() < min_scale {
            return Err(MfxError::SegmentTooShortForOrder {
                scale: self.min(),
                order,
            });
        }
        if self.max() > len / 2 {
            return Err(MfxError::ScaleExceedsLength {
                scale: self.max(),
                len,
            });
        }
        Ok(())
    }
}

/// Default grid: ~40 log-spaced scales from `max(20, 4(m+2))` to `T/20`.
pub fn default_scale_grid(len: usize, order: usize) -> Result<ScaleGrid> {
    const MIN_LEN: usize = 200;
    if len < MIN_LEN {
        return Err(MfxError::SeriesTooShort { len, min: MIN_LEN });
    }
    let lo = 20.max(4 * (order + 2));
    let hi = len / 20;
    if lo > hi {
        return Err(MfxError::SeriesTooShort { len, min: 20 * lo });
    }
    ScaleGrid::log_spaced(lo, hi, DEFAULT_SCALE_COUNT)
}

/// Strictly increasing moment orders, none with |q| < 0.1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QGrid {
    qs: Vec<f64>,
}

impl QGrid {
    pub fn new(qs: Vec<f64>) -> Result<Self> {
        if qs.is_empty() {
            return Err(MfxError::InvalidQGrid("no q values".into()));
        }
        if let Some(q) = qs.iter().find(|q| !q.is_finite() || q.abs() < MIN_ABS_Q) {
            return Err(MfxError::InvalidQGrid(format!("inadmissible q = {q}")));
        }
        if qs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MfxError::InvalidQGrid(
                "q values not strictly increasing".into(),
            ));
        }
        Ok(Self { qs })
    }

    /// Evenly stepped grid from `lo` to `hi` inclusive, with |q| < 0.1 dropped.
    ///
    /// Values are computed as `k / denom` style quotients where possible so
    /// that e.g. 0.6 prints as `0.6` rather than `0.6000000000000001`.
    pub fn stepped(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if step.is_nan() || step <= 0.0 || lo > hi {
            return Err(MfxError::InvalidQGrid(format!(
                "bad range {lo}:{hi}:{step}"
            )));
        }
        let inv = 1.0 / step;
        let scale = if (inv - inv.round()).abs() < 1e-9 {
            Some(inv.round())
        } else {
            None
        };
        let n = ((hi - lo) / step + 1e-9).floor() as i64;
        let qs = (0..=n)
            .map(|k| match scale {
                Some(d) => ((lo * d).round() + k as f64) / d,
                None => lo + k as f64 * step,
            })
            .filter(|q| q.abs() >= MIN_ABS_Q)
            .collect();
        Self::new(qs)
    }

    pub fn qs(&self) -> &[f64] {
        &self.qs
    }

    pub fn len(&self) -> usize {
        self.qs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qs.is_empty()
    }

    /// Index of `q`, matched to within 1e-9.
    pub fn position(&self, q: f64) -> Option<usize> {
        self.qs.iter().position(|&v| (v - q).abs() < 1e-9)
    }
}

impl Default for QGrid {
    /// -4.0 to 4.0 in steps of 0.2 with q = 0 removed (40 values).
    fn default() -> Self {
        let qs = (-20..=20)
            .filter(|&k| k != 0)
            .map(|k| k as f64 / 5.0)
            .collect();
        Self { qs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_grid_for_one_million() {
        // Evaluated independently: 40 rounded log-spaced points from 20 to
        // 50000, none collide after rounding.
        let g = default_scale_grid(1_000_000, 2).unwrap();
        assert_eq!(g.min(), 20);
        assert_eq!(g.max(), 50_000);
        assert_eq!(g.len(), 40);
        assert_eq!(&g.scales()[..6], &[20, 24, 30, 37, 45, 55]);
    }

    #[test]
    fn default_grid_for_full_dataset_length() {
        let g = default_scale_grid(6_834_240, 2).unwrap();
        assert_eq!(g.max(), 341_712);
    }

    #[test]
    fn default_grid_rejects_short_series() {
        assert!(matches!(
            default_scale_grid(200, 2),
            Err(MfxError::SeriesTooShort { .. })
        ));
        assert!(matches!(
            default_scale_grid(150, 2),
            Err(MfxError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn default_grid_min_tracks_order() {
        let g = default_scale_grid(100_000, 5).unwrap();
        assert_eq!(g.min(), 28);
    }

    #[test]
    fn default_q_grid_has_forty_values_without_zero() {
        let q = QGrid::default();
        assert_eq!(q.len(), 40);
        assert_eq!(q.qs()[0], -4.0);
        assert_eq!(*q.qs().last().unwrap(), 4.0);
        assert!(q.qs().iter().all(|v| v.abs() >= 0.2 - 1e-12));
        assert_eq!(q.position(0.6), Some(22));
        assert_eq!(q.qs()[22], 0.6);
    }

    #[test]
    fn stepped_matches_default() {
        assert_eq!(QGrid::stepped(-4.0, 4.0, 0.2).unwrap(), QGrid::default());
    }

    #[test]
    fn q_grid_rejects_small_and_unsorted() {
        assert!(QGrid::new(vec![-1.0, 0.05, 1.0]).is_err());
        assert!(QGrid::new(vec![2.0, 1.0]).is_err());
        assert!(QGrid::new(vec![]).is_err());
    }

    #[test]
    fn scale_grid_validation() {
        assert!(ScaleGrid::new(vec![4, 4]).is_err());
        let g = ScaleGrid::new(vec![3, 10, 50]).unwrap();
        assert!(g.validate_for(100, 2).is_err());
        assert!(g.validate_for(100, 1).is_ok());
        assert!(g.validate_for(99, 1).is_err());
    }

    proptest! {
        #[test]
        fn default_grid_is_bounded_and_increasing(len in 400usize..5_000_000, order in 1usize..=5) {
            let lo = 20.max(4 * (order + 2));
            match default_scale_grid(len, order) {
                Ok(g) => {
                    prop_assert!(g.scales().windows(2).all(|w| w[0] < w[1]));
                    prop_assert!(g.min() >= lo);
                    prop_assert!(g.max() <= len / 20);
                    prop_assert!(g.len() <= DEFAULT_SCALE_COUNT);
                }
                Err(_) => prop_assert!(lo > len / 20),
            }
        }
    }
}
