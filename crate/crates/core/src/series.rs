//! Uniformly sampled scalar series.

use crate::error::{MfxError, Result};

/// A uniformly sampled series of finite values.
///
/// `dt` is in seconds per sample and `t0` is the epoch-millisecond
/// timestamp of the first sample. A `Series` is never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    dt: f64,
    t0: i64,
    label: String,
}

impl Series {
    /// Validates and wraps `values`.
    pub fn new(values: Vec<f64>, dt: f64, t0: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(MfxError::EmptyInput);
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(MfxError::NonPositiveDt(dt));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(MfxError::NonFiniteValue(i));
        }
        Ok(Self {
            values,
            dt,
            t0,
            label: String::new(),
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always `false`; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> i64 {
        self.t0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Sampling interval in whole milliseconds.
    pub fn dt_millis(&self) -> f64 {
        self.dt * 1000.0
    }

    /// Timestamp of sample `i` in epoch milliseconds.
    pub fn timestamp(&self, i: usize) -> i64 {
        self.t0 + (i as f64 * self.dt_millis()).round() as i64
    }

    /// Sub-series `[start, end)` with `t0` moved to the first kept sample.
    pub fn slice(&self, start: usize, end: usize) -> Result<Series> {
        if start >= end || end > self.len() {
            return Err(MfxError::InvalidWindow(format!(
                "slice [{start}, {end}) of series with length {}",
                self.len()
            )));
        }
        Ok(Series {
            values: self.values[start..end].to_vec(),
            dt: self.dt,
            t0: self.timestamp(start),
            label: self.label.clone(),
        })
    }

    /// Same metadata, new values. Values must be finite.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Series> {
        Ok(Series::new(values, self.dt, self.t0)?.with_label(self.label.clone()))
    }

    /// Same values with a new start timestamp.
    pub fn with_t0(mut self, t0: i64) -> Series {
        self.t0 = t0;
        self
    }

    /// Pointwise negation. Never fails.
    pub fn negated(&self) -> Series {
        Series {
            values: self.values.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }

    /// Pointwise multiplication by a finite constant.
    pub fn scaled(&self, factor: f64) -> Result<Series> {
        self.with_values(self.values.iter().map(|v| v * factor).collect())
    }
}

/// Alias matching the construction operation name.
pub fn make_series(values: Vec<f64>, dt: f64, t0: i64) -> Result<Series> {
    Series::new(values, dt, t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructs_valid_series() {
        let s = make_series(vec![1.0, 2.0, 3.0], 10.0, 0).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.dt(), 10.0);
        assert_eq!(s.t0(), 0);
    }

    #[test]
    fn rejects_nan_with_index() {
        assert_eq!(
            make_series(vec![1.0, f64::NAN], 10.0, 0),
            Err(MfxError::NonFiniteValue(1))
        );
        assert_eq!(
            make_series(vec![f64::NEG_INFINITY], 10.0, 0),
            Err(MfxError::NonFiniteValue(0))
        );
    }

    #[test]
    fn rejects_empty_and_bad_dt() {
        assert_eq!(make_series(vec![], 10.0, 0), Err(MfxError::EmptyInput));
        assert!(matches!(
            make_series(vec![1.0], 0.0, 0),
            Err(MfxError::NonPositiveDt(_))
        ));
        assert!(matches!(
            make_series(vec![1.0], -1.0, 0),
            Err(MfxError::NonPositiveDt(_))
        ));
    }

    #[test]
    fn slice_moves_t0() {
        let s = make_series(vec![0.0; 10], 10.0, 1_000).unwrap();
        let sub = s.slice(3, 7).unwrap();
        assert_eq!(sub.len(), 4);
        assert_eq!(sub.t0(), 31_000);
        assert!(s.slice(5, 5).is_err());
        assert!(s.slice(0, 11).is_err());
    }

    #[test]
    fn series_is_send_and_sync() {
        fn assert_impl<T: Send + Sync>() {}
        assert_impl::<Series>();
    }
}
