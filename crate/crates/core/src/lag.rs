//! Lead/lag shifted pairs.
//!
//! "X leads by k samples" pairs `x[t]` with `y[t + k]`: the leader's value
//! is matched with the follower's later response.

use serde::{Deserialize, Serialize};

use crate::error::{MfxError, Result};
use crate::series::Series;

/// Samples that must remain after shifting.
pub const MIN_REMAINING: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Leader {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagSpec {
    pub tau_samples: usize,
    pub leader: Leader,
}

impl LagSpec {
    pub fn new(tau_samples: usize, leader: Leader) -> Self {
        Self {
            tau_samples,
            leader,
        }
    }

    pub fn simultaneous() -> Self {
        Self::new(0, Leader::X)
    }

    /// Converts a signed lag in seconds: positive means X leads, negative
    /// means Y leads. `tau` must be a whole multiple of `dt`.
    pub fn from_seconds(tau: f64, dt: f64) -> Result<Self> {
        let k = tau / dt;
        let kr = k.round();
        if !tau.is_finite() || (k - kr).abs() > 1e-9 * k.abs().max(1.0) {
            return Err(MfxError::NotMultipleOfDt { value: tau, dt });
        }
        let leader = if kr < 0.0 { Leader::Y } else { Leader::X };
        Ok(Self::new(kr.abs() as usize, leader))
    }

    /// Signed lag in samples (positive when X leads).
    pub fn signed_samples(&self) -> i64 {
        match self.leader {
            Leader::X => self.tau_samples as i64,
            Leader::Y => -(self.tau_samples as i64),
        }
    }
}

/// Shifts an aligned pair by `spec`; both outputs have length `T - k`.
///
/// Both outputs get `t0` on the follower's clock, i.e. the follower's
/// original `t0` advanced by `k` samples.
pub fn shift_pair(x: &Series, y: &Series, spec: LagSpec) -> Result<(Series, Series)> {
    if x.len() != y.len() {
        return Err(MfxError::LengthMismatch(x.len(), y.len()));
    }
    if x.dt() != y.dt() {
        return Err(MfxError::DtMismatch(x.dt(), y.dt()));
    }
    let len = x.len();
    let k = spec.tau_samples;
    if k + MIN_REMAINING >= len {
        return Err(MfxError::TauTooLarge { tau: k, len });
    }
    if k == 0 {
        return Ok((x.clone(), y.clone()));
    }
    let (xs, ys, follower) = match spec.leader {
        Leader::X => (x.slice(0, len - k)?, y.slice(k, len)?, y),
        Leader::Y => (x.slice(k, len)?, y.slice(0, len - k)?, x),
    };
    let t0 = follower.timestamp(k);
    Ok((xs.with_t0(t0), ys.with_t0(t0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(n: usize, offset: f64) -> Series {
        Series::new((0..n).map(|i| i as f64 + offset).collect(), 10.0, 0).unwrap()
    }

    #[test]
    fn zero_lag_is_identity() {
        let (x, y) = (ramp(300, 0.0), ramp(300, 0.5));
        let (a, b) = shift_pair(&x, &y, LagSpec::simultaneous()).unwrap();
        assert_eq!((a, b), (x, y));
    }

    #[test]
    fn one_minute_at_ten_seconds_is_six_samples() {
        let spec = LagSpec::from_seconds(60.0, 10.0).unwrap();
        assert_eq!(spec, LagSpec::new(6, Leader::X));
        assert_eq!(
            LagSpec::from_seconds(-60.0, 10.0).unwrap(),
            LagSpec::new(6, Leader::Y)
        );
        let (x, y) = (ramp(1000, 0.0), ramp(1000, 0.0));
        let (a, b) = shift_pair(&x, &y, spec).unwrap();
        assert_eq!(a.len(), 994);
        assert_eq!(b.len(), 994);
        assert_eq!(a.values()[0], 0.0);
        assert_eq!(b.values()[0], 6.0);
        assert_eq!(a.t0(), 60_000);
        assert_eq!(b.t0(), 60_000);
    }

    #[test]
    fn leader_y_mirrors() {
        let (x, y) = (ramp(400, 0.0), ramp(400, 100.0));
        let (a, b) = shift_pair(&x, &y, LagSpec::new(3, Leader::Y)).unwrap();
        assert_eq!(a.values()[0], 3.0);
        assert_eq!(b.values()[0], 100.0);
    }

    #[test]
    fn delayed_copy_realigns() {
        let z: Vec<f64> = (0..506).map(|i| ((i * 37) % 101) as f64).collect();
        let x = Series::new(z[6..].to_vec(), 10.0, 0).unwrap();
        let y = Series::new(z[..500].to_vec(), 10.0, 0).unwrap();
        let (a, b) = shift_pair(&x, &y, LagSpec::new(6, Leader::X)).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn not_multiple_of_dt() {
        assert!(matches!(
            LagSpec::from_seconds(60.0, 7.0),
            Err(MfxError::NotMultipleOfDt { .. })
        ));
    }

    #[test]
    fn tau_too_large() {
        let x = ramp(300, 0.0);
        assert!(shift_pair(&x, &x, LagSpec::new(99, Leader::X)).is_ok());
        assert!(matches!(
            shift_pair(&x, &x, LagSpec::new(100, Leader::X)),
            Err(MfxError::TauTooLarge { .. })
        ));
    }

    proptest! {
        #[test]
        fn shifts_compose(k1 in 0usize..50, k2 in 0usize..50, lead_x in any::<bool>()) {
            let leader = if lead_x { Leader::X } else { Leader::Y };
            let (x, y) = (ramp(600, 0.0), ramp(600, 1000.0));
            let (a, b) = shift_pair(&x, &y, LagSpec::new(k1, leader)).unwrap();
            let (a2, b2) = shift_pair(&a, &b, LagSpec::new(k2, leader)).unwrap();
            let (c, d) = shift_pair(&x, &y, LagSpec::new(k1 + k2, leader)).unwrap();
            prop_assert_eq!(a2.values(), c.values());
            prop_assert_eq!(b2.values(), d.values());
            prop_assert_eq!(c.len(), 600 - k1 - k2);
        }
    }
}
