//! Multifractal detrended fluctuation (MFDFA) and cross-correlation (MFCCA)
//! analysis of paired time series, with trade-data ingestion, lead/lag
//! shifting and synthetic benchmark processes.

pub mod detrend;
pub mod error;
pub mod fluct;
pub mod grid;
pub mod ingest;
pub mod io;
pub mod lag;
pub mod numeric;
pub mod scaling;
pub mod series;
pub mod stats;
pub mod surface;
pub mod synth;

pub use error::{MfxError, Result};
pub use fluct::{analyze_pair, analyze_series, PairSurfaces};
pub use grid::{default_scale_grid, QGrid, ScaleGrid};
pub use lag::{shift_pair, LagSpec, Leader};
pub use scaling::{
    exponent_gap, fit_power_law, generalized_hurst, mean_hurst, rho_q, suggest_fit_range,
    ExponentGap, RangeSearch,
};
pub use series::Series;
pub use surface::{FitIssue, FluctuationSurface, PowerLawFit, RhoPanel, ScalingFit, SurfaceKind};
pub use synth::{GenSpec, ProcessKind};
