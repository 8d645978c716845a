//! Argument definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "mfx",
    version,
    about = "Multifractal cross-correlation analysis of paired time series"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resample trade files into aligned return, volume and count series.
    Ingest(IngestArgs),
    /// Fluctuation surfaces, exponents, rho panel and gap for a series pair.
    Analyze(AnalyzeArgs),
    /// Generate synthetic series with known scaling.
    Synth(SynthArgs),
    /// Export plot-ready curve files from an analysis or ingest directory.
    Plotdata(PlotArgs),
    /// Run the built-in oracle suite.
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatName {
    /// id, price, qty, quote_qty, time_ms, ...
    Binance,
    /// agg_id, price, qty, first_id, last_id, time_ms, ...
    BinanceAgg,
    /// id, price, qty, time_ms
    Compact,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// `ASSET=FILE[,FILE...]`, or a single file named after its asset.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Bin width in seconds.
    #[arg(long, default_value_t = 10.0)]
    pub dt: f64,
    /// Window start: epoch milliseconds, `YYYY-MM-DD` or RFC 3339 (UTC).
    #[arg(long)]
    pub start: Option<String>,
    /// Window end (exclusive), same formats as `--start`.
    #[arg(long)]
    pub end: Option<String>,
    #[arg(long, value_enum, default_value_t = FormatName::Binance)]
    pub format: FormatName,
    /// Input files start with a header row.
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// X series CSV (`timestamp_ms,value`).
    pub x: PathBuf,
    /// Y series CSV on the same time grid.
    pub y: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sampling interval in seconds; inferred from timestamps when absent.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Detrending polynomial order (1 to 5).
    #[arg(long)]
    pub order: Option<usize>,
    /// `default`, `min:max:count` (log-spaced) or a comma list.
    #[arg(long)]
    pub scales: Option<String>,
    /// `lo:hi:step` (zero skipped) or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    pub qgrid: Option<String>,
    /// `auto`, `full` or `lo:hi`.
    #[arg(long)]
    pub fit_range: Option<String>,
    /// Comma-separated lags in seconds; positive means X leads.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Also report exponents for detrending orders 1, 2 and 3.
    #[arg(long)]
    pub stability: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthKind {
    Fgn,
    Cascade,
    White,
    Coupled,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum)]
    pub kind: SynthKind,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 65_536)]
    pub length: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub hurst: f64,
    /// Cascade weight `a` in (0.5, 1).
    #[arg(long, default_value_t = 0.7)]
    pub multiplier: f64,
    /// Coupling strength `w` in [0, 1] for `coupled`.
    #[arg(long, default_value_t = 0.5)]
    pub coupling: f64,
    /// Base process for `coupled`.
    #[arg(long, value_enum, default_value_t = SynthKind::Fgn)]
    pub base: SynthKind,
    /// Sampling interval written to the timestamps, in seconds.
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    FqSurface,
    Exponents,
    Rho,
    Gap,
    Evolution,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Analysis output directory (ingest output for `evolution`).
    pub dir: PathBuf,
    #[arg(long, value_enum)]
    pub figure: Figure,
    #[arg(long)]
    pub out: PathBuf,
    /// q values for the rho figure.
    #[arg(long, default_value = "2,4", allow_hyphen_values = true)]
    pub q: String,
    /// Rolling window in seconds for `evolution` (default 30 days).
    #[arg(long, default_value_t = 2_592_000.0)]
    pub window: f64,
    /// Rolling step in seconds for `evolution` (default 6 days).
    #[arg(long, default_value_t = 518_400.0)]
    pub step: f64,
}
