//! Command-line pipelines around `mfx-core`: trade ingestion, pair
//! analysis over a set of lags, synthetic generation, plot-ready exports
//! and the built-in oracle suite.

use std::path::{Path, PathBuf};

use mfx_core::MfxError;
use sha2::{Digest, Sha256};

pub mod analyze;
pub mod cli;
pub mod config;
pub mod ingest;
pub mod plotdata;
pub mod selftest;
pub mod synth;

/// Exit status for bad input or parameters.
pub const EXIT_INPUT: i32 = 2;
/// Exit status for internal failures.
pub const EXIT_INTERNAL: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] MfxError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Context {
        context: String,
        source: Box<CliError>,
    },
    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Self::Invalid(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Self::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(MfxError::UnsortedAfterSort) | Self::Internal(_) => EXIT_INTERNAL,
            Self::Context { source, .. } => source.exit_code(),
            _ => EXIT_INPUT,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    write_text(path, &(text + "\n"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Sizes the global rayon pool from `MFX_THREADS` when set.
pub fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("MFX_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| CliError::invalid(format!("MFX_THREADS={v:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

/// Directory-friendly lag tag: `tau_0`, `tau_p60`, `tau_m60`.
pub fn tau_tag(tau: f64) -> String {
    if tau == 0.0 {
        "tau_0".into()
    } else if tau > 0.0 {
        format!("tau_p{tau}")
    } else {
        format!("tau_m{}", -tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from(MfxError::NoTradesInWindow).exit_code(), 2);
        assert_eq!(
            CliError::from(MfxError::UnsortedAfterSort)
                .context("x.csv")
                .exit_code(),
            1
        );
        assert_eq!(CliError::Internal("boom".into()).exit_code(), 1);
    }

    #[test]
    fn tags() {
        assert_eq!(tau_tag(0.0), "tau_0");
        assert_eq!(tau_tag(60.0), "tau_p60");
        assert_eq!(tau_tag(-60.0), "tau_m60");
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
