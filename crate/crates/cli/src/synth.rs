//! `mfx synth`: seeded synthetic series with a JSON spec sidecar.

use mfx_core::io::series_csv;
use mfx_core::{GenSpec, ProcessKind, Series};
use serde::Serialize;

use crate::cli::{SynthArgs, SynthKind};
use crate::{write_json, write_text, CliError, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct SynthManifest {
    pub tool: String,
    pub version: String,
    pub spec: GenSpec,
    pub dt: f64,
    pub files: Vec<String>,
}

fn process(kind: SynthKind, args: &SynthArgs) -> CliResult<ProcessKind> {
    Ok(match kind {
        SynthKind::Fgn => ProcessKind::Fgn { hurst: args.hurst },
        SynthKind::Cascade => ProcessKind::Cascade {
            multiplier: args.multiplier,
        },
        SynthKind::White => ProcessKind::White,
        SynthKind::Coupled => {
            if args.base == SynthKind::Coupled {
                return Err(CliError::invalid("a coupled pair needs a non-coupled base"));
            }
            ProcessKind::CoupledPair {
                coupling: args.coupling,
                base: Box::new(process(args.base, args)?),
            }
        }
    })
}

pub fn run(args: &SynthArgs) -> CliResult<SynthManifest> {
    let spec = GenSpec {
        kind: process(args.kind, args)?,
        seed: args.seed,
        length: args.length,
    };
    let mut files = Vec::new();
    for s in spec.generate()? {
        let s = Series::new(s.values().to_vec(), args.dt, 0)?.with_label(s.label());
        let name = format!("{}.csv", s.label());
        write_text(&args.out.join(&name), &series_csv(&s))?;
        files.push(name);
    }
    let manifest = SynthManifest {
        tool: "mfx".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        spec,
        dt: args.dt,
        files,
    };
    write_json(&args.out.join("synth.json"), &manifest)?;
    Ok(manifest)
}
