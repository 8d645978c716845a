use std::process::ExitCode;

use clap::Parser;
use mfx::cli::{Cli, Command};
use mfx::{analyze, ingest, init_threads, plotdata, selftest, synth, CliResult, EXIT_INTERNAL};

fn run(cli: Cli) -> CliResult<u8> {
    init_threads()?;
    match cli.command {
        Command::Ingest(a) => {
            let m = ingest::run(&a)?;
            for s in &m.assets {
                println!(
                    "{}: T={} t0={} trades={}",
                    s.asset, s.len, s.t0, s.trades_in_window
                );
            }
        }
        Command::Analyze(a) => {
            let m = analyze::run(&a)?;
            println!(
                "{} lags, {} scales, fit range {}..{}",
                m.runs.len(),
                m.scales.len(),
                m.fit_range.0,
                m.fit_range.1
            );
        }
        Command::Synth(a) => {
            let m = synth::run(&a)?;
            println!("wrote {}", m.files.join(", "));
        }
        Command::Plotdata(a) => {
            let m = plotdata::run(&a)?;
            println!("{} curves for {}", m.curves.len(), m.figure);
        }
        Command::Selftest => {
            if selftest::run_all() > 0 {
                return Ok(EXIT_INTERNAL as u8);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("mfx: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
