use std::path::Path;
use std::process::{Command, Output};

use mfx_core::io::{parse_fit_csv, parse_rho_csv, read_triple};
use tempfile::TempDir;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/trades20.csv");

fn mfx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfx"))
        .args(args)
        .env("MFX_THREADS", "2")
        .output()
        .expect("spawn mfx")
}

fn ok(args: &[&str]) {
    let out = mfx(args);
    assert!(
        out.status.success(),
        "mfx {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn p(dir: &TempDir, rel: &str) -> String {
    dir.path().join(rel).display().to_string()
}

fn synth_pair(dir: &TempDir, length: &str, dt: &str) {
    ok(&[
        "synth",
        "--kind",
        "coupled",
        "--length",
        length,
        "--dt",
        dt,
        "--seed",
        "11",
        "--out",
        &p(dir, "in"),
    ]);
}

#[test]
fn ingest_fixture_matches_expected_bins() {
    let dir = TempDir::new().unwrap();
    let spec = format!("BTC={FIXTURE}");
    ok(&[
        "ingest",
        &spec,
        "--format",
        "compact",
        "--start",
        "1585699200000",
        "--end",
        "2020-04-01T00:01:20Z",
        "--out",
        &p(&dir, "out"),
    ]);
    let t = read_triple(&dir.path().join("out"), "BTC").unwrap();
    assert_eq!(t.len(), 7);
    assert_eq!(t.count.values(), &[2.0, 0.0, 4.0, 1.0, 3.0, 0.0, 5.0]);
    assert_eq!(t.base.count, 3);
    assert_eq!(t.base.close, 6413.20);
    assert!((t.returns.values()[0] - 0.000_280_631_735_054_508_9).abs() < 1e-15);
    let closes = t.close_prices();
    assert!((closes[closes.len() - 1] - 6423.45).abs() < 1e-9);
    assert!(dir.path().join("out/ingest.json").exists());
}

#[test]
fn empty_trade_file_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let empty = p(&dir, "EMPTY.csv");
    std::fs::write(&empty, "").unwrap();
    let out = mfx(&[
        "ingest",
        &empty,
        "--start",
        "0",
        "--end",
        "100000",
        "--out",
        &p(&dir, "out"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn lag_not_multiple_of_dt_is_rejected() {
    let dir = TempDir::new().unwrap();
    synth_pair(&dir, "4096", "7");
    let out = mfx(&[
        "analyze",
        &p(&dir, "in/x.csv"),
        &p(&dir, "in/y.csv"),
        "--dt",
        "7",
        "--tau",
        "60",
        "--out",
        &p(&dir, "a"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("a/manifest.json").exists());
}

#[test]
fn diagonal_run_gives_unit_rho_and_zero_gap() {
    let dir = TempDir::new().unwrap();
    synth_pair(&dir, "4096", "1");
    let x = p(&dir, "in/x.csv");
    ok(&[
        "analyze",
        &x,
        &x,
        "--tau",
        "0",
        "--qgrid",
        "-2,2,4",
        "--out",
        &p(&dir, "a"),
    ]);
    let rho = parse_rho_csv(&std::fs::read_to_string(dir.path().join("a/tau_0/rho.csv")).unwrap())
        .unwrap();
    assert!(!rho.is_empty());
    for (_, _, r) in rho {
        assert!((r.unwrap() - 1.0).abs() < 1e-12);
    }
    let gap = parse_fit_csv(&std::fs::read_to_string(dir.path().join("a/tau_0/gap.csv")).unwrap())
        .unwrap();
    for (_, d, _) in gap {
        assert!(d.unwrap().abs() < 1e-12);
    }
}

#[test]
fn analyze_then_plotdata() {
    let dir = TempDir::new().unwrap();
    synth_pair(&dir, "8192", "10");
    let a = p(&dir, "a");
    ok(&[
        "analyze",
        &p(&dir, "in/x.csv"),
        &p(&dir, "in/y.csv"),
        "--out",
        &a,
    ]);
    for tau in ["tau_0", "tau_p60", "tau_m60"] {
        assert!(Path::new(&a).join(tau).join("rho.csv").exists());
    }
    ok(&["plotdata", &a, "--figure", "rho", "--out", &p(&dir, "plot")]);
    let rho_files = std::fs::read_dir(dir.path().join("plot"))
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with("rho_")
        })
        .count();
    assert_eq!(rho_files, 6);
    ok(&[
        "plotdata",
        &a,
        "--figure",
        "exponents",
        "--out",
        &p(&dir, "exp"),
    ]);
    assert!(dir.path().join("exp/plot_manifest.json").exists());
}

#[test]
fn plotdata_without_analysis_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let out = mfx(&[
        "plotdata",
        &p(&dir, "nothing"),
        "--figure",
        "gap",
        "--out",
        &p(&dir, "plot"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = TempDir::new().unwrap();
    synth_pair(&dir, "4096", "1");
    let cfg = p(&dir, "run.cfg");
    std::fs::write(&cfg, "# pair run\norder = 3\nqgrid = 1,2\ntau = 0\n").unwrap();
    ok(&[
        "analyze",
        &p(&dir, "in/x.csv"),
        &p(&dir, "in/y.csv"),
        "--config",
        &cfg,
        "--order",
        "1",
        "--out",
        &p(&dir, "a"),
    ]);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a/manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["order"], 1);
    assert_eq!(manifest["qgrid"], serde_json::json!([1.0, 2.0]));

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = mfx(&[
        "analyze",
        &p(&dir, "in/x.csv"),
        &p(&dir, "in/y.csv"),
        "--config",
        &cfg,
        "--out",
        &p(&dir, "b"),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
