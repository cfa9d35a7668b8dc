use std::fs;
use std::path::Path;

use jrc_sar::scenario::{parse_config, qpsk_ber, run_scenario, Mode, ScenarioConfig, LOCK_FILE, DEFAULT_SCENARIO};
use jrc_sar::Error;

fn quick(seed: u64) -> ScenarioConfig {
    let mut cfg = parse_config(DEFAULT_SCENARIO).unwrap();
    cfg.system.aperture_length = 100.0;
    cfg.clutter.snr_list = vec![20.0];
    cfg.run.seed = seed;
    cfg
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn shipped_scenario_has_expected_values() {
    let cfg = parse_config(DEFAULT_SCENARIO).unwrap();
    assert_eq!(cfg.system.bandwidth, 100e6);
    assert_eq!(cfg.system.carrier, 10e9);
    assert!((cfg.system.aperture_length - 273.1).abs() < 1e-9);
    assert_eq!(cfg.system.prf, 863.0);
    assert_eq!(cfg.transmitter.altitude, 36_000e3);
    assert!((cfg.receiver.elevation - 25.7f64.to_radians()).abs() < 1e-12);
    assert_eq!(cfg.target.heave_period, 3.5);
    assert_eq!(cfg.clutter.snr_list, vec![5.0, 10.0, 20.0]);
}

#[test]
fn missing_bandwidth_is_named() {
    let text = DEFAULT_SCENARIO.replace("bandwidth = 100 MHz\n", "");
    match parse_config(&text) {
        Err(Error::Config { key, .. }) => assert_eq!(key, "system.bandwidth"),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn errors_carry_line_and_column() {
    let text = DEFAULT_SCENARIO.replace("carrier = 10 GHz", "carrier = 10 parsecs");
    let line = text.lines().position(|l| l.starts_with("carrier")).unwrap() + 1;
    match parse_config(&text) {
        Err(Error::Config { line: l, column, .. }) => {
            assert_eq!(l, line);
            assert!(column > 1);
        }
        other => panic!("expected a config error, got {other:?}"),
    }
    assert!(parse_config(&DEFAULT_SCENARIO.replace("[ship]", "[boat]")).is_err());
    assert!(parse_config(&DEFAULT_SCENARIO.replace("spacing = 5 m", "spacing = 5 m\nspacing = 6 m")).is_err());
}

#[test]
fn canonical_text_round_trips() {
    let cfg = parse_config(DEFAULT_SCENARIO).unwrap();
    let again = parse_config(&cfg.to_text()).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(again.to_text(), cfg.to_text());
}

#[test]
fn point_runs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut cfg = quick(3);
    let ma = run_scenario(&cfg, Mode::Point, a.path()).unwrap();
    cfg.run.parallel = !cfg.run.parallel;
    let mb = run_scenario(&cfg, Mode::Point, b.path()).unwrap();
    assert_eq!(ma, mb);
    for name in ["metrics.csv", "estimates.csv", "ber.csv", "manifest.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
    assert!(!ma.failed());
    assert!(!a.path().join(LOCK_FILE).exists());
}

#[test]
fn manifest_hashes_every_artifact() {
    use sha2::{Digest, Sha256};
    let dir = tempfile::tempdir().unwrap();
    let m = run_scenario(&quick(4), Mode::Point, dir.path()).unwrap();
    let names: Vec<&str> = m.artifacts.iter().map(|a| a.path.as_str()).collect();
    for want in ["raster_snr20.cplx", "image_baseline_snr20.cplx", "image_compensated_snr20.pgm", "metrics.csv"] {
        assert!(names.contains(&want), "{want} missing from {names:?}");
    }
    for a in &m.artifacts {
        let bytes = read(dir.path(), &a.path);
        let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, a.sha256, "{}", a.path);
        assert_eq!(bytes.len() as u64, a.bytes);
    }
    let metrics = String::from_utf8(read(dir.path(), "metrics.csv")).unwrap();
    assert!(metrics.lines().any(|l| l.contains("compensated")));
    assert!(metrics.lines().any(|l| l.contains("baseline")));
}

#[test]
fn ship_mode_writes_three_images() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(5);
    cfg.clutter.snr_list = vec![f64::INFINITY];
    let m = run_scenario(&cfg, Mode::Ship, dir.path()).unwrap();
    for name in ["ship_truth.pgm", "image_baseline_clean.pgm", "image_compensated_clean.pgm"] {
        let bytes = read(dir.path(), name);
        assert!(bytes.starts_with(b"P5\n"), "{name}");
        assert!(m.artifacts.iter().any(|a| a.path == name));
    }
}

#[test]
fn comm_mode_matches_q_function() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(6);
    cfg.run.ebn0_list = vec![6.0];
    cfg.run.ber_bits = 200_000;
    run_scenario(&cfg, Mode::Comm, dir.path()).unwrap();
    let table = String::from_utf8(read(dir.path(), "ber.csv")).unwrap();
    let row: Vec<f64> = table.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let (bits, ber) = (row[2], row[3]);
    let p = qpsk_ber(6.0);
    assert!((row[4] - p).abs() < 1e-9);
    let sigma = (p * (1.0 - p) / bits).sqrt();
    assert!((ber - p).abs() <= 3.0 * sigma, "ber {ber} vs {p} ± {sigma}");
}

#[test]
fn busy_directory_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join(LOCK_FILE), "1\n").unwrap();
    assert!(run_scenario(&quick(7), Mode::Comm, dir.path()).is_err());
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn failed_stage_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = quick(8);
    cfg.system.code_index = 999;
    let err = run_scenario(&cfg, Mode::Point, dir.path()).unwrap_err();
    assert!(matches!(err, Error::Stage { .. }), "{err}");
    let manifest: serde_json::Value = serde_json::from_slice(&read(dir.path(), "manifest.json")).unwrap();
    let stages = manifest["stages"].as_array().unwrap();
    assert!(stages.iter().any(|s| s["status"].as_str().unwrap().starts_with("error")));
}
