use std::fs;
use std::process::Command;

fn jrcsar() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jrcsar"))
}

#[test]
fn comm_mode_succeeds_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("quick.cfg");
    let text = jrc_sar::scenario::DEFAULT_SCENARIO
        .replace("ber_bits = 1000000", "ber_bits = 20000")
        .replace("ebn0_list = 2 dB, 4 dB, 6 dB, 8 dB", "ebn0_list = 8 dB");
    fs::write(&cfg, text).unwrap();
    let out = dir.path().join("run");
    let status = jrcsar()
        .args(["--mode", "comm", "--seed", "9", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["mode"], "comm");
    assert!(out.join("ber.csv").exists());
}

#[test]
fn overrides_show_in_printed_config() {
    let out = jrcsar().args(["--print-config", "--seed", "42", "--snr-list", "3,clean,7 dB"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = jrc_sar::scenario::parse_config(&text).unwrap();
    assert_eq!(cfg.run.seed, 42);
    assert_eq!(cfg.clutter.snr_list, vec![3.0, f64::INFINITY, 7.0]);
}

#[test]
fn stage_error_gives_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, jrc_sar::scenario::DEFAULT_SCENARIO.replace("code_index = 1", "code_index = 999")).unwrap();
    let out = jrcsar().arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("run")).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert!(dir.path().join("run/manifest.json").exists());
}

#[test]
fn bad_config_gives_nonzero_exit() {
    let out = jrcsar().args(["--config", "/nonexistent/scenario.cfg"]).output().unwrap();
    assert!(!out.status.success());
}
