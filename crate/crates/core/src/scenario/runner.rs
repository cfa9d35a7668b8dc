//! Runs a scenario end to end and writes its artifacts.
//!
//! The manifest lists every artifact with its SHA-256 and holds nothing
//! that varies between runs; wall-clock timings go to `timings.json`,
//! which the manifest names but does not hash.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::comm::qpsk_ber_run;
use crate::container::{save_container, ContainerHeader, ContainerKind};
use crate::error::{Error, Result};
use crate::sar::FocusReport;
use crate::waveform::{Transmitter, Uncoded};

use super::config::ScenarioConfig;
use super::pipeline::{Mode, Processed, Scenario};
use super::ship::stencil_image;

pub const LOCK_FILE: &str = ".jrcsar.lock";
/// Dynamic range of the grayscale images, dB below the peak.
pub const IMAGE_RANGE_DB: f64 = 50.0;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub mode: String,
    pub seed: u64,
    /// Effective configuration in canonical text form, minus the output
    /// directory and the threading switch, which do not change results.
    pub config: String,
    pub artifacts: Vec<Artifact>,
    pub stages: Vec<StageRecord>,
    /// Unhashed file with wall-clock stage timings.
    pub timings: String,
}

impl Manifest {
    pub fn failed(&self) -> bool {
        self.stages.iter().any(|s| s.status != "ok")
    }
}

/// Holds the output directory for one run; removed on drop.
struct DirLock(PathBuf);

impl DirLock {
    fn acquire(dir: &Path) -> Result<Self> {
        let path = dir.join(LOCK_FILE);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self(path))
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::Domain(format!("output directory {} is in use ({LOCK_FILE} exists)", dir.display())))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for DirLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

struct Run {
    dir: PathBuf,
    artifacts: Vec<Artifact>,
    stages: Vec<StageRecord>,
    timings: Vec<(String, f64)>,
}

impl Run {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.record(name)
    }

    fn record(&mut self, name: &str) -> Result<()> {
        let bytes = fs::read(self.dir.join(name))?;
        self.artifacts.push(Artifact {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect(),
        });
        Ok(())
    }

    fn stage<R>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<R>) -> Result<R> {
        let t0 = Instant::now();
        let out = f(self);
        self.timings.push((name.to_string(), t0.elapsed().as_secs_f64()));
        let status = match &out {
            Ok(_) => "ok".to_string(),
            Err(e) => format!("error: {e}"),
        };
        self.stages.push(StageRecord { stage: name.to_string(), status });
        out.map_err(|e| match e {
            Error::Stage { .. } => e,
            other => Error::Stage { stage: name.to_string(), source: Box::new(other) },
        })
    }
}

/// Log-magnitude 8-bit image: 0 at `IMAGE_RANGE_DB` below the peak or
/// lower, 255 at the peak.
pub fn pgm_bytes(rows: usize, cols: usize, magnitude: impl Iterator<Item = f64>) -> Vec<u8> {
    let mags: Vec<f64> = magnitude.collect();
    let peak = mags.iter().copied().fold(0.0, f64::max);
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend(mags.iter().map(|&m| {
        if peak <= 0.0 || m <= 0.0 {
            return 0u8;
        }
        let db = (20.0 * (m / peak).log10()).max(-IMAGE_RANGE_DB);
        ((db + IMAGE_RANGE_DB) / IMAGE_RANGE_DB * 255.0).round() as u8
    }));
    out
}

fn report_pgm(r: &FocusReport<f64>) -> Vec<u8> {
    let (rows, cols) = r.image.dim();
    pgm_bytes(rows, cols, r.image.iter().map(|c| c.norm()))
}

fn report_container(r: &FocusReport<f64>, prf: f64) -> (ContainerHeader, Vec<crate::Cplx<f64>>) {
    let (rows, cols) = r.image.dim();
    let header = ContainerHeader {
        kind: ContainerKind::Image,
        rows: rows as u64,
        cols: cols as u64,
        sample_rate: 1.0 / r.range_spacing,
        row_rate: prf,
        row_origin: -((rows / 2) as f64) / prf,
        col_origin: r.range_start as f64 * r.range_spacing,
    };
    (header, r.image.iter().copied().collect())
}

const METRIC_HEADER: &str =
    "snr_db,method,row,col,range_width_bins,range_pslr_db,range_islr_db,azimuth_width_bins,azimuth_pslr_db,azimuth_islr_db,entropy,contrast\n";

fn metric_rows(snr: f64, r: &FocusReport<f64>) -> String {
    let mut s = String::new();
    if r.points.is_empty() {
        s.push_str(&format!("{snr},{},,,,,,,,,{:.6},{:.6}\n", r.method.name(), r.entropy, r.contrast));
    }
    for p in &r.points {
        let (a, b) = (p.irf.range, p.irf.azimuth);
        s.push_str(&format!(
            "{snr},{},{},{},{:.4},{:.3},{:.3},{:.4},{:.3},{:.3},{:.6},{:.6}\n",
            r.method.name(),
            p.row,
            p.col,
            a.width,
            a.pslr_db,
            a.islr_db,
            b.width,
            b.pslr_db,
            b.islr_db,
            r.entropy,
            r.contrast
        ));
    }
    s
}

fn estimate_row(snr: f64, p: &Processed) -> String {
    let e = &p.estimate;
    let comps: Vec<String> =
        e.components.iter().map(|c| format!("{:.6}:{:.6}:{:.6}", c.omega, c.p, c.q)).collect();
    format!(
        "{snr},{:.6},{:.6},{},{:.6},{},{}\n",
        e.centroid,
        e.rate,
        comps.join(";"),
        e.residual_rms,
        e.low_confidence,
        e.alias
    )
}

fn label(snr: f64) -> String {
    if snr.is_infinite() {
        "clean".to_string()
    } else {
        format!("snr{snr}")
    }
}

/// Runs `mode` and writes artifacts to `out`. The manifest is written even
/// when a stage fails; the error is returned afterwards.
pub fn run_scenario(cfg: &ScenarioConfig, mode: Mode, out: &Path) -> Result<Manifest> {
    fs::create_dir_all(out)?;
    let _lock = DirLock::acquire(out)?;
    let mut run = Run { dir: out.to_path_buf(), artifacts: Vec::new(), stages: Vec::new(), timings: Vec::new() };
    let result = execute(cfg, mode, &mut run);
    let manifest = Manifest {
        tool: "jrcsar".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        mode: mode.name().to_string(),
        seed: cfg.run.seed,
        config: cfg
            .to_text()
            .lines()
            .filter(|l| !l.starts_with("output = ") && !l.starts_with("parallel = "))
            .map(|l| format!("{l}\n"))
            .collect(),
        artifacts: run.artifacts.clone(),
        stages: run.stages.clone(),
        timings: "timings.json".to_string(),
    };
    let timings: serde_json::Map<String, serde_json::Value> =
        run.timings.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
    fs::write(out.join("timings.json"), serde_json::to_string_pretty(&timings)?)?;
    let mut f = File::create(out.join("manifest.json"))?;
    f.write_all(serde_json::to_string_pretty(&manifest)?.as_bytes())?;
    f.write_all(b"\n")?;
    result.map(|_| manifest)
}

fn execute(cfg: &ScenarioConfig, mode: Mode, run: &mut Run) -> Result<()> {
    let scenario = run.stage("build", |_| Scenario::build(cfg))?;
    let seed = cfg.run.seed;
    if mode == Mode::Comm {
        return comm_only(&scenario, run);
    }
    if mode == Mode::Ship {
        run.stage("truth_layout", |r| {
            let (h, w, px) = stencil_image(&cfg.ship.stencil, 8);
            let mut bytes = format!("P5\n{w} {h}\n255\n").into_bytes();
            bytes.extend(px);
            r.write("ship_truth.pgm", &bytes)
        })?;
    }
    let scene = run.stage("scene", |_| scenario.scene(mode))?;
    let sim = run.stage("simulate", |_| scenario.simulate(scene, seed))?;
    let mut metrics = String::from(METRIC_HEADER);
    let mut estimates = String::from("snr_db,centroid_hz,rate_hz_s,components_omega_p_q,residual_rms_hz,low_confidence,alias\n");
    let mut ber = String::from("snr_db,bit_errors,bits,ber,erased_pulses,max_condition\n");
    for (i, snr) in cfg.snr_values().into_iter().enumerate() {
        let tag = label(snr);
        let clutter_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64 + 1);
        let raster = run.stage(&format!("interference_{tag}"), |_| scenario.noisy(&sim, snr, clutter_seed))?;
        run.stage(&format!("save_raster_{tag}"), |r| {
            let name = format!("raster_{tag}.cplx");
            raster.save(&r.dir.join(&name))?;
            r.record(&name)
        })?;
        let p = run.stage(&format!("receive_{tag}"), |_| scenario.process(&raster, Some(&sim.payload)))?;
        run.stage(&format!("save_images_{tag}"), |r| {
            for rep in [&p.baseline, &p.compensated] {
                let stem = format!("image_{}_{tag}", rep.method.name());
                let (h, data) = report_container(rep, scenario.prf());
                save_container(&r.dir.join(format!("{stem}.cplx")), &h, &data)?;
                r.record(&format!("{stem}.cplx"))?;
                r.write(&format!("{stem}.pgm"), &report_pgm(rep))?;
            }
            Ok(())
        })?;
        metrics.push_str(&metric_rows(snr, &p.baseline));
        metrics.push_str(&metric_rows(snr, &p.compensated));
        estimates.push_str(&estimate_row(snr, &p));
        let m = &p.comm.message;
        ber.push_str(&format!(
            "{snr},{},{},{},{},{:.3e}\n",
            m.bit_errors.unwrap_or(0),
            m.payload.len(),
            m.ber.unwrap_or(f64::NAN),
            m.pulse_erased.iter().filter(|&&e| e).count(),
            p.comm.max_condition
        ));
    }
    run.stage("write_tables", |r| {
        r.write("metrics.csv", metrics.as_bytes())?;
        r.write("estimates.csv", estimates.as_bytes())?;
        r.write("ber.csv", ber.as_bytes())
    })
}

/// Uncoded BER over the configured Eb/N0 list, with the Q-function value
/// alongside.
fn comm_only(scenario: &Scenario, run: &mut Run) -> Result<()> {
    let cfg = &scenario.config;
    let tx = Transmitter::new(
        scenario.tx.params,
        scenario.tx.code.clone(),
        std::sync::Arc::new(Uncoded),
        scenario.tx.layout,
    )?;
    let per_pulse = tx.payload_bits_per_pulse();
    let pulses = cfg.run.ber_bits.div_ceil(per_pulse);
    let mut table = String::from("ebn0_db,bit_errors,bits,ber,analytic,sigma\n");
    for &db in &cfg.run.ebn0_list {
        let (errors, bits) = run.stage(&format!("ber_{db}"), |_| {
            qpsk_ber_run(&tx, db, pulses, cfg.run.seed, cfg.run.parallel)
        })?;
        let p = qpsk_ber(db);
        let sigma = (p * (1.0 - p) / bits as f64).sqrt();
        table.push_str(&format!("{db},{errors},{bits},{:.6e},{p:.6e},{sigma:.3e}\n", errors as f64 / bits as f64));
    }
    run.stage("write_tables", |r| r.write("ber.csv", table.as_bytes()))
}

/// `Q(sqrt(2 Eb/N0))`.
pub fn qpsk_ber(eb_n0_db: f64) -> f64 {
    0.5 * libm::erfc(10f64.powf(eb_n0_db / 10.0).sqrt())
}
