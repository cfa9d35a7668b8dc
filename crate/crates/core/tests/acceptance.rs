//! Acceptance run: one PASS/FAIL line per criterion, with the measured
//! values. Unmet criteria are reported, not asserted, so the rest of the
//! suite still runs; a panic inside a check is a harness error and does
//! fail the target.

use std::f64::consts::TAU;
use std::time::Instant;

use jrc_sar::comm::{qpsk_ber_run, reconstruct_reference};
use jrc_sar::geometry::{bistatic_range, doppler_history, bistatic_range_offset};
use jrc_sar::sar::{peak_to_background_db, MotionEstimator, RcmTrack};
use jrc_sar::scenario::{parse_config, run_scenario, Mode, Scenario, ScenarioConfig, DEFAULT_SCENARIO};
use jrc_sar::waveform::{kasami_small_set, Transmitter, Uncoded};
use jrc_sar::SPEED_OF_LIGHT;
use jrc_testkit::correlation::periodic_correlation;
use jrc_testkit::numeric::{finite_difference, monte_carlo_ber, qfunction};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn default_config() -> ScenarioConfig {
    parse_config(DEFAULT_SCENARIO).expect("shipped scenario parses")
}

fn scenario() -> Scenario {
    Scenario::build(&default_config()).expect("shipped scenario builds")
}

fn loopback() -> Outcome {
    let sc = scenario();
    let rx = sc.receiver();
    let n_pulses = 32;
    let mut worst = 0usize;
    let mut refs_ok = true;
    for seed in 0..100u64 {
        let payload = sc.payload(n_pulses, seed).unwrap();
        let pulses = sc.tx.pulses(&payload).unwrap();
        let segments: Vec<_> = pulses.iter().map(|p| p.samples.clone()).collect();
        let report = rx.receive(&segments, Some(&payload)).unwrap();
        worst = worst.max(report.message.bit_errors.unwrap_or(usize::MAX));
        let refs = reconstruct_reference(&report.message, &sc.tx).unwrap();
        refs_ok &= refs.iter().zip(&pulses).all(|(r, p)| r.as_ref() == Some(p));
    }
    outcome(worst == 0 && refs_ok, format!("100 seeds × {n_pulses} pulses, max bit errors {worst}, references exact: {refs_ok}"))
}

fn kasami_law() -> Outcome {
    let codes: Vec<Vec<f64>> = (0..8).map(|i| kasami_small_set(6, i).unwrap().bipolar()).collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut bad = 0;
    for (i, a) in codes.iter().enumerate() {
        for (j, b) in codes.iter().enumerate() {
            for (lag, v) in periodic_correlation(a, b).into_iter().enumerate() {
                if i == j && lag == 0 {
                    continue;
                }
                seen.insert(v as i64);
                bad += usize::from(![-1.0, -9.0, 7.0].contains(&v));
            }
        }
    }
    outcome(bad == 0, format!("8 codes, all pairs and lags, values {seen:?}"))
}

fn doppler_consistency() -> Outcome {
    let sc = scenario();
    let (tx, rx) = sc.centre_tracks().unwrap();
    let lambda = sc.wavelength();
    let half = sc.aperture_time() / 2.0;
    let mut worst = 0.0f64;
    for i in 0..100 {
        let t = -half + 2.0 * half * i as f64 / 99.0;
        let fd = finite_difference(|s| -bistatic_range_offset(&tx, &rx, &sc.motion, s) / lambda, t, 1e-4);
        let f = doppler_history(&tx, &rx, &sc.motion, lambda, t).unwrap();
        worst = worst.max((f - fd).abs() / f.abs());
    }
    outcome(worst < 1e-6, format!("max relative error {worst:.2e} over 100 times"))
}

fn communication() -> Outcome {
    let sc = scenario();
    let tx = Transmitter::new(sc.tx.params, sc.tx.code.clone(), std::sync::Arc::new(Uncoded), sc.tx.layout).unwrap();
    let per = tx.payload_bits_per_pulse();
    let mut pass = true;
    let mut parts = Vec::new();
    for db in [2.0, 4.0, 6.0, 8.0] {
        let mut chunk_seed = 0u64;
        let est = monte_carlo_ber(
            |bits| {
                chunk_seed += 1;
                let pulses = bits.div_ceil(per);
                let (e, n) = qpsk_ber_run(&tx, db, pulses, 1000 * chunk_seed + db as u64, true).unwrap();
                // count only the bits the oracle asked for
                (e as f64 * bits as f64 / n as f64).round() as usize
            },
            1_000_000,
            per * 4096,
        );
        let p = qfunction((2.0 * 10f64.powf(db / 10.0)).sqrt());
        let ok = est.within_sigmas(p, 3.0);
        pass &= ok;
        parts.push(format!("{db} dB: {:.4e} vs {:.4e} ({:+.1}σ)", est.rate, p, (est.rate - p) / (p * (1.0 - p) / est.bits as f64).sqrt()));
    }
    outcome(pass, parts.join("; "))
}

fn range_focusing() -> Outcome {
    let sc = scenario();
    let sim = sc.simulate(sc.scene(Mode::Point).unwrap(), 1).unwrap();
    let p = sc.process(&sim.clean, Some(&sim.payload)).unwrap();
    let (tx, rx) = sc.centre_tracks().unwrap();
    let mut worst = 0.0f64;
    for n in 0..p.rc.n_pulses() {
        if p.rc.erased[n] {
            continue;
        }
        let row = p.rc.data.row(n);
        let peak = (0..row.len()).max_by(|&a, &b| row[a].norm().total_cmp(&row[b].norm())).unwrap();
        let truth = p.rc.bin_of_range(bistatic_range(&tx, &rx, &sc.motion, p.rc.slow_time(n)));
        worst = worst.max((peak as f64 - truth).abs());
    }
    // c/(2B) per leg, doubled because the range sum changes by twice the
    // quasi-monostatic range
    let expected = SPEED_OF_LIGHT / (2.0 * sc.config.system.bandwidth) * 2.0;
    let Some(pt) = p.compensated.points.first() else {
        return outcome(false, format!("peak track error {worst:.3} bins; no measurable IRF"));
    };
    let width = pt.irf.range.width * p.compensated.range_spacing;
    let rel = width / expected - 1.0;
    outcome(
        worst <= 0.5 && rel.abs() <= 0.15,
        format!("max peak-track error {worst:.3} bins; range −3 dB width {width:.3} m vs {expected:.3} m ({:+.1}%)", 100.0 * rel),
    )
}

fn compensation_gain() -> Outcome {
    let sc = scenario();
    let snrs = [5.0, 10.0, 20.0];
    let (mut width_ok, mut entropy_ok, mut total) = (0, 0, 0);
    let mut ratios = Vec::new();
    for seed in 0..10u64 {
        let sim = sc.simulate(sc.scene(Mode::Point).unwrap(), 100 + seed).unwrap();
        for (i, &snr) in snrs.iter().enumerate() {
            let raster = sc.noisy(&sim, snr, 7919 * seed + i as u64).unwrap();
            let p = sc.process(&raster, Some(&sim.payload)).unwrap();
            total += 1;
            let (b, c) = (p.baseline.points.first(), p.compensated.points.first());
            if let (Some(b), Some(c)) = (b, c) {
                let r = c.irf.azimuth.width / b.irf.azimuth.width;
                ratios.push(r);
                width_ok += usize::from(r <= 0.5);
            }
            entropy_ok += usize::from(p.compensated.entropy < p.baseline.entropy);
        }
    }
    let worst = ratios.iter().copied().fold(0.0f64, f64::max);
    outcome(
        width_ok == total && entropy_ok * 10 >= total * 9,
        format!(
            "width ratio ≤ 0.5 in {width_ok}/{total} (worst {worst:.3}); entropy lower in {entropy_ok}/{total}"
        ),
    )
}

fn parameter_recovery() -> Outcome {
    let sc = scenario();
    let omega = TAU / sc.config.target.heave_period;
    let amplitude = sc.config.target.heave_amplitude;
    let estimator = MotionEstimator::new(sc.wavelength());
    let (mut w_ok, mut a_ok, mut both) = (0, 0, 0);
    let (mut w_err, mut a_err) = (Vec::new(), Vec::new());
    for seed in 0..50u64 {
        let sim = sc.simulate(sc.scene(Mode::Point).unwrap(), 500 + seed).unwrap();
        let raster = sc.noisy(&sim, 20.0, 31 * seed + 3).unwrap();
        let starts = sc.pulse_starts(&raster).unwrap();
        let comm = sc.receiver().receive_raster(raster.data.view(), &starts, None).unwrap();
        let refs = reconstruct_reference(&comm.message, &sc.tx).unwrap();
        let rc = sc.compress_with(&raster, &refs).unwrap();
        let track = RcmTrack::peak_tracking(&rc, 4, 9).unwrap();
        let Ok((est, _)) = estimator.run(&rc, &track) else { continue };
        let Some(c) = est.components.iter().max_by(|a, b| a.p.hypot(a.q).total_cmp(&b.p.hypot(b.q))) else {
            continue;
        };
        let we = (c.omega - omega).abs() / omega;
        // amplitude of p cos + q sin, phase referenced to t = 0
        let ae = (c.p.hypot(c.q) - amplitude).abs() / amplitude;
        w_err.push(we);
        a_err.push(ae);
        w_ok += usize::from(we <= 0.02);
        a_ok += usize::from(ae <= 0.05);
        both += usize::from(we <= 0.02 && ae <= 0.05);
    }
    let med = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v.get(v.len() / 2).copied().unwrap_or(f64::NAN)
    };
    outcome(
        both * 10 >= 50 * 9,
        format!(
            "Ω within 2% in {w_ok}/50 (median {:.2}%), amplitude within 5% in {a_ok}/50 (median {:.2}%), both {both}/50",
            100.0 * med(&mut w_err),
            100.0 * med(&mut a_err)
        ),
    )
}

fn failure_mode() -> Outcome {
    let sc = scenario();
    let sim = sc.simulate(sc.scene(Mode::Point).unwrap(), 1).unwrap();
    let pulses = sc.tx.pulses(&sim.payload).unwrap();
    let n = pulses.len();
    let right: Vec<_> = pulses.iter().cloned().map(Some).collect();
    let wrong: Vec<_> = (0..n).map(|i| Some(pulses[(i + n / 2) % n].clone())).collect();
    let raster = sc.noisy(&sim, 10.0, 5).unwrap();
    let good = peak_to_background_db(&sc.compress_with(&raster, &right).unwrap());
    let bad_rc = sc.compress_with(&raster, &wrong).unwrap();
    let bad = peak_to_background_db(&bad_rc);
    // where the wrong reference does bite: coherent gain after focusing
    let fg_track = RcmTrack::peak_tracking(&bad_rc, 4, 9).unwrap();
    let p = sc.process(&raster, Some(&sim.payload)).unwrap();
    let fg = sc.focus_geometry(&p.rc, &fg_track).unwrap();
    let focus = |rc| jrc_sar::sar::compensate_and_focus(rc, Some(&p.estimate), &fg, true).unwrap();
    let img_db = |r: &jrc_sar::sar::FocusReport<f64>| {
        let mut m: Vec<f64> = r.image.iter().map(|c| c.norm()).collect();
        m.sort_by(f64::total_cmp);
        20.0 * (m[m.len() - 1] / m[m.len() / 2]).log10()
    };
    let (ig, ib) = (img_db(&focus(&p.rc)), img_db(&focus(&bad_rc)));
    outcome(
        bad < 6.0,
        format!(
            "range-compressed peak-to-background {bad:.1} dB with shuffled references ({good:.1} dB correct); focused image {ib:.1} dB vs {ig:.1} dB"
        ),
    )
}

fn determinism() -> Outcome {
    let cfg = default_config();
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    let mut manifests = Vec::new();
    for (k, d) in dirs.iter().enumerate() {
        let mut c = cfg.clone();
        c.run.parallel = k != 2;
        manifests.push(run_scenario(&c, Mode::Point, d.path()).unwrap());
    }
    let files = ["manifest.json", "metrics.csv", "estimates.csv", "ber.csv"];
    let read = |k: usize, f: &str| std::fs::read(dirs[k].path().join(f)).unwrap();
    let same_files = files.iter().all(|f| read(0, f) == read(1, f) && read(0, f) == read(2, f));
    let same = manifests[0] == manifests[1] && manifests[0] == manifests[2];
    outcome(
        same && same_files,
        format!("{} hashed artifacts; two parallel runs and one serial run identical: {}", manifests[0].artifacts.len(), same && same_files),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("loopback exactness", loopback),
        ("Kasami correlation law", kasami_law),
        ("Doppler consistency", doppler_consistency),
        ("communication fidelity", communication),
        ("range focusing", range_focusing),
        ("motion-compensation gain", compensation_gain),
        ("parameter recovery", parameter_recovery),
        ("failure-mode reproduction", failure_mode),
        ("determinism", determinism),
    ];
    // `cargo test --test acceptance -- <substring>` runs a subset
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut passed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let t0 = Instant::now();
        let o = check();
        passed += usize::from(o.pass);
        println!(
            "{} {}. {name}: {} [{:.1} s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {passed}/{} criteria met", criteria.len());
}
