//! Raw echo simulation: delayed, phase-rotated copies of the transmitted
//! pulses on a slow-time × fast-time raster, plus sea clutter and noise.
//!
//! Stop-and-go: the range is frozen for the duration of one pulse. Ranges
//! and phases are evaluated in `f64` whatever the sample type.

use std::path::Path;
use std::sync::Arc;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::container::{save_container, ContainerHeader, ContainerKind};
use crate::error::{domain, Error, Result, WindowViolation};
use crate::geometry::{bistatic_range_offset, BistaticGeometry, PlatformTrack, TargetMotion};
use crate::scalar::{Cplx, Real, SPEED_OF_LIGHT};
use crate::waveform::{PulseSpan, PulseTrain};

#[derive(Debug, Clone, PartialEq)]
pub struct Scatterer {
    /// Ground-frame offset from the scene centre, m.
    pub offset: [f64; 3],
    pub motion: TargetMotion<f64>,
}

impl Scatterer {
    pub fn reflectivity(&self) -> f64 {
        self.motion.reflectivity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub geometry: BistaticGeometry<f64>,
    pub scatterers: Vec<Scatterer>,
}

impl Scene {
    pub fn new(geometry: BistaticGeometry<f64>, scatterers: Vec<Scatterer>) -> Result<Self> {
        if scatterers.is_empty() {
            return domain("scene needs at least one scatterer");
        }
        Ok(Self { geometry, scatterers })
    }

    pub fn point(geometry: BistaticGeometry<f64>, motion: TargetMotion<f64>) -> Self {
        Self { geometry, scatterers: vec![Scatterer { offset: [0.0; 3], motion }] }
    }

    /// Rigid cluster of points moving together with one shared motion.
    pub fn dot_matrix(geometry: BistaticGeometry<f64>, offsets: &[[f64; 3]], motion: TargetMotion<f64>) -> Result<Self> {
        Self::new(
            geometry,
            offsets.iter().map(|&offset| Scatterer { offset, motion: motion.clone() }).collect(),
        )
    }
}

/// Slow-time sampling and the recorded fast-time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoTiming {
    pub prf: f64,
    pub aperture_time: f64,
    /// Two-way delay of the first fast-time sample, s.
    pub fast_origin: f64,
    pub n_fast: usize,
    pub sample_rate: f64,
}

impl EchoTiming {
    pub fn validate(&self) -> Result<()> {
        if !(self.prf > 0.0) || !(self.aperture_time > 0.0) || !(self.sample_rate > 0.0) {
            return domain("PRF, aperture time and sample rate must be positive");
        }
        if self.n_pulses() == 0 || self.n_fast == 0 {
            return domain("raster would be empty");
        }
        Ok(())
    }

    pub fn n_pulses(&self) -> usize {
        (self.aperture_time * self.prf + 1e-9).floor() as usize
    }

    /// `t_n = −T/2 + n/PRF`, so doubling the PRF keeps every old slow time.
    pub fn slow_time(&self, n: usize) -> f64 {
        -0.5 * self.aperture_time + n as f64 / self.prf
    }

    /// Window covering every scatterer's delay over the aperture with
    /// `margin` spare samples on each side.
    pub fn covering(
        scene: &Scene,
        prf: f64,
        aperture_time: f64,
        sample_rate: f64,
        pulse_len: usize,
        margin: usize,
    ) -> Result<Self> {
        let mut t = Self { prf, aperture_time, fast_origin: 0.0, n_fast: 1, sample_rate };
        t.validate()?;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for s in &scene.scatterers {
            let (tx, rx) = scene.geometry.tracks_for(s.offset)?;
            for n in 0..t.n_pulses() {
                let tau = delay(&tx, &rx, &s.motion, t.slow_time(n));
                lo = lo.min(tau);
                hi = hi.max(tau);
            }
        }
        t.fast_origin = lo - margin as f64 / sample_rate;
        t.n_fast = ((hi - lo) * sample_rate).ceil() as usize + pulse_len + 2 * margin;
        Ok(t)
    }
}

fn delay(tx: &PlatformTrack<f64>, rx: &PlatformTrack<f64>, m: &TargetMotion<f64>, t: f64) -> f64 {
    (tx.initial_range + rx.initial_range + bistatic_range_offset(tx, rx, m, t)) / SPEED_OF_LIGHT
}

/// Slow-time × fast-time complex samples.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoRaster<T> {
    pub data: Array2<Cplx<T>>,
    pub prf: f64,
    pub sample_rate: f64,
    /// Slow time of row 0, s.
    pub slow_origin: f64,
    /// Delay of column 0, s.
    pub fast_origin: f64,
    /// Payload bits each pulse carried.
    pub spans: Vec<PulseSpan>,
}

impl<T: Real> EchoRaster<T> {
    pub fn n_pulses(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_fast(&self) -> usize {
        self.data.ncols()
    }

    pub fn slow_time(&self, n: usize) -> f64 {
        self.slow_origin + n as f64 / self.prf
    }

    pub fn mean_power(&self) -> f64 {
        mean_power(self.data.as_slice().expect("standard layout"))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn header(&self) -> ContainerHeader {
        ContainerHeader {
            kind: ContainerKind::Raster,
            rows: self.n_pulses() as u64,
            cols: self.n_fast() as u64,
            sample_rate: self.sample_rate,
            row_rate: self.prf,
            row_origin: self.slow_origin,
            col_origin: self.fast_origin,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        save_container(path, &self.header(), self.data.as_slice().expect("standard layout"))
    }
}

pub(crate) fn mean_power<T: Real>(data: &[Cplx<T>]) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    data.iter().map(|c| c.norm_sqr().as_f64()).sum::<f64>() / data.len() as f64
}

struct Prepared {
    tx: PlatformTrack<f64>,
    rx: PlatformTrack<f64>,
    range0: f64,
    /// `frac(range0 / λ)`; the integer cycles drop out of the phase.
    cycles0: f64,
}

/// Echo of `scene` for each pulse. `pulses` holds one train per pulse or a
/// single train reused for every pulse.
pub fn simulate_echo<T: Real>(
    scene: &Scene,
    pulses: &[PulseTrain<T>],
    timing: &EchoTiming,
    spans: Vec<PulseSpan>,
    parallel: bool,
) -> Result<EchoRaster<T>> {
    timing.validate()?;
    let n_pulses = timing.n_pulses();
    if pulses.is_empty() || (pulses.len() != 1 && pulses.len() != n_pulses) {
        return domain(format!("need 1 or {n_pulses} pulse trains, got {}", pulses.len()));
    }
    let len = pulses[0].len();
    if len == 0 || pulses.iter().any(|p| p.len() != len) {
        return domain("pulse trains must be non-empty and equally long");
    }
    if (pulses[0].sample_rate.as_f64() - timing.sample_rate).abs() > 1e-9 * timing.sample_rate {
        return domain("pulse sample rate differs from the raster sample rate");
    }
    let lambda = scene.geometry.wavelength;
    let prepared = scene
        .scatterers
        .iter()
        .map(|s| {
            let (tx, rx) = scene.geometry.tracks_for(s.offset)?;
            let range0 = tx.initial_range + rx.initial_range;
            Ok(Prepared { tx, rx, range0, cycles0: (range0 / lambda).fract() })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut violations = Vec::new();
    for (i, (s, p)) in scene.scatterers.iter().zip(&prepared).enumerate() {
        for n in 0..n_pulses {
            let tau = delay(&p.tx, &p.rx, &s.motion, timing.slow_time(n));
            let d = (tau - timing.fast_origin) * timing.sample_rate;
            if d < 0.0 || d + len as f64 > timing.n_fast as f64 {
                violations.push(WindowViolation { scatterer: i, pulse: n, delay_s: tau });
                break;
            }
        }
    }
    if !violations.is_empty() {
        return Err(Error::OutsideWindow(violations));
    }

    let m = (timing.n_fast + len).next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let row = |n: usize| -> Vec<Cplx<T>> {
        let pulse = &pulses[if pulses.len() == 1 { 0 } else { n }];
        echo_row(scene, &prepared, pulse, timing, n, lambda, m, &fwd, &inv)
    };
    let rows: Vec<Vec<Cplx<T>>> = if parallel {
        (0..n_pulses).into_par_iter().map(row).collect()
    } else {
        (0..n_pulses).map(row).collect()
    };
    let flat: Vec<Cplx<T>> = rows.into_iter().flatten().collect();
    Ok(EchoRaster {
        data: Array2::from_shape_vec((n_pulses, timing.n_fast), flat).expect("row lengths"),
        prf: timing.prf,
        sample_rate: timing.sample_rate,
        slow_origin: timing.slow_time(0),
        fast_origin: timing.fast_origin,
        spans,
    })
}

#[allow(clippy::too_many_arguments)]
fn echo_row<T: Real>(
    scene: &Scene,
    prepared: &[Prepared],
    pulse: &PulseTrain<T>,
    timing: &EchoTiming,
    n: usize,
    lambda: f64,
    m: usize,
    fwd: &Arc<dyn Fft<T>>,
    inv: &Arc<dyn Fft<T>>,
) -> Vec<Cplx<T>> {
    let t = timing.slow_time(n);
    let mut spectrum = vec![Cplx::new(T::zero(), T::zero()); m];
    spectrum[..pulse.len()].copy_from_slice(&pulse.samples);
    fwd.process(&mut spectrum);
    let mut acc = vec![Cplx::<f64>::new(0.0, 0.0); m];
    for (s, p) in scene.scatterers.iter().zip(prepared) {
        let a = s.motion.reflectivity;
        if a == 0.0 {
            continue;
        }
        let offset = bistatic_range_offset(&p.tx, &p.rx, &s.motion, t);
        let d = ((p.range0 + offset) / SPEED_OF_LIGHT - timing.fast_origin) * timing.sample_rate;
        let cycles = (p.cycles0 + offset / lambda).rem_euclid(1.0);
        let amp = Cplx::from_polar(a, -std::f64::consts::TAU * cycles);
        // linear phase exp(−j2π k d / m) over signed bins
        let step = Cplx::from_polar(1.0, -std::f64::consts::TAU * d / m as f64);
        let wrap = Cplx::from_polar(1.0, std::f64::consts::TAU * d.fract());
        let mut ramp = amp;
        for (k, (o, x)) in acc.iter_mut().zip(&spectrum).enumerate() {
            if k % 1024 == 0 {
                // refresh to keep the recurrence from drifting
                ramp = amp * Cplx::from_polar(1.0, -std::f64::consts::TAU * ((k as f64 * d) / m as f64).rem_euclid(1.0));
            }
            let r = if k > m / 2 { ramp * wrap } else { ramp };
            *o += r * Cplx::new(x.re.as_f64(), x.im.as_f64());
            ramp *= step;
        }
    }
    let mut out: Vec<Cplx<T>> = acc.iter().map(|c| Cplx::new(T::lit(c.re), T::lit(c.im))).collect();
    inv.process(&mut out);
    let scale = T::one() / T::from_usize_lossy(m);
    out.truncate(timing.n_fast);
    out.iter_mut().for_each(|c| *c = *c * scale);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClutterModel {
    None,
    Gaussian,
    /// Compound Gaussian with Gamma texture of shape `shape` (K-distributed amplitude).
    KDistributed { shape: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClutterSpec {
    pub model: ClutterModel,
    /// Clutter-to-signal power ratio, dB.
    pub csr_db: f64,
    /// Signal-to-noise power ratio, dB; `+inf` disables noise.
    pub snr_db: f64,
    pub seed: u64,
}

impl ClutterSpec {
    pub fn clean() -> Self {
        Self { model: ClutterModel::None, csr_db: f64::NEG_INFINITY, snr_db: f64::INFINITY, seed: 0 }
    }

    pub fn noise_only(snr_db: f64, seed: u64) -> Self {
        Self { snr_db, seed, ..Self::clean() }
    }
}

/// Random source for pulse `n` (stream 0 is reserved for per-cell texture).
pub fn pulse_rng(seed: u64, n: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64 + 1);
    rng
}

pub(crate) fn complex_gaussian<T: Real, R: Rng>(rng: &mut R, sigma: f64) -> Cplx<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Cplx::new(T::lit(sigma * re), T::lit(sigma * im))
}

/// Adds clutter and white noise with powers set relative to the mean signal
/// power of the whole raster. Rows draw from independent streams, so the
/// result does not depend on `parallel`.
pub fn add_interference<T: Real>(raster: &EchoRaster<T>, spec: &ClutterSpec, parallel: bool) -> Result<EchoRaster<T>> {
    let clutter_on = !matches!(spec.model, ClutterModel::None) && spec.csr_db > f64::NEG_INFINITY;
    let noise_on = spec.snr_db < f64::INFINITY;
    if !clutter_on && !noise_on {
        return Ok(raster.clone());
    }
    if spec.snr_db.is_nan() || spec.csr_db.is_nan() {
        return domain("SNR and CSR must be numbers");
    }
    let ps = raster.mean_power();
    let noise_sigma = if noise_on { (ps / 10f64.powf(spec.snr_db / 10.0) / 2.0).sqrt() } else { 0.0 };
    let clutter_sigma = if clutter_on { (ps * 10f64.powf(spec.csr_db / 10.0) / 2.0).sqrt() } else { 0.0 };
    let n_fast = raster.n_fast();
    let texture: Vec<f64> = match spec.model {
        ClutterModel::KDistributed { shape } if clutter_on => {
            if !(shape > 0.0) {
                return domain("K-distribution shape must be positive");
            }
            let gamma = Gamma::new(shape, 1.0 / shape).map_err(|e| Error::Domain(e.to_string()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            (0..n_fast).map(|_| gamma.sample(&mut rng)).collect()
        }
        _ => vec![1.0; n_fast],
    };
    let mut out = raster.clone();
    let work = |(n, row): (usize, &mut [Cplx<T>])| {
        let mut rng = pulse_rng(spec.seed, n);
        for (j, c) in row.iter_mut().enumerate() {
            if clutter_on {
                *c = *c + complex_gaussian::<T, _>(&mut rng, clutter_sigma * texture[j].sqrt());
            }
            if noise_on {
                *c = *c + complex_gaussian::<T, _>(&mut rng, noise_sigma);
            }
        }
    };
    let slice = out.data.as_slice_mut().expect("standard layout");
    if parallel {
        slice.par_chunks_mut(n_fast).enumerate().for_each(work);
    } else {
        slice.chunks_mut(n_fast).enumerate().for_each(work);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{HeaveModel, PlatformGeometry};
    use crate::waveform::{kasami_small_set, FrameLayout, Repetition8, Shaping, Transmitter, WaveformParams};
    use jrc_testkit::aperiodic_correlation;

    pub(crate) fn geometry() -> BistaticGeometry<f64> {
        BistaticGeometry {
            tx: PlatformGeometry {
                altitude: 36_000e3,
                look_angle: 0.6f64.to_radians(),
                bearing: 0.0,
                speed: 2300.0,
                ground_speed: 2300.0,
            },
            rx: PlatformGeometry {
                altitude: 8e3,
                look_angle: 25.7f64.to_radians(),
                bearing: 4.0f64.to_radians(),
                speed: 200.0,
                ground_speed: 200.0,
            },
            wavelength: 0.03,
        }
    }

    fn transmitter() -> Transmitter<f64> {
        let code = kasami_small_set(6, 0).unwrap();
        let params = WaveformParams {
            chip_rate: 100e6,
            oversample: 2,
            code_length: 63,
            bit_energy: 1e-6,
            carrier_frequency: 10e9,
            shaping: Shaping::Rect,
        };
        Transmitter::new(params, code, Arc::new(Repetition8), FrameLayout { pilot_symbols: 1, data_symbols: 4 }).unwrap()
    }

    fn gaussian_pulse(len: usize) -> PulseTrain<f64> {
        let mut p = transmitter().pulse(&[0]).unwrap();
        let c = len as f64 / 2.0;
        let w = len as f64 / 10.0;
        p.samples = (0..len)
            .map(|i| {
                let x = (i as f64 - c) / w;
                Cplx::from_polar((-0.5 * x * x).exp(), 0.3 * i as f64)
            })
            .collect();
        p
    }

    #[test]
    fn zero_reflectivity_gives_zero_raster() {
        let scene = Scene::point(geometry(), TargetMotion::stationary(0.0));
        let pulse = transmitter().pulse(&[1]).unwrap();
        let timing = EchoTiming::covering(&scene, 100.0, 0.2, 200e6, pulse.len(), 8).unwrap();
        let r = simulate_echo(&scene, &[pulse], &timing, vec![], false).unwrap();
        assert!(r.data.iter().all(|c| *c == Cplx::new(0.0, 0.0)));
    }

    #[test]
    fn matched_filter_peak_sits_at_true_delay() {
        let scene = Scene::point(geometry(), TargetMotion::stationary(1.0));
        let pulse = transmitter().pulse(&[1]).unwrap();
        let mut timing = EchoTiming::covering(&scene, 100.0, 0.1, 200e6, pulse.len(), 20).unwrap();
        timing.aperture_time = 0.01;
        let r = simulate_echo(&scene, std::slice::from_ref(&pulse), &timing, vec![], false).unwrap();
        let (tx, rx) = scene.geometry.tracks_for([0.0; 3]).unwrap();
        let tau = delay(&tx, &rx, &scene.scatterers[0].motion, timing.slow_time(0));
        let expected = (tau - timing.fast_origin) * timing.sample_rate;
        let row: Vec<_> = r.data.row(0).to_vec();
        let corr = aperiodic_correlation(&row, &pulse.samples);
        assert!((corr.peak_lag() as f64 - expected).abs() <= 0.5, "{} vs {expected}", corr.peak_lag());
    }

    #[test]
    fn pulse_to_pulse_phase_follows_bistatic_range() {
        let scene = Scene::point(geometry(), TargetMotion::stationary(1.0));
        let pulse = gaussian_pulse(200);
        let timing = EchoTiming::covering(&scene, 500.0, 0.02, 200e6, pulse.len(), 300).unwrap();
        let r = simulate_echo(&scene, &[pulse], &timing, vec![], false).unwrap();
        let (tx, rx) = scene.geometry.tracks_for([0.0; 3]).unwrap();
        let m = &scene.scatterers[0].motion;
        for p in 0..r.n_pulses() - 1 {
            let s0: Cplx<f64> = r.data.row(p).iter().sum();
            let s1: Cplx<f64> = r.data.row(p + 1).iter().sum();
            let measured = (s1 * s0.conj()).arg();
            let dr = bistatic_range_offset(&tx, &rx, m, r.slow_time(p + 1)) - bistatic_range_offset(&tx, &rx, m, r.slow_time(p));
            let expected = -std::f64::consts::TAU * dr / 0.03;
            let err = (measured - expected + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
            assert!(err.abs() < 1e-6, "pulse {p}: {err}");
        }
    }

    #[test]
    fn linear_in_scatterers() {
        let g = geometry();
        let heave = HeaveModel::swell(1.6, 3.5).unwrap();
        let m1 = g.resolve_motion(10.5, 0.5, 1.0, heave, 1.1, [0.0; 3]);
        let m2 = TargetMotion::stationary(0.7);
        let a = Scatterer { offset: [0.0; 3], motion: m1 };
        let b = Scatterer { offset: [6.0, -4.0, 0.0], motion: m2 };
        let both = Scene::new(g, vec![a.clone(), b.clone()]).unwrap();
        let pulse = transmitter().pulse(&[1]).unwrap();
        let timing = EchoTiming::covering(&both, 200.0, 0.05, 200e6, pulse.len(), 16).unwrap();
        let pulses = [pulse];
        let ra = simulate_echo(&Scene::new(g, vec![a]).unwrap(), &pulses, &timing, vec![], false).unwrap();
        let rb = simulate_echo(&Scene::new(g, vec![b]).unwrap(), &pulses, &timing, vec![], false).unwrap();
        let rab = simulate_echo(&both, &pulses, &timing, vec![], false).unwrap();
        let scale = ra.data.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for ((x, y), z) in ra.data.iter().zip(rb.data.iter()).zip(rab.data.iter()) {
            assert!((x + y - z).norm() < 1e-9 * scale);
        }
    }

    #[test]
    fn energy_is_pulses_times_pulse_energy() {
        let scene = Scene::point(geometry(), TargetMotion::stationary(1.1));
        let pulse = transmitter().pulse(&[1]).unwrap();
        let timing = EchoTiming::covering(&scene, 200.0, 0.05, 200e6, pulse.len(), 400).unwrap();
        let r = simulate_echo(&scene, std::slice::from_ref(&pulse), &timing, vec![], false).unwrap();
        let e: f64 = r.data.iter().map(|c| c.norm_sqr()).sum();
        let expected = r.n_pulses() as f64 * 1.21 * pulse.sample_energy();
        assert!((e / expected - 1.0).abs() < 0.01, "ratio {}", e / expected);
    }

    #[test]
    fn doubling_prf_keeps_matching_rows() {
        let scene = Scene::point(geometry(), TargetMotion::stationary(1.0));
        let pulse = transmitter().pulse(&[0]).unwrap();
        let timing = EchoTiming::covering(&scene, 100.0, 0.1, 200e6, pulse.len(), 8).unwrap();
        let double = EchoTiming { prf: 200.0, ..timing };
        assert_eq!(double.n_pulses(), 2 * timing.n_pulses());
        let pulses = [pulse];
        let a = simulate_echo(&scene, &pulses, &timing, vec![], false).unwrap();
        let b = simulate_echo(&scene, &pulses, &double, vec![], false).unwrap();
        for n in 0..a.n_pulses() {
            assert_eq!(a.slow_time(n), b.slow_time(2 * n));
            assert_eq!(a.data.row(n), b.data.row(2 * n));
        }
    }

    #[test]
    fn window_violation_names_the_scatterer() {
        let scene = Scene::point(geometry(), TargetMotion::stationary(1.0));
        let pulse = transmitter().pulse(&[0]).unwrap();
        let mut timing = EchoTiming::covering(&scene, 100.0, 0.1, 200e6, pulse.len(), 8).unwrap();
        timing.fast_origin += 1e-6;
        match simulate_echo(&scene, &[pulse], &timing, vec![], false) {
            Err(Error::OutsideWindow(v)) => assert_eq!(v[0].scatterer, 0),
            other => panic!("expected window error, got {other:?}"),
        }
    }

    #[test]
    fn serial_and_parallel_agree() {
        let scene = Scene::point(geometry(), TargetMotion::stationary(1.0));
        let pulse = transmitter().pulse(&[1]).unwrap();
        let timing = EchoTiming::covering(&scene, 300.0, 0.1, 200e6, pulse.len(), 8).unwrap();
        let a = simulate_echo(&scene, std::slice::from_ref(&pulse), &timing, vec![], false).unwrap();
        let b = simulate_echo(&scene, &[pulse], &timing, vec![], true).unwrap();
        assert_eq!(a, b);
        let spec = ClutterSpec { model: ClutterModel::KDistributed { shape: 1.5 }, csr_db: -5.0, snr_db: 3.0, seed: 9 };
        assert_eq!(add_interference(&a, &spec, false).unwrap(), add_interference(&a, &spec, true).unwrap());
    }

    #[test]
    fn interference_contract() {
        let scene = Scene::point(geometry(), TargetMotion::stationary(1.0));
        let pulse = transmitter().pulse(&[1]).unwrap();
        let timing = EchoTiming::covering(&scene, 2000.0, 0.8, 200e6, pulse.len(), 8).unwrap();
        let r = simulate_echo(&scene, &[pulse], &timing, vec![], true).unwrap();
        assert_eq!(add_interference(&r, &ClutterSpec::clean(), true).unwrap(), r);
        let noisy = add_interference(&r, &ClutterSpec::noise_only(0.0, 42), true).unwrap();
        assert!(r.data.len() >= 1_000_000);
        let noise: Vec<Cplx<f64>> = noisy.data.iter().zip(r.data.iter()).map(|(a, b)| a - b).collect();
        let snr_db = 10.0 * (r.mean_power() / mean_power(&noise)).log10();
        assert!(snr_db.abs() <= 0.2, "measured {snr_db} dB");
        assert_eq!(add_interference(&r, &ClutterSpec::noise_only(0.0, 42), false).unwrap(), noisy);
        assert_ne!(add_interference(&r, &ClutterSpec::noise_only(0.0, 43), true).unwrap(), noisy);
    }
}
