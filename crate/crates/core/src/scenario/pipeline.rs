//! Builds the simulation objects from a config and runs the joint
//! receiver on one raster.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comm::{reconstruct_reference, CommReport, EqualizerConfig, JrcReceiver};
use crate::echo::{add_interference, simulate_echo, ClutterSpec, EchoRaster, EchoTiming, Scene};
use crate::error::{domain, Error, Result};
use crate::geometry::{bistatic_range_offset, BistaticGeometry, HeaveModel, PlatformGeometry, PlatformTrack, TargetMotion};
use crate::sar::{
    compensate_and_focus, range_compress, FocusGeometry, FocusReport, MotionEstimate, MotionEstimator, RangeCompressed,
    RcmTrack,
};
use crate::scalar::SPEED_OF_LIGHT;
use crate::waveform::{codec_by_name, kasami_small_set, BitStream, FrameLayout, PulseTrain, Transmitter, WaveformParams};

use super::config::ScenarioConfig;
use super::ship::stencil_offsets;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Point,
    Ship,
    Comm,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Point => "point",
            Self::Ship => "ship",
            Self::Comm => "comm",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "point" => Ok(Self::Point),
            "ship" | "ship-matrix" => Ok(Self::Ship),
            "comm" | "comm-only" => Ok(Self::Comm),
            other => domain(format!("unknown mode `{other}`")),
        }
    }
}

fn wrap(stage: &'static str) -> impl Fn(Error) -> Error {
    move |e| Error::Stage { stage: stage.to_string(), source: Box::new(e) }
}

/// Everything a run needs, derived once from the config.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub geometry: BistaticGeometry<f64>,
    /// Target motion resolved at the scene centre.
    pub motion: TargetMotion<f64>,
    pub tx: Transmitter<f64>,
}

/// Raster plus what went into it.
#[derive(Debug, Clone)]
pub struct Simulated {
    pub scene: Scene,
    pub payload: BitStream,
    pub clean: EchoRaster<f64>,
    pub timing: EchoTiming,
}

/// Receiver output for one raster.
#[derive(Debug, Clone)]
pub struct Processed {
    pub comm: CommReport,
    pub rc: RangeCompressed<f64>,
    pub track: RcmTrack,
    pub estimate: MotionEstimate,
    pub baseline: FocusReport<f64>,
    pub compensated: FocusReport<f64>,
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> Result<Self> {
        let sy = &config.system;
        let platform = |p: &super::config::PlatformConfig| PlatformGeometry {
            altitude: p.altitude,
            look_angle: p.elevation,
            bearing: p.bearing,
            speed: p.speed,
            ground_speed: p.ground_speed.unwrap_or(p.speed),
        };
        let geometry = BistaticGeometry {
            tx: platform(&config.transmitter),
            rx: platform(&config.receiver),
            wavelength: SPEED_OF_LIGHT / sy.carrier,
        };
        let t = &config.target;
        let heave = if t.heave_amplitude == 0.0 {
            HeaveModel::none()
        } else {
            HeaveModel::swell(t.heave_amplitude, t.heave_period)?
        };
        let motion = geometry.resolve_motion(t.speed, t.heading, t.acceleration, heave, t.reflectivity, [0.0, 0.0, t.altitude]);
        let code = kasami_small_set(sy.spreading_degree, sy.code_index)?;
        let params = WaveformParams {
            chip_rate: sy.bandwidth,
            oversample: sy.oversample,
            code_length: code.len(),
            bit_energy: sy.bit_energy,
            carrier_frequency: sy.carrier,
            shaping: sy.shaping,
        };
        let codec: Arc<dyn crate::waveform::Codec> =
            codec_by_name(&sy.codec).ok_or_else(|| Error::Domain(format!("unknown codec `{}`", sy.codec)))?.into();
        let layout = FrameLayout { pilot_symbols: sy.pilot_symbols, data_symbols: sy.data_symbols };
        let tx = Transmitter::new(params, code, codec, layout)?;
        Ok(Self { config: config.clone(), geometry, motion, tx })
    }

    pub fn wavelength(&self) -> f64 {
        self.geometry.wavelength
    }

    pub fn aperture_time(&self) -> f64 {
        self.config.aperture_time()
    }

    pub fn prf(&self) -> f64 {
        self.config.system.prf
    }

    pub fn parallel(&self) -> bool {
        self.config.run.parallel
    }

    /// Tracks to the scene centre.
    pub fn centre_tracks(&self) -> Result<(PlatformTrack<f64>, PlatformTrack<f64>)> {
        self.geometry.tracks_for([0.0; 3])
    }

    pub fn scene(&self, mode: Mode) -> Result<Scene> {
        match mode {
            Mode::Ship => {
                let offsets = stencil_offsets(&self.config.ship.stencil, self.config.ship.spacing, self.config.target.heading);
                Scene::dot_matrix(self.geometry, &offsets, self.motion.clone())
            }
            _ => Ok(Scene::point(self.geometry, self.motion.clone())),
        }
    }

    /// Random payload filling `n_pulses` pulses.
    pub fn payload(&self, n_pulses: usize, seed: u64) -> Result<BitStream> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let bits = (0..n_pulses * self.tx.payload_bits_per_pulse()).map(|_| rng.random_range(0..2u8)).collect();
        BitStream::new(bits, 0)
    }

    /// Noise-free echo of `scene` carrying a random payload.
    pub fn simulate(&self, scene: Scene, seed: u64) -> Result<Simulated> {
        let timing = EchoTiming::covering(
            &scene,
            self.prf(),
            self.aperture_time(),
            self.tx.params.sample_rate(),
            self.tx.samples_per_pulse(),
            self.config.run.window_margin,
        )
        .map_err(wrap("timing"))?;
        let n = timing.n_pulses();
        let payload = self.payload(n, seed).map_err(wrap("payload"))?;
        let pulses = self.tx.pulses(&payload).map_err(wrap("transmit"))?;
        let clean = simulate_echo(&scene, &pulses, &timing, self.tx.spans(n), self.parallel()).map_err(wrap("echo"))?;
        Ok(Simulated { scene, payload, clean, timing })
    }

    pub fn clutter_spec(&self, snr_db: f64, seed: u64) -> ClutterSpec {
        let c = &self.config.clutter;
        ClutterSpec { model: c.model, csr_db: c.csr_db, snr_db, seed }
    }

    pub fn noisy(&self, sim: &Simulated, snr_db: f64, seed: u64) -> Result<EchoRaster<f64>> {
        add_interference(&sim.clean, &self.clutter_spec(snr_db, seed), self.parallel()).map_err(wrap("clutter"))
    }

    /// Start column of each pulse as seen from the scene centre.
    pub fn pulse_starts(&self, raster: &EchoRaster<f64>) -> Result<Vec<isize>> {
        let (tx, rx) = self.centre_tracks()?;
        let still = TargetMotion::stationary(1.0);
        Ok((0..raster.n_pulses())
            .map(|n| {
                let r = tx.initial_range + rx.initial_range + bistatic_range_offset(&tx, &rx, &still, raster.slow_time(n));
                ((r / SPEED_OF_LIGHT - raster.fast_origin) * raster.sample_rate).round() as isize
            })
            .collect())
    }

    pub fn receiver(&self) -> JrcReceiver<f64> {
        JrcReceiver {
            tx: self.tx.clone(),
            equalizer: Some(EqualizerConfig { taps: self.config.run.equalizer_taps, loading: self.config.run.equalizer_loading }),
            parallel: self.parallel(),
        }
    }

    /// Decode, compress with the decoded references, estimate, focus.
    pub fn process(&self, raster: &EchoRaster<f64>, truth: Option<&BitStream>) -> Result<Processed> {
        let starts = self.pulse_starts(raster).map_err(wrap("align"))?;
        let comm = self.receiver().receive_raster(raster.data.view(), &starts, truth).map_err(wrap("decode"))?;
        let refs = reconstruct_reference(&comm.message, &self.tx).map_err(wrap("reference"))?;
        let rc = range_compress(raster, &refs, self.parallel()).map_err(wrap("range_compress"))?;
        self.focus(comm, rc)
    }

    /// Range compression with externally supplied references (e.g. the
    /// transmitted pulses, or deliberately wrong ones).
    pub fn compress_with(&self, raster: &EchoRaster<f64>, refs: &[Option<PulseTrain<f64>>]) -> Result<RangeCompressed<f64>> {
        range_compress(raster, refs, self.parallel()).map_err(wrap("range_compress"))
    }

    pub fn focus_geometry(&self, rc: &RangeCompressed<f64>, track: &RcmTrack) -> Result<FocusGeometry> {
        let (tx, rx) = self.centre_tracks()?;
        let mid = track.bins[rc.n_pulses() / 2].round().max(0.0) as usize;
        let half = self.config.run.image_half_width;
        let start = mid.saturating_sub(half);
        let end = (mid + half + 1).min(rc.n_bins());
        Ok(FocusGeometry { tx, rx, wavelength: self.wavelength(), range_window: Some((start, end)) })
    }

    pub fn focus(&self, comm: CommReport, rc: RangeCompressed<f64>) -> Result<Processed> {
        let track = RcmTrack::peak_tracking(&rc, 4, 9).map_err(wrap("track"))?;
        let estimator = MotionEstimator::new(self.wavelength());
        let (estimate, _) = estimator.run(&rc, &track).map_err(wrap("estimate"))?;
        let fg = self.focus_geometry(&rc, &track).map_err(wrap("focus"))?;
        let baseline = compensate_and_focus(&rc, None, &fg, self.parallel()).map_err(wrap("focus_baseline"))?;
        let compensated =
            compensate_and_focus(&rc, Some(&estimate), &fg, self.parallel()).map_err(wrap("focus_compensated"))?;
        Ok(Processed { comm, rc, track, estimate, baseline, compensated })
    }
}
