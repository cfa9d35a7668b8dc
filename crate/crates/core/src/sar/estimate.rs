//! Motion parameters from the RCM-line Doppler: linear terms, wave
//! frequencies and heave amplitudes.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};
use crate::geometry::{doppler_linear_terms, HeaveComponent, HeaveModel, PlatformTrack, TargetMotion};

use super::compress::RangeCompressed;
use super::doppler::{extract_doppler_history, remove_linear_component, DopplerHistory};
use super::music::{root_music_frequencies, MusicConfig, MusicEstimate};
use super::track::{RcmLine, RcmTrack};

/// Least squares over the given columns. Columns are normalised before the
/// SVD so the rank test is scale-free. Returns `(coefficients, rss)`.
fn lstsq(columns: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = y.len();
    let k = columns.len();
    if n < k {
        return domain(format!("{n} samples for {k} unknowns"));
    }
    let norms: Vec<f64> = columns.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    if norms.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return domain("design matrix has an empty column");
    }
    let a = DMatrix::from_fn(n, k, |i, j| columns[j][i] / norms[j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-9 * smax) {
        return domain(format!("rank-deficient design matrix (σ_min/σ_max = {:e})", smin / smax));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::Numerical { message: e.into(), condition: smax / smin })?;
    let rss = (&a * &x - &b).norm_squared();
    Ok(((0..k).map(|j| x[j] / norms[j]).collect(), rss))
}

fn heave_columns(omega: f64, t: &[f64], wavelength: f64) -> [Vec<f64>; 2] {
    let s = 2.0 / wavelength * omega;
    [
        // q
        t.iter().map(|&x| -s * (omega * x).cos()).collect(),
        // p
        t.iter().map(|&x| s * (omega * x).sin()).collect(),
    ]
}

/// Heave amplitudes `(Ω, p̂, q̂)` regressing `residual` (Hz, linear terms
/// already removed) on `−(2/λ)(q Ω cos Ωt − p Ω sin Ωt)` per frequency.
pub fn estimate_wave_amplitudes(
    residual: &[f64],
    omegas: &[f64],
    t: &[f64],
    wavelength: f64,
) -> Result<Vec<HeaveComponent<f64>>> {
    if omegas.is_empty() {
        return domain("no wave frequencies given");
    }
    if residual.len() != t.len() {
        return domain("residual and time grid differ in length");
    }
    for (i, a) in omegas.iter().enumerate() {
        if !(*a > 0.0) || !a.is_finite() {
            return domain(format!("wave frequency {a} must be positive"));
        }
        if omegas[..i].iter().any(|b| (a - b).abs() <= 1e-9 * a.abs().max(b.abs())) {
            return domain(format!("duplicate wave frequency {a}"));
        }
    }
    let cols: Vec<Vec<f64>> = omegas.iter().flat_map(|&o| heave_columns(o, t, wavelength)).collect();
    let (x, _) = lstsq(&cols, residual)?;
    Ok(omegas
        .iter()
        .enumerate()
        .map(|(i, &omega)| HeaveComponent { omega, q: x[2 * i], p: x[2 * i + 1] })
        .collect())
}

/// Linear Doppler terms plus heave components of one target.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionEstimate {
    /// Hz, at `t = 0`.
    pub centroid: f64,
    /// Hz/s.
    pub rate: f64,
    pub components: Vec<HeaveComponent<f64>>,
    /// RMS of the Doppler fit residual, Hz.
    pub residual_rms: f64,
    /// Raw Root-MUSIC output that seeded the frequency search.
    pub music: Option<MusicEstimate>,
    /// Set when the fitted swell Doppler is under three times the residual RMS.
    pub low_confidence: bool,
    /// Whole PRFs added to the measured centroid.
    pub alias: i64,
}

impl MotionEstimate {
    /// The exact parameters of a known motion.
    pub fn from_motion(tx: &PlatformTrack<f64>, rx: &PlatformTrack<f64>, motion: &TargetMotion<f64>, wavelength: f64) -> Self {
        let (centroid, rate) = doppler_linear_terms(tx, rx, motion, wavelength);
        Self {
            centroid,
            rate,
            components: motion.heave.components().to_vec(),
            residual_rms: 0.0,
            music: None,
            low_confidence: false,
            alias: 0,
        }
    }

    /// A stationary scatterer at the given tracks.
    pub fn stationary(tx: &PlatformTrack<f64>, rx: &PlatformTrack<f64>, wavelength: f64) -> Self {
        Self::from_motion(tx, rx, &TargetMotion::stationary(1.0), wavelength)
    }

    pub fn heave(&self) -> HeaveModel<f64> {
        HeaveModel::new(self.components.clone()).unwrap_or_default()
    }

    /// Modelled Doppler at slow time `t`, Hz.
    pub fn doppler(&self, t: f64, wavelength: f64) -> f64 {
        self.centroid + self.rate * t - 2.0 / wavelength * self.heave().rate(t)
    }

    /// Bistatic range offset `R_B(t) − R_B(0)` implied by the model, m.
    pub fn range_offset(&self, t: f64, wavelength: f64) -> f64 {
        let h = self.heave();
        -wavelength * (self.centroid * t + 0.5 * self.rate * t * t) + 2.0 * (h.displacement(t) - h.displacement(0.0))
    }

    /// Range this target gains over `reference` by time `t`, m.
    pub fn excess_range(&self, reference: &MotionEstimate, t: f64, wavelength: f64) -> f64 {
        self.range_offset(t, wavelength) - reference.range_offset(t, wavelength)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Pulse-pair window, pairs.
    pub window: usize,
    pub music: MusicConfig,
    /// Maximum number of wave components.
    pub model_order: usize,
    /// Search band for Ω, rad/s. `None`: from a quarter period over the
    /// aperture up to a quarter of the decimated Nyquist frequency.
    pub omega_range: Option<(f64, f64)>,
    pub grid_points: usize,
    /// A component is kept only if it cuts the fit RSS by this fraction.
    pub min_rss_drop: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            window: 32,
            music: MusicConfig::default(),
            model_order: 2,
            omega_range: None,
            grid_points: 400,
            min_rss_drop: 0.5,
        }
    }
}

/// Estimation pipeline: pulse-pair Doppler → line removal → Root-MUSIC
/// seeds → frequency refinement by variable projection → least-squares
/// amplitudes.
///
/// Root-MUSIC alone is biased when the aperture covers less than one wave
/// period (the line fit eats part of the swell), so its roots seed a search
/// that fits line and sinusoids jointly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionEstimator {
    pub config: EstimatorConfig,
    pub wavelength: f64,
}

impl MotionEstimator {
    pub fn new(wavelength: f64) -> Self {
        Self { config: EstimatorConfig::default(), wavelength }
    }

    pub fn doppler_history(&self, line: &RcmLine) -> Result<DopplerHistory> {
        extract_doppler_history(line, self.config.window)
    }

    /// Estimate from the RCM line. The centroid is left aliased into the
    /// band the pulse-pair phase fell in; see [`Self::dealias`].
    pub fn estimate(&self, line: &RcmLine) -> Result<MotionEstimate> {
        let cfg = &self.config;
        let hist = self.doppler_history(line)?;
        let (t, f) = hist.valid();
        if t.len() < 16 {
            return Err(Error::Estimation(format!("only {} usable Doppler samples", t.len())));
        }
        let (_, _, resid) = remove_linear_component(&f, &t)?;
        let music = root_music_frequencies(&resid, cfg.model_order, line.prf, &cfg.music).ok();
        let span = t[t.len() - 1] - t[0];
        let (lo, hi) = cfg
            .omega_range
            .unwrap_or((PI / (2.0 * span), PI * line.prf / (4.0 * cfg.music.decimation.max(1) as f64)));
        if !(lo > 0.0 && hi > lo) {
            return domain(format!("bad frequency search band ({lo}, {hi})"));
        }
        let lambda = self.wavelength;
        let base: Vec<Vec<f64>> = vec![vec![1.0; t.len()], t.clone()];
        let fit = |omegas: &[f64]| -> Option<(Vec<f64>, f64)> {
            let mut cols = base.clone();
            for &o in omegas {
                cols.extend(heave_columns(o, &t, lambda));
            }
            lstsq(&cols, &f).ok()
        };
        let (_, mut rss) = fit(&[]).ok_or_else(|| Error::Estimation("line fit failed".into()))?;
        let grid: Vec<f64> = (0..cfg.grid_points.max(2))
            .map(|i| lo * (hi / lo).powf(i as f64 / (cfg.grid_points.max(2) - 1) as f64))
            .collect();
        let step = (hi / lo).powf(1.0 / (grid.len() - 1) as f64);
        let min_sep = PI / span;
        let mut omegas: Vec<f64> = Vec::new();
        for _ in 0..cfg.model_order {
            let cost = |o: f64| {
                let mut trial = omegas.clone();
                trial.push(o);
                fit(&trial).map_or(f64::INFINITY, |r| r.1)
            };
            let allowed = |o: f64| o >= lo && o <= hi && omegas.iter().all(|p| (o - p).abs() > min_sep);
            let seeds = music.iter().flat_map(|m| m.omegas.iter().copied());
            let mut best = (f64::INFINITY, f64::NAN);
            for o in grid.iter().copied().chain(seeds).filter(|&o| allowed(o)) {
                let c = cost(o);
                if c < best.0 {
                    best = (c, o);
                }
            }
            if !best.0.is_finite() {
                break;
            }
            let o = golden_min(&cost, (best.1 / step).max(lo), (best.1 * step).min(hi), 48);
            let refined = cost(o);
            let (c, o) = if refined <= best.0 { (refined, o) } else { best };
            if c > (1.0 - cfg.min_rss_drop) * rss {
                break;
            }
            omegas.push(o);
            rss = c;
        }
        // one coordinate pass so earlier frequencies see the later ones
        if omegas.len() > 1 {
            for i in 0..omegas.len() {
                let cost = |o: f64| {
                    let mut trial = omegas.clone();
                    trial[i] = o;
                    fit(&trial).map_or(f64::INFINITY, |r| r.1)
                };
                let o = golden_min(&cost, omegas[i] / step, omegas[i] * step, 48);
                if cost(o) < rss {
                    rss = cost(o);
                    omegas[i] = o;
                }
            }
        }
        let (coef, rss) = fit(&omegas).ok_or_else(|| Error::Estimation("joint fit failed".into()))?;
        let (centroid, rate) = (coef[0], coef[1]);
        let components = if omegas.is_empty() {
            Vec::new()
        } else {
            let lin: Vec<f64> = t.iter().zip(&f).map(|(x, y)| y - centroid - rate * x).collect();
            estimate_wave_amplitudes(&lin, &omegas, &t, lambda)?
        };
        let residual_rms = (rss / t.len() as f64).sqrt();
        // the fitted swell should stand well clear of what is left over
        let swell_rms = {
            let h = HeaveModel::new(components.clone())?;
            let sq: f64 = t.iter().map(|&x| (2.0 / lambda * h.rate(x)).powi(2)).sum();
            (sq / t.len() as f64).sqrt()
        };
        let low_confidence = !components.is_empty() && swell_rms < 3.0 * residual_rms;
        Ok(MotionEstimate {
            centroid,
            rate,
            components,
            residual_rms,
            music,
            low_confidence,
            alias: 0,
        })
    }

    /// Picks the PRF multiple for the centroid whose implied range history
    /// best matches the coarse range track.
    pub fn dealias<T: crate::Real>(&self, est: &MotionEstimate, track: &RcmTrack, rc: &RangeCompressed<T>) -> MotionEstimate {
        let usable: Vec<usize> = (0..rc.n_pulses()).filter(|&n| !rc.erased[n]).collect();
        let measured: Vec<f64> = usable.iter().map(|&n| track.bins[n] * rc.bin_spacing()).collect();
        let mut best = (f64::INFINITY, 0i64);
        for m in -4i64..=4 {
            let trial = MotionEstimate { centroid: est.centroid + m as f64 * rc.prf, ..est.clone() };
            let diff: Vec<f64> = usable
                .iter()
                .zip(&measured)
                .map(|(&n, r)| r - trial.range_offset(rc.slow_time(n), self.wavelength))
                .collect();
            let mean = diff.iter().sum::<f64>() / diff.len().max(1) as f64;
            let rss: f64 = diff.iter().map(|d| (d - mean) * (d - mean)).sum();
            if rss < best.0 {
                best = (rss, m);
            }
        }
        MotionEstimate { centroid: est.centroid + best.1 as f64 * rc.prf, alias: est.alias + best.1, ..est.clone() }
    }

    /// Track, line, estimate and de-alias in one call.
    pub fn run<T: crate::Real>(&self, rc: &RangeCompressed<T>, track: &RcmTrack) -> Result<(MotionEstimate, RcmLine)> {
        let line = super::track::extract_rcm_line(rc, track)?;
        let est = self.estimate(&line)?;
        Ok((self.dealias(&est, track, rc), line))
    }
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
