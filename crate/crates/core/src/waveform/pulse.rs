//! QPSK baseband synthesis with rectangular or raised-cosine chip shaping.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{Cplx, Real};

use super::kasami::chip_amplitude;

/// Raised-cosine taps reach this many chips either side of the centre.
pub const RC_HALF_SPAN_CHIPS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shaping {
    Rect,
    RaisedCosine { rolloff: f64 },
}

impl Default for Shaping {
    fn default() -> Self {
        Shaping::Rect
    }
}

impl Shaping {
    /// Samples still influenced by a neighbouring chip, measured from a chip boundary.
    pub fn tail_samples(&self, oversample: usize) -> usize {
        match self {
            Shaping::Rect => 0,
            Shaping::RaisedCosine { .. } => RC_HALF_SPAN_CHIPS * oversample,
        }
    }
}

/// Raised-cosine impulse response at `x` chip durations from the centre.
pub fn raised_cosine(x: f64, rolloff: f64) -> f64 {
    let sinc = |v: f64| if v == 0.0 { 1.0 } else { (std::f64::consts::PI * v).sin() / (std::f64::consts::PI * v) };
    let d = 2.0 * rolloff * x;
    if rolloff > 0.0 && (d.abs() - 1.0).abs() < 1e-9 {
        return std::f64::consts::FRAC_PI_4 * sinc(1.0 / (2.0 * rolloff));
    }
    sinc(x) * (std::f64::consts::PI * rolloff * x).cos() / (1.0 - d * d)
}

/// Truncated raised-cosine taps, normalised so that `Σ g² = oversample`
/// (the energy of a rectangular chip).
pub fn raised_cosine_taps(rolloff: f64, oversample: usize) -> Vec<f64> {
    let half = (RC_HALF_SPAN_CHIPS * oversample) as isize;
    let mut g: Vec<f64> = (-half..=half)
        .map(|m| raised_cosine(m as f64 / oversample as f64, rolloff))
        .collect();
    let e: f64 = g.iter().map(|v| v * v).sum();
    let s = (oversample as f64 / e).sqrt();
    g.iter_mut().for_each(|v| *v *= s);
    g
}

/// Turns chip-rate binary chips into an oversampled bipolar lane.
pub fn shape_lane<T: Real>(chips: &[u8], oversample: usize, shaping: Shaping) -> Vec<T> {
    match shaping {
        Shaping::Rect => chips
            .iter()
            .flat_map(|&c| std::iter::repeat_n(chip_amplitude::<T>(c), oversample))
            .collect(),
        Shaping::RaisedCosine { rolloff } => {
            let taps = raised_cosine_taps(rolloff, oversample);
            let half = RC_HALF_SPAN_CHIPS * oversample;
            let n = chips.len() * oversample;
            let mut out = vec![0.0f64; n];
            for (k, &c) in chips.iter().enumerate() {
                let a = if c == 0 { 1.0 } else { -1.0 };
                let centre = k * oversample + (oversample - 1) / 2;
                let lo = centre.saturating_sub(half);
                let hi = (centre + half).min(n - 1);
                for (i, o) in out.iter_mut().enumerate().take(hi + 1).skip(lo) {
                    *o += a * taps[i + half - centre];
                }
            }
            out.into_iter().map(T::lit).collect()
        }
    }
}

/// Sampled complex baseband `s_LP` with its timing bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain<T> {
    pub samples: Vec<Cplx<T>>,
    pub sample_rate: T,
    pub chip_duration: T,
    pub symbol_interval: T,
    /// Always `symbol_interval / 2`.
    pub bit_interval: T,
    pub bit_energy: T,
    pub carrier_frequency: T,
    pub shaping: Shaping,
}

impl<T: Real> PulseTrain<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> T {
        T::from_usize_lossy(self.len()) / self.sample_rate
    }

    /// `∫|s_LP|² dt` as a Riemann sum.
    pub fn energy(&self) -> T {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<T>() / self.sample_rate
    }

    /// `Σ|s|²` without the `dt` factor; the zero-lag matched-filter output.
    pub fn sample_energy(&self) -> T {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Real bandpass form `Re{s_LP} cos 2πf_c t − Im{s_LP} sin 2πf_c t`,
    /// held `upsample` times per baseband sample. `carrier` overrides the
    /// nominal carrier so the product stays representable.
    pub fn to_bandpass(&self, carrier: T, upsample: usize) -> Vec<T> {
        let rate = self.sample_rate * T::from_usize_lossy(upsample);
        let mut out = Vec::with_capacity(self.len() * upsample);
        for (n, s) in self.samples.iter().enumerate() {
            for u in 0..upsample {
                let t = T::from_usize_lossy(n * upsample + u) / rate;
                let ph = T::TAU() * carrier * t;
                out.push(s.re * ph.cos() - s.im * ph.sin());
            }
        }
        out
    }
}

/// Timing and energy parameters of the transmit waveform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveformParams<T> {
    pub chip_rate: T,
    pub oversample: usize,
    pub code_length: usize,
    pub bit_energy: T,
    pub carrier_frequency: T,
    pub shaping: Shaping,
}

impl<T: Real> WaveformParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.chip_rate > T::zero()) || self.oversample == 0 || self.code_length == 0 {
            return domain("chip rate, oversample and code length must be positive");
        }
        if !(self.bit_energy > T::zero()) {
            return domain("bit energy must be positive");
        }
        if let Shaping::RaisedCosine { rolloff } = self.shaping {
            if !(0.0..=1.0).contains(&rolloff) {
                return domain(format!("rolloff {rolloff} outside [0, 1]"));
            }
        }
        Ok(())
    }

    pub fn sample_rate(&self) -> T {
        self.chip_rate * T::from_usize_lossy(self.oversample)
    }

    pub fn chip_duration(&self) -> T {
        T::one() / self.chip_rate
    }

    pub fn symbol_interval(&self) -> T {
        T::from_usize_lossy(self.code_length) / self.chip_rate
    }

    pub fn bit_interval(&self) -> T {
        self.symbol_interval() / T::lit(2.0)
    }

    /// `sqrt(E_B / T_B)`.
    pub fn amplitude(&self) -> T {
        (self.bit_energy / self.bit_interval()).sqrt()
    }

    pub fn samples_per_symbol(&self) -> usize {
        self.code_length * self.oversample
    }
}

/// `s_LP = sqrt(E_B/T_B)·(p1 + j·p2)` from chip-rate lanes; chip 0 → +1,
/// chip 1 → −1.
pub fn qpsk_baseband<T: Real>(b1: &[u8], b2: &[u8], params: &WaveformParams<T>) -> Result<PulseTrain<T>> {
    params.validate()?;
    if b1.len() != b2.len() {
        return domain(format!("lane lengths differ: {} vs {}", b1.len(), b2.len()));
    }
    if b1.is_empty() {
        return domain("no chips to modulate");
    }
    let p1: Vec<T> = shape_lane(b1, params.oversample, params.shaping);
    let p2: Vec<T> = shape_lane(b2, params.oversample, params.shaping);
    let a = params.amplitude();
    Ok(PulseTrain {
        samples: p1.iter().zip(&p2).map(|(&i, &q)| Cplx::new(a * i, a * q)).collect(),
        sample_rate: params.sample_rate(),
        chip_duration: params.chip_duration(),
        symbol_interval: params.symbol_interval(),
        bit_interval: params.bit_interval(),
        bit_energy: params.bit_energy,
        carrier_frequency: params.carrier_frequency,
        shaping: params.shaping,
    })
}
