//! Despreading, demapping, decoding and reference reconstruction.

use ndarray::ArrayView2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{Cplx, Real};
use crate::waveform::{shape_lane, BitStream, Codec, PulseSpan, PulseTrain, Shaping, SpreadingCode, Transmitter};

use super::equalizer::train_equalizer;

/// Correlates each symbol interval against the (shaped) code and returns
/// the `(I, Q)` soft values, one pair per symbol.
pub fn despread_demap<T: Real>(
    samples: &[Cplx<T>],
    code: &SpreadingCode,
    oversample: usize,
    shaping: Shaping,
) -> Result<Vec<(f64, f64)>> {
    let span = code.len() * oversample;
    if oversample == 0 || samples.is_empty() || samples.len() % span != 0 {
        return domain(format!("{} samples are not a whole number of {span}-sample symbols", samples.len()));
    }
    let reference: Vec<f64> = shape_lane(code.chips(), oversample, shaping);
    Ok(samples
        .chunks(span)
        .map(|sym| {
            sym.iter().zip(&reference).fold((0.0, 0.0), |(i, q), (z, r)| (i + z.re.as_f64() * r, q + z.im.as_f64() * r))
        })
        .collect())
}

/// Payload recovered from a run of pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedMessage {
    pub payload: BitStream,
    pub spans: Vec<PulseSpan>,
    /// Per payload bit.
    pub erasures: Vec<bool>,
    /// Per pulse: any of its payload bits erased.
    pub pulse_erased: Vec<bool>,
    pub bit_errors: Option<usize>,
    pub ber: Option<f64>,
}

impl DecodedMessage {
    pub fn usable_pulses(&self) -> usize {
        self.pulse_erased.iter().filter(|&&e| !e).count()
    }

    pub fn erasure_count(&self) -> usize {
        self.erasures.iter().filter(|&&e| e).count()
    }
}

/// Decodes concatenated per-pulse soft coded bits; `truth` enables BER.
pub fn decode_message(
    soft: &[f64],
    codec: &dyn Codec,
    coded_per_pulse: usize,
    payload_per_pulse: usize,
    truth: Option<&BitStream>,
) -> Result<DecodedMessage> {
    if coded_per_pulse == 0 || soft.is_empty() || soft.len() % coded_per_pulse != 0 {
        return domain(format!("{} soft values do not fill {coded_per_pulse}-bit pulses", soft.len()));
    }
    let mut bits = Vec::with_capacity(soft.len() / coded_per_pulse * payload_per_pulse);
    let mut erasures = Vec::with_capacity(bits.capacity());
    let mut pulse_erased = Vec::new();
    let mut spans = Vec::new();
    for (p, chunk) in soft.chunks(coded_per_pulse).enumerate() {
        let d = codec.decode_soft(chunk)?;
        if d.bits.len() != payload_per_pulse {
            return domain(format!("codec returned {} bits per pulse, expected {payload_per_pulse}", d.bits.len()));
        }
        spans.push(PulseSpan { pulse: p, start: bits.len(), len: payload_per_pulse });
        pulse_erased.push(d.erasure_count() > 0);
        bits.extend(d.bits);
        erasures.extend(d.erasures);
    }
    let (bit_errors, ber) = match truth {
        Some(t) => {
            if t.len() != bits.len() {
                return domain(format!("truth has {} bits, decoded {}", t.len(), bits.len()));
            }
            let e = t.bits.iter().zip(&bits).filter(|(a, b)| a != b).count();
            (Some(e), Some(e as f64 / bits.len() as f64))
        }
        None => (None, None),
    };
    Ok(DecodedMessage {
        payload: BitStream { bits, source: truth.map_or(0, |t| t.source) },
        spans,
        erasures,
        pulse_erased,
        bit_errors,
        ber,
    })
}

/// Re-synthesises each pulse from its decoded payload; erased pulses are `None`.
pub fn reconstruct_reference<T: Real>(message: &DecodedMessage, tx: &Transmitter<T>) -> Result<Vec<Option<PulseTrain<T>>>> {
    message
        .spans
        .iter()
        .zip(&message.pulse_erased)
        .map(|(span, &erased)| {
            if erased {
                Ok(None)
            } else {
                tx.pulse(&message.payload.bits[span.start..span.start + span.len]).map(Some)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EqualizerConfig {
    /// Odd tap count.
    pub taps: usize,
    /// Diagonal loading as a fraction of `r(0)`.
    pub loading: f64,
}

impl Default for EqualizerConfig {
    fn default() -> Self {
        Self { taps: 31, loading: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommReport {
    pub message: DecodedMessage,
    /// Largest autocovariance condition number over the pulses (NaN without equalizer).
    pub max_condition: f64,
}

/// Communication half of the joint receiver.
#[derive(Debug, Clone)]
pub struct JrcReceiver<T> {
    pub tx: Transmitter<T>,
    /// `None` skips equalization (ideal AWGN channel).
    pub equalizer: Option<EqualizerConfig>,
    pub parallel: bool,
}

impl<T: Real> JrcReceiver<T> {
    /// Soft coded bits of one time-aligned pulse, and the equalizer condition number.
    pub fn soft_bits(&self, segment: &[Cplx<T>]) -> Result<(Vec<f64>, f64)> {
        let len = self.tx.samples_per_pulse();
        if segment.len() != len {
            return domain(format!("pulse segment has {} samples, expected {len}", segment.len()));
        }
        let (z, condition) = match &self.equalizer {
            Some(cfg) => {
                let training = self.tx.training_reference()?;
                let est = train_equalizer(segment, &training, cfg.taps, cfg.loading)?;
                (est.apply(segment), est.condition_number())
            }
            None => (segment.to_vec(), f64::NAN),
        };
        let p = &self.tx.params;
        let symbols = despread_demap(&z, &self.tx.code, p.oversample, p.shaping)?;
        let soft = symbols[self.tx.layout.pilot_symbols..].iter().flat_map(|&(i, q)| [i, q]).collect();
        Ok((soft, condition))
    }

    /// Decodes a list of aligned pulse segments.
    pub fn receive(&self, segments: &[Vec<Cplx<T>>], truth: Option<&BitStream>) -> Result<CommReport> {
        let per = |s: &Vec<Cplx<T>>| self.soft_bits(s);
        let results: Vec<Result<(Vec<f64>, f64)>> = if self.parallel {
            segments.par_iter().map(per).collect()
        } else {
            segments.iter().map(per).collect()
        };
        let mut soft = Vec::with_capacity(segments.len() * self.tx.layout.coded_bits());
        let mut max_condition = f64::NAN;
        for r in results {
            let (s, c) = r?;
            soft.extend(s);
            max_condition = if max_condition.is_nan() { c } else { max_condition.max(c) };
        }
        let message = decode_message(
            &soft,
            self.tx.codec.as_ref(),
            self.tx.layout.coded_bits(),
            self.tx.payload_bits_per_pulse(),
            truth,
        )?;
        Ok(CommReport { message, max_condition })
    }

    /// Cuts each pulse out of a raster at the given start columns (samples
    /// before or after the raster read as zero) and decodes them.
    pub fn receive_raster(&self, data: ArrayView2<Cplx<T>>, starts: &[isize], truth: Option<&BitStream>) -> Result<CommReport> {
        if starts.len() != data.nrows() {
            return domain(format!("{} alignments for {} pulses", starts.len(), data.nrows()));
        }
        let len = self.tx.samples_per_pulse() as isize;
        let cols = data.ncols() as isize;
        let segments: Vec<Vec<Cplx<T>>> = starts
            .iter()
            .enumerate()
            .map(|(n, &s)| {
                (s..s + len)
                    .map(|j| if (0..cols).contains(&j) { data[[n, j as usize]] } else { Cplx::new(T::zero(), T::zero()) })
                    .collect()
            })
            .collect();
        self.receive(&segments, truth)
    }
}
