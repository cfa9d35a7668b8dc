//! Pulse framing: one pilot symbol followed by coded data symbols, each
//! symbol carrying one bit per QPSK lane spread over a full code period.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::{Cplx, Real};

use super::codec::{split_even_odd, BitStream, Codec};
use super::kasami::SpreadingCode;
use super::pulse::{qpsk_baseband, PulseTrain, WaveformParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameLayout {
    /// Leading symbols carrying bits (0, 0), known to the receiver.
    pub pilot_symbols: usize,
    pub data_symbols: usize,
}

impl Default for FrameLayout {
    fn default() -> Self {
        Self { pilot_symbols: 1, data_symbols: 32 }
    }
}

impl FrameLayout {
    pub fn symbols(&self) -> usize {
        self.pilot_symbols + self.data_symbols
    }

    pub fn coded_bits(&self) -> usize {
        2 * self.data_symbols
    }
}

/// Payload bits carried by one pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseSpan {
    pub pulse: usize,
    pub start: usize,
    pub len: usize,
}

/// Frames payload bits into per-pulse baseband trains.
#[derive(Debug, Clone)]
pub struct Transmitter<T> {
    pub params: WaveformParams<T>,
    pub code: SpreadingCode,
    pub codec: Arc<dyn Codec>,
    pub layout: FrameLayout,
    payload_per_pulse: usize,
}

impl<T: Real> Transmitter<T> {
    pub fn new(params: WaveformParams<T>, code: SpreadingCode, codec: Arc<dyn Codec>, layout: FrameLayout) -> Result<Self> {
        params.validate()?;
        if params.code_length != code.len() {
            return domain(format!(
                "code length {} does not match waveform code length {}",
                code.len(),
                params.code_length
            ));
        }
        if layout.data_symbols == 0 {
            return domain("frame needs at least one data symbol");
        }
        let coded = layout.coded_bits();
        let k = (coded as f64 * codec.rate()).round() as usize;
        if k == 0 || codec.coded_len(k) != coded {
            return domain(format!("codec `{}` cannot fill {coded} coded bits per pulse", codec.name()));
        }
        Ok(Self { params, code, codec, layout, payload_per_pulse: k })
    }

    pub fn payload_bits_per_pulse(&self) -> usize {
        self.payload_per_pulse
    }

    pub fn samples_per_pulse(&self) -> usize {
        self.layout.symbols() * self.params.samples_per_symbol()
    }

    pub fn spans(&self, n_pulses: usize) -> Vec<PulseSpan> {
        (0..n_pulses)
            .map(|p| PulseSpan { pulse: p, start: p * self.payload_per_pulse, len: self.payload_per_pulse })
            .collect()
    }

    /// Coded bits of one pulse to its baseband train.
    pub fn pulse_from_coded(&self, coded: &[u8]) -> Result<PulseTrain<T>> {
        if coded.len() != self.layout.coded_bits() {
            return domain(format!("expected {} coded bits, got {}", self.layout.coded_bits(), coded.len()));
        }
        let split = split_even_odd(&BitStream::new(coded.to_vec(), 0)?)?;
        let n = self.code.len();
        let symbols = self.layout.symbols();
        let mut b1 = Vec::with_capacity(symbols * n);
        let mut b2 = Vec::with_capacity(symbols * n);
        let lane1 = std::iter::repeat_n(0u8, self.layout.pilot_symbols).chain(split.even.bits.iter().copied());
        let lane2 = std::iter::repeat_n(0u8, self.layout.pilot_symbols).chain(split.odd.bits.iter().copied());
        for (d1, d2) in lane1.zip(lane2) {
            b1.extend(self.code.chips().iter().map(|c| c ^ d1));
            b2.extend(self.code.chips().iter().map(|c| c ^ d2));
        }
        qpsk_baseband(&b1, &b2, &self.params)
    }

    pub fn encode_pulse(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.len() != self.payload_per_pulse {
            return domain(format!("expected {} payload bits, got {}", self.payload_per_pulse, payload.len()));
        }
        self.codec.encode(payload)
    }

    pub fn pulse(&self, payload: &[u8]) -> Result<PulseTrain<T>> {
        self.pulse_from_coded(&self.encode_pulse(payload)?)
    }

    /// One train per pulse; `payload` must fill the pulses exactly.
    pub fn pulses(&self, payload: &BitStream) -> Result<Vec<PulseTrain<T>>> {
        if payload.len() % self.payload_per_pulse != 0 {
            return domain(format!(
                "payload of {} bits does not fill whole pulses of {} bits",
                payload.len(),
                self.payload_per_pulse
            ));
        }
        payload.bits.chunks(self.payload_per_pulse).map(|c| self.pulse(c)).collect()
    }

    /// Known samples at the head of every pulse: the pilot symbols, minus
    /// the trailing span a shaping filter smears data chips into.
    pub fn training_reference(&self) -> Result<Vec<Cplx<T>>> {
        let span = self.layout.pilot_symbols * self.params.samples_per_symbol();
        let clean = span.saturating_sub(self.params.shaping.tail_samples(self.params.oversample));
        if clean == 0 {
            return domain("pilot is too short to leave clean training samples");
        }
        let chips: Vec<u8> = (0..self.layout.pilot_symbols).flat_map(|_| self.code.chips().iter().copied()).collect();
        let train = qpsk_baseband(&chips, &chips, &self.params)?;
        Ok(train.samples[..clean].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::{kasami_small_set, Repetition8, Shaping, Uncoded};

    fn tx(shaping: Shaping) -> Transmitter<f64> {
        let code = kasami_small_set(6, 0).unwrap();
        let params = WaveformParams {
            chip_rate: 100e6,
            oversample: 2,
            code_length: code.len(),
            bit_energy: 1.0,
            carrier_frequency: 10e9,
            shaping,
        };
        Transmitter::new(params, code, Arc::new(Repetition8), FrameLayout::default()).unwrap()
    }

    #[test]
    fn frame_bookkeeping() {
        let t = tx(Shaping::Rect);
        assert_eq!(t.payload_bits_per_pulse(), 8);
        assert_eq!(t.samples_per_pulse(), 33 * 63 * 2);
        let p = t.pulse(&[1, 0, 1, 1, 0, 0, 1, 0]).unwrap();
        assert_eq!(p.len(), 4158);
        assert!(t.pulse(&[1, 0]).is_err());
        let spans = t.spans(3);
        assert_eq!(spans[2], PulseSpan { pulse: 2, start: 16, len: 8 });
    }

    #[test]
    fn pilot_heads_every_pulse() {
        let t = tx(Shaping::Rect);
        let reference = t.training_reference().unwrap();
        assert_eq!(reference.len(), 126);
        for payload in [[0u8; 8], [1u8; 8]] {
            let p = t.pulse(&payload).unwrap();
            assert_eq!(&p.samples[..126], reference.as_slice());
        }
        let rc = tx(Shaping::RaisedCosine { rolloff: 0.25 });
        let reference = rc.training_reference().unwrap();
        assert_eq!(reference.len(), 126 - 16);
        let p = rc.pulse(&[1u8; 8]).unwrap();
        for (a, b) in p.samples.iter().zip(&reference) {
            assert!((a - b).norm() < 1e-9 * b.norm().max(1.0));
        }
    }

    #[test]
    fn codec_must_fill_frame() {
        let code = kasami_small_set(6, 0).unwrap();
        let params = tx(Shaping::Rect).params;
        let layout = FrameLayout { pilot_symbols: 1, data_symbols: 3 };
        assert!(Transmitter::new(params, code.clone(), Arc::new(Repetition8), layout).is_err());
        assert!(Transmitter::new(params, code.clone(), Arc::new(Uncoded), layout).is_ok());
        let wrong = kasami_small_set(4, 0).unwrap();
        assert!(Transmitter::new(params, wrong, Arc::new(Uncoded), layout).is_err());
    }
}
