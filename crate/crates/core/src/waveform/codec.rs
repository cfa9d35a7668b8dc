//! Bit streams, serial-to-parallel split, DSSS spreading and channel codecs.

use crate::error::{domain, Result};

use super::kasami::SpreadingCode;

/// Ordered binary data tagged with the id of the payload it came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitStream {
    pub bits: Vec<u8>,
    pub source: u32,
}

impl BitStream {
    pub fn new(bits: Vec<u8>, source: u32) -> Result<Self> {
        if bits.is_empty() {
            return domain("bit stream is empty");
        }
        if let Some(i) = bits.iter().position(|&b| b > 1) {
            return domain(format!("bit {i} is {} (must be 0 or 1)", bits[i]));
        }
        Ok(Self { bits, source })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// The two QPSK lanes of a stream. `padded` is set when a zero bit was
/// appended to make the stream length even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitStream {
    pub even: BitStream,
    pub odd: BitStream,
    pub padded: bool,
}

/// Even-indexed bits to lane 1, odd-indexed bits to lane 2.
pub fn split_even_odd(stream: &BitStream) -> Result<SplitStream> {
    if stream.is_empty() {
        return domain("cannot split an empty bit stream");
    }
    let padded = stream.len() % 2 == 1;
    let mut even = Vec::with_capacity(stream.len() / 2 + 1);
    let mut odd = Vec::with_capacity(stream.len() / 2 + 1);
    for pair in stream.bits.chunks(2) {
        even.push(pair[0]);
        odd.push(pair.get(1).copied().unwrap_or(0));
    }
    Ok(SplitStream {
        even: BitStream { bits: even, source: stream.source },
        odd: BitStream { bits: odd, source: stream.source },
        padded,
    })
}

/// Inverse of [`split_even_odd`], dropping the pad bit if one was added.
pub fn interleave(split: &SplitStream) -> BitStream {
    let mut bits = Vec::with_capacity(2 * split.even.len());
    for (a, b) in split.even.bits.iter().zip(&split.odd.bits) {
        bits.push(*a);
        bits.push(*b);
    }
    if split.padded {
        bits.pop();
    }
    BitStream { bits, source: split.even.source }
}

/// XORs every data bit against one full code period, each chip repeated
/// `oversample` times.
pub fn spread(data: &[u8], code: &SpreadingCode, oversample: usize) -> Result<Vec<u8>> {
    if oversample == 0 {
        return domain("oversample must be at least 1");
    }
    let mut out = Vec::with_capacity(data.len() * code.len() * oversample);
    for &d in data {
        for &c in code.chips() {
            out.extend(std::iter::repeat_n(d ^ c, oversample));
        }
    }
    Ok(out)
}

/// Hard despreading by chip-agreement majority; ties resolve to 0.
pub fn despread(chips: &[u8], code: &SpreadingCode, oversample: usize) -> Result<Vec<u8>> {
    let span = code.len() * oversample;
    if oversample == 0 || chips.len() % span != 0 {
        return domain(format!("chip count {} is not a multiple of the symbol span {span}", chips.len()));
    }
    Ok(chips
        .chunks(span)
        .map(|sym| {
            let flipped = sym
                .iter()
                .enumerate()
                .filter(|(i, &c)| c != code.chips()[i / oversample])
                .count();
            u8::from(2 * flipped > span)
        })
        .collect())
}

/// Hard or soft decisions on the payload with per-bit erasure flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub bits: Vec<u8>,
    pub erasures: Vec<bool>,
}

impl Decoded {
    pub fn erasure_count(&self) -> usize {
        self.erasures.iter().filter(|&&e| e).count()
    }
}

/// Channel code contract. Soft inputs follow the bipolar convention:
/// positive means bit 0, negative means bit 1, zero carries no information.
pub trait Codec: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &str;
    /// Coded bits per payload bit, inverted (`payload / coded`).
    fn rate(&self) -> f64;
    fn coded_len(&self, payload_len: usize) -> usize;
    fn encode(&self, payload: &[u8]) -> Result<Vec<u8>>;
    fn decode_soft(&self, soft: &[f64]) -> Result<Decoded>;

    fn decode_hard(&self, coded: &[u8]) -> Result<Decoded> {
        let soft: Vec<f64> = coded.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect();
        self.decode_soft(&soft)
    }
}

/// Rate-1/8 repetition code with a block interleaver: copy `c` of payload
/// bit `i` sits at position `c·N + i`, so a burst of up to `N` corrupted
/// coded bits touches each payload bit once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Repetition8;

const REPEAT: usize = 8;

impl Codec for Repetition8 {
    fn name(&self) -> &str {
        "repetition8"
    }

    fn rate(&self) -> f64 {
        1.0 / REPEAT as f64
    }

    fn coded_len(&self, payload_len: usize) -> usize {
        payload_len * REPEAT
    }

    fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.is_empty() {
            return domain("payload is empty");
        }
        Ok((0..REPEAT).flat_map(|_| payload.iter().copied()).collect())
    }

    fn decode_soft(&self, soft: &[f64]) -> Result<Decoded> {
        if soft.is_empty() || soft.len() % REPEAT != 0 {
            return domain(format!("coded length {} is not a positive multiple of {REPEAT}", soft.len()));
        }
        let n = soft.len() / REPEAT;
        let mut bits = Vec::with_capacity(n);
        let mut erasures = Vec::with_capacity(n);
        for i in 0..n {
            let sum: f64 = (0..REPEAT).map(|c| soft[c * n + i]).sum();
            bits.push(u8::from(sum < 0.0));
            erasures.push(sum == 0.0 || !sum.is_finite());
        }
        Ok(Decoded { bits, erasures })
    }
}

/// Identity code, for raw channel BER measurement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Uncoded;

impl Codec for Uncoded {
    fn name(&self) -> &str {
        "uncoded"
    }

    fn rate(&self) -> f64 {
        1.0
    }

    fn coded_len(&self, payload_len: usize) -> usize {
        payload_len
    }

    fn encode(&self, payload: &[u8]) -> Result<Vec<u8>> {
        if payload.is_empty() {
            return domain("payload is empty");
        }
        Ok(payload.to_vec())
    }

    fn decode_soft(&self, soft: &[f64]) -> Result<Decoded> {
        if soft.is_empty() {
            return domain("nothing to decode");
        }
        Ok(Decoded {
            bits: soft.iter().map(|&s| u8::from(s < 0.0)).collect(),
            erasures: soft.iter().map(|&s| s == 0.0 || !s.is_finite()).collect(),
        })
    }
}

/// Looks a codec up by the name used in scenario files.
pub fn codec_by_name(name: &str) -> Option<Box<dyn Codec>> {
    match name {
        "repetition8" => Some(Box::new(Repetition8)),
        "uncoded" => Some(Box::new(Uncoded)),
        _ => None,
    }
}
