//! Transmit chain: payload → codec → serial-to-parallel → Kasami DSSS →
//! shaping → QPSK baseband.

mod codec;
mod frame;
mod kasami;
mod pulse;

pub use codec::{
    codec_by_name, despread, interleave, split_even_odd, spread, BitStream, Codec, Decoded, Repetition8,
    SplitStream, Uncoded,
};
pub use frame::{FrameLayout, PulseSpan, Transmitter};
pub use kasami::{kasami_family_size, kasami_small_set, m_sequence, SpreadingCode};
pub use pulse::{
    qpsk_baseband, raised_cosine, raised_cosine_taps, shape_lane, PulseTrain, Shaping, WaveformParams,
    RC_HALF_SPAN_CHIPS,
};
