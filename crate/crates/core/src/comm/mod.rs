//! Communication half of the joint receiver.

mod awgn;
mod equalizer;
mod receiver;

pub use awgn::{add_awgn_eb_n0, noise_sigma_eb_n0, qpsk_ber_run};
pub use equalizer::{
    estimate_autocovariance, levinson_solve, train_equalizer, wiener_equalize, Autocovariance, ChannelEstimate,
};
pub use receiver::{
    decode_message, despread_demap, reconstruct_reference, CommReport, DecodedMessage, EqualizerConfig, JrcReceiver,
};
