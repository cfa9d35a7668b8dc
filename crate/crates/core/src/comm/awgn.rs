//! Additive white Gaussian noise at a given `E_B/N0`, and a batch BER runner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::echo::{complex_gaussian, pulse_rng};
use crate::error::Result;
use crate::scalar::{Cplx, Real};
use crate::waveform::Transmitter;

use super::receiver::JrcReceiver;

/// Per-component standard deviation of sampled complex baseband noise for
/// the given `E_B/N0` (dB): `σ² = N0 · f_s`, which makes the despread
/// decision statistic `sqrt(2 E_B/N0)` standard deviations from zero.
pub fn noise_sigma_eb_n0(bit_energy: f64, eb_n0_db: f64, sample_rate: f64) -> f64 {
    let n0 = bit_energy / 10f64.powf(eb_n0_db / 10.0);
    (n0 * sample_rate).sqrt()
}

pub fn add_awgn_eb_n0<T: Real, R: Rng>(samples: &mut [Cplx<T>], bit_energy: f64, eb_n0_db: f64, sample_rate: f64, rng: &mut R) {
    let sigma = noise_sigma_eb_n0(bit_energy, eb_n0_db, sample_rate);
    for s in samples {
        *s = *s + complex_gaussian::<T, _>(rng, sigma);
    }
}

/// Sends `n_pulses` random pulses through AWGN and counts payload bit
/// errors. `E_B` is the measured energy per channel bit of each pulse
/// (baseband energy is `2 E_B` per bit). Returns `(errors, bits)`. Pulse `p` draws payload and noise from
/// its own stream, so the count does not depend on `parallel`.
pub fn qpsk_ber_run<T: Real>(tx: &Transmitter<T>, eb_n0_db: f64, n_pulses: usize, seed: u64, parallel: bool) -> Result<(usize, usize)> {
    let rx = JrcReceiver { tx: tx.clone(), equalizer: None, parallel: false };
    let k = tx.payload_bits_per_pulse();
    let fs = tx.params.sample_rate().as_f64();
    let channel_bits = 2 * tx.layout.symbols();
    let one = |p: usize| -> Result<usize> {
        let mut rng = ChaCha8Rng::from_rng(&mut pulse_rng(seed, p));
        let bits: Vec<u8> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
        let pulse = tx.pulse(&bits)?;
        // shaped chips overlap, so the nominal E_B is only exact for rect chips
        let eb = pulse.energy().as_f64() / (2 * channel_bits) as f64;
        let mut samples = pulse.samples;
        add_awgn_eb_n0(&mut samples, eb, eb_n0_db, fs, &mut rng);
        let (soft, _) = rx.soft_bits(&samples)?;
        let decoded = tx.codec.decode_soft(&soft)?;
        Ok(decoded.bits.iter().zip(&bits).filter(|(a, b)| a != b).count())
    };
    let counts: Vec<Result<usize>> = if parallel {
        (0..n_pulses).into_par_iter().map(one).collect()
    } else {
        (0..n_pulses).map(one).collect()
    };
    let mut errors = 0;
    for c in counts {
        errors += c?;
    }
    Ok((errors, n_pulses * k))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::waveform::{kasami_small_set, FrameLayout, Shaping, Uncoded, WaveformParams};
    use jrc_testkit::qfunction;

    #[test]
    fn ber_at_six_db_matches_q_function() {
        let code = kasami_small_set(6, 0).unwrap();
        let params = WaveformParams {
            chip_rate: 100e6,
            oversample: 1,
            code_length: 63,
            bit_energy: 1.0,
            carrier_frequency: 10e9,
            shaping: Shaping::Rect,
        };
        let tx = Transmitter::new(params, code, Arc::new(Uncoded), FrameLayout::default()).unwrap();
        let (errors, bits) = qpsk_ber_run(&tx, 6.0, 2000, 5, true).unwrap();
        let p = qfunction((2.0 * 10f64.powf(0.6)).sqrt());
        let sigma = (p * (1.0 - p) / bits as f64).sqrt();
        let rate = errors as f64 / bits as f64;
        assert!((rate - p).abs() < 4.0 * sigma, "rate {rate} vs {p}");
        assert_eq!(qpsk_ber_run(&tx, 6.0, 50, 5, false).unwrap(), qpsk_ber_run(&tx, 6.0, 50, 5, true).unwrap());
    }
}
