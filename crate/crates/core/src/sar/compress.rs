//! Range compression with per-pulse reconstructed references.

use ndarray::Array2;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::echo::EchoRaster;
use crate::error::{domain, Result};
use crate::scalar::{Cplx, Real, SPEED_OF_LIGHT};
use crate::waveform::PulseTrain;

/// Matched-filter output: row `n`, column `k` is the correlation of pulse
/// `n` with its reference at a delay of `fast_origin + k / sample_rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeCompressed<T> {
    pub data: Array2<Cplx<T>>,
    pub prf: f64,
    pub sample_rate: f64,
    pub slow_origin: f64,
    pub fast_origin: f64,
    /// Pulses without a usable reference; their rows are zero.
    pub erased: Vec<bool>,
}

impl<T: Real> RangeCompressed<T> {
    pub fn n_pulses(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_bins(&self) -> usize {
        self.data.ncols()
    }

    pub fn slow_time(&self, n: usize) -> f64 {
        self.slow_origin + n as f64 / self.prf
    }

    /// Spacing of the bins in bistatic range sum, `c / f_s`. In
    /// quasi-monostatic terms this is `c / (2 f_s)` times a bistatic factor
    /// of 2, exact when both legs change by the same amount.
    pub fn bin_spacing(&self) -> f64 {
        SPEED_OF_LIGHT / self.sample_rate
    }

    /// Fractional bin at which an echo with bistatic range `range_sum` peaks.
    pub fn bin_of_range(&self, range_sum: f64) -> f64 {
        (range_sum / SPEED_OF_LIGHT - self.fast_origin) * self.sample_rate
    }

    pub fn range_of_bin(&self, bin: f64) -> f64 {
        (self.fast_origin + bin / self.sample_rate) * SPEED_OF_LIGHT
    }

    pub fn usable_pulses(&self) -> usize {
        self.erased.iter().filter(|&&e| !e).count()
    }
}

/// Correlates every raster row with its reference in the frequency domain.
/// `None` references mark erased pulses.
pub fn range_compress<T: Real>(
    raster: &EchoRaster<T>,
    references: &[Option<PulseTrain<T>>],
    parallel: bool,
) -> Result<RangeCompressed<T>> {
    let n_pulses = raster.n_pulses();
    if references.len() != n_pulses {
        return domain(format!("{} references for {n_pulses} pulses", references.len()));
    }
    let len = references.iter().flatten().map(|r| r.len()).next().unwrap_or(0);
    if references.iter().flatten().any(|r| r.len() != len) {
        return domain("references differ in length");
    }
    let n_fast = raster.n_fast();
    let m = (n_fast + len).next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let zero = Cplx::new(T::zero(), T::zero());
    let scale = T::one() / T::from_usize_lossy(m);
    let row = |n: usize| -> Vec<Cplx<T>> {
        let Some(r) = &references[n] else {
            return vec![zero; n_fast];
        };
        let mut y = vec![zero; m];
        y[..n_fast].iter_mut().zip(raster.data.row(n)).for_each(|(a, b)| *a = *b);
        let mut h = vec![zero; m];
        h[..len].copy_from_slice(&r.samples);
        fwd.process(&mut y);
        fwd.process(&mut h);
        y.iter_mut().zip(&h).for_each(|(a, b)| *a = *a * b.conj());
        inv.process(&mut y);
        y.truncate(n_fast);
        y.iter_mut().for_each(|v| *v = *v * scale);
        y
    };
    let rows: Vec<Vec<Cplx<T>>> = if parallel {
        (0..n_pulses).into_par_iter().map(row).collect()
    } else {
        (0..n_pulses).map(row).collect()
    };
    Ok(RangeCompressed {
        data: Array2::from_shape_vec((n_pulses, n_fast), rows.into_iter().flatten().collect()).expect("row lengths"),
        prf: raster.prf,
        sample_rate: raster.sample_rate,
        slow_origin: raster.slow_origin,
        fast_origin: raster.fast_origin,
        erased: references.iter().map(|r| r.is_none()).collect(),
    })
}

/// Peak magnitude over the median magnitude of the compressed data, dB.
pub fn peak_to_background_db<T: Real>(rc: &RangeCompressed<T>) -> f64 {
    let mut mags: Vec<f64> = rc.data.iter().map(|c| c.norm().as_f64()).filter(|v| *v > 0.0).collect();
    if mags.is_empty() {
        return f64::NEG_INFINITY;
    }
    mags.sort_by(|a, b| a.total_cmp(b));
    let peak = mags[mags.len() - 1];
    let median = mags[mags.len() / 2];
    20.0 * (peak / median).log10()
}
