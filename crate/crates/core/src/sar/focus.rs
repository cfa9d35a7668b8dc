//! Motion compensation and Range-Doppler azimuth focusing.
//!
//! Range migration is corrected by shifting each compressed pulse along the
//! stationary scene-centre history plus the excess range the estimate
//! implies. The compensated path then removes the excess carrier phase,
//! `exp(+j2π ΔR̂(t)/λ)`, and both paths share the azimuth matched filter
//! built from the stationary history, so the stationary Doppler rate the
//! linear model drops is put back here.

use std::f64::consts::TAU;

use ndarray::Array2;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::PlatformTrack;
use crate::scalar::{Cplx, Real};

use super::compress::RangeCompressed;
use super::estimate::MotionEstimate;
use super::metrics::{brightest, contrast, entropy, irf_metrics, IrfMetrics};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FocusGeometry {
    /// Tracks to the scene centre.
    pub tx: PlatformTrack<f64>,
    pub rx: PlatformTrack<f64>,
    pub wavelength: f64,
    /// Range bins kept in the image, `[start, end)`; `None` keeps all.
    pub range_window: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FocusMethod {
    Baseline,
    Compensated,
}

impl FocusMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Baseline => "baseline",
            Self::Compensated => "compensated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMetrics {
    pub row: usize,
    pub col: usize,
    pub irf: IrfMetrics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FocusReport<T> {
    /// Azimuth lag (rows) × range (columns of the window).
    pub image: Array2<Cplx<T>>,
    pub method: FocusMethod,
    /// First compressed-range bin in the image.
    pub range_start: usize,
    /// Range-sum spacing of the columns, m.
    pub range_spacing: f64,
    /// Slow-time spacing of the rows, s. The `2N − 1` rows hold every
    /// azimuth lag of the matched filter; row `N − 1` is zero lag.
    pub azimuth_spacing: f64,
    pub points: Vec<PointMetrics>,
    pub entropy: f64,
    pub contrast: f64,
}

impl<T: Real> FocusReport<T> {
    /// Adds IRF metrics for each location that has an identifiable main lobe.
    pub fn analyze(&mut self, locations: &[(usize, usize)]) {
        for &(row, col) in locations {
            if let Ok(irf) = irf_metrics(&self.image, (row, col)) {
                self.points.push(PointMetrics { row, col, irf });
            }
        }
    }

    pub fn peak(&self) -> (usize, usize) {
        brightest(&self.image)
    }
}

/// Focuses `rc`. `estimate = None` is the plain Range-Doppler baseline.
pub fn compensate_and_focus<T: Real>(
    rc: &RangeCompressed<T>,
    estimate: Option<&MotionEstimate>,
    geometry: &FocusGeometry,
    parallel: bool,
) -> Result<FocusReport<T>> {
    let (np, nb) = (rc.n_pulses(), rc.n_bins());
    if np == 0 || nb == 0 {
        return domain("empty range-compressed data");
    }
    let (start, end) = geometry.range_window.unwrap_or((0, nb));
    if start >= end || end > nb {
        return domain(format!("range window {start}..{end} outside 0..{nb}"));
    }
    let lambda = geometry.wavelength;
    let reference = MotionEstimate::stationary(&geometry.tx, &geometry.rx, lambda);
    let times: Vec<f64> = (0..np).map(|n| rc.slow_time(n)).collect();
    let stationary: Vec<f64> = times.iter().map(|&t| reference.range_offset(t, lambda)).collect();
    let excess: Vec<f64> = match estimate {
        Some(e) => times.iter().map(|&t| e.excess_range(&reference, t, lambda)).collect(),
        None => vec![0.0; np],
    };

    // range migration correction and phase compensation, pulse by pulse
    let m = nb.next_power_of_two();
    let mut planner = FftPlanner::<T>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let zero = Cplx::new(T::zero(), T::zero());
    let bins_per_metre = 1.0 / rc.bin_spacing();
    let width = end - start;
    let shift_row = |n: usize| -> Vec<Cplx<T>> {
        if rc.erased[n] {
            return vec![zero; width];
        }
        let shift = (stationary[n] + excess[n]) * bins_per_metre;
        let mut x = vec![zero; m];
        x[..nb].iter_mut().zip(rc.data.row(n)).for_each(|(a, b)| *a = *b);
        fwd.process(&mut x);
        for (k, v) in x.iter_mut().enumerate() {
            let f = if k <= m / 2 { k as f64 } else { k as f64 - m as f64 };
            let ph = TAU * (f * shift / m as f64).rem_euclid(1.0);
            *v = *v * Cplx::new(T::lit(ph.cos()), T::lit(ph.sin()));
        }
        inv.process(&mut x);
        let comp = if excess[n] != 0.0 {
            let ph = TAU * (excess[n] / lambda).rem_euclid(1.0);
            Cplx::new(T::lit(ph.cos()), T::lit(ph.sin()))
        } else {
            Cplx::new(T::one(), T::zero())
        };
        let scale = T::one() / T::from_usize_lossy(m);
        x[start..end].iter().map(|v| *v * comp * scale).collect()
    };
    let rows: Vec<Vec<Cplx<T>>> = if parallel {
        (0..np).into_par_iter().map(shift_row).collect()
    } else {
        (0..np).map(shift_row).collect()
    };

    // azimuth matched filter per range column, all 2N − 1 lags
    let rows_out = 2 * np - 1;
    let l = (2 * np).next_power_of_two();
    let afwd = planner.plan_fft_forward(l);
    let ainv = planner.plan_fft_inverse(l);
    let mut h = vec![zero; l];
    for (v, s) in h.iter_mut().zip(&stationary) {
        let ph = -TAU * (s / lambda).rem_euclid(1.0);
        *v = Cplx::new(T::lit(ph.cos()), T::lit(ph.sin()));
    }
    afwd.process(&mut h);
    let ascale = T::one() / T::from_usize_lossy(l);
    let column = |c: usize| -> Vec<Cplx<T>> {
        let mut x = vec![zero; l];
        x[..np].iter_mut().zip(&rows).for_each(|(a, r)| *a = r[c]);
        afwd.process(&mut x);
        x.iter_mut().zip(&h).for_each(|(a, b)| *a = *a * b.conj());
        ainv.process(&mut x);
        (0..rows_out).map(|i| x[(i + l + 1 - np) % l] * ascale).collect()
    };
    let cols: Vec<Vec<Cplx<T>>> = if parallel {
        (0..width).into_par_iter().map(column).collect()
    } else {
        (0..width).map(column).collect()
    };
    let image = Array2::from_shape_fn((rows_out, width), |(i, c)| cols[c][i]);

    let mut report = FocusReport {
        entropy: entropy(&image),
        contrast: contrast(&image),
        image,
        method: if estimate.is_some() { FocusMethod::Compensated } else { FocusMethod::Baseline },
        range_start: start,
        range_spacing: rc.bin_spacing(),
        azimuth_spacing: 1.0 / rc.prf,
        points: Vec::new(),
    };
    let peak = report.peak();
    report.analyze(&[peak]);
    Ok(report)
}
