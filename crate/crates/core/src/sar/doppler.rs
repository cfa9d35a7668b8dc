//! Instantaneous Doppler of the RCM-line signal.
//!
//! A windowed pulse-pair (phase-gradient) estimator stands in for an
//! adaptive notch filter: lag-one products are summed over `window`
//! consecutive pairs, which weights each phase step by its magnitude and
//! suppresses noise, then the argument is unwrapped across windows.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{domain, Result};

use super::track::RcmLine;

#[derive(Debug, Clone, PartialEq)]
pub struct DopplerHistory {
    /// Mean slow time of the pairs in each window, s.
    pub times: Vec<f64>,
    /// Unwrapped frequency, Hz. Ambiguous by whole multiples of the PRF.
    pub freqs: Vec<f64>,
    /// Windows with no usable phase (zero signal or only erased pairs).
    pub gaps: Vec<bool>,
}

impl DopplerHistory {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Times and frequencies of the windows that are not gaps.
    pub fn valid(&self) -> (Vec<f64>, Vec<f64>) {
        self.times
            .iter()
            .zip(&self.freqs)
            .zip(&self.gaps)
            .filter(|(_, &g)| !g)
            .map(|((&t, &f), _)| (t, f))
            .unzip()
    }
}

/// Pulse-pair frequency over sliding windows of `window` pairs. Pairs that
/// straddle a skipped pulse are left out.
pub fn extract_doppler_history(line: &RcmLine, window: usize) -> Result<DopplerHistory> {
    let n = line.len();
    if n < 64 {
        return domain(format!("need at least 64 samples, got {n}"));
    }
    if window == 0 || window >= n {
        return domain(format!("window {window} must be in 1..{n}"));
    }
    let prf = line.prf;
    let zero = Complex64::new(0.0, 0.0);
    let mut products = Vec::with_capacity(n - 1);
    let mut mids = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        let adjacent = line.pulses[i + 1] == line.pulses[i] + 1;
        products.push(if adjacent { line.samples[i + 1] * line.samples[i].conj() } else { zero });
        mids.push(if adjacent { Some(0.5 * (line.times[i] + line.times[i + 1])) } else { None });
    }
    let mut times = Vec::with_capacity(n - window);
    let mut freqs = Vec::with_capacity(n - window);
    let mut gaps = Vec::with_capacity(n - window);
    let mut prev: Option<f64> = None;
    for j in 0..products.len() + 1 - window {
        let sum: Complex64 = products[j..j + window].iter().sum();
        let valid: Vec<f64> = mids[j..j + window].iter().flatten().copied().collect();
        let t = if valid.is_empty() {
            0.5 * (line.times[j] + line.times[j + window])
        } else {
            valid.iter().sum::<f64>() / valid.len() as f64
        };
        times.push(t);
        if sum.norm() == 0.0 || !sum.norm().is_finite() {
            gaps.push(true);
            freqs.push(prev.unwrap_or(0.0));
            continue;
        }
        let mut f = sum.arg() * prf / TAU;
        if let Some(p) = prev {
            f += ((p - f) / prf).round() * prf;
        }
        prev = Some(f);
        gaps.push(false);
        freqs.push(f);
    }
    Ok(DopplerHistory { times, freqs, gaps })
}

/// Least-squares line through `(t, f)`. Returns `(slope, centroid, residual)`
/// with `residual = f − (centroid + slope·t)`.
pub fn remove_linear_component(f: &[f64], t: &[f64]) -> Result<(f64, f64, Vec<f64>)> {
    if f.len() != t.len() {
        return domain("frequency and time grids differ in length");
    }
    if f.len() < 2 {
        return domain("need at least two samples");
    }
    let n = f.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let fm = f.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|x| (x - tm) * (x - tm)).sum();
    let stf: f64 = t.iter().zip(f).map(|(x, y)| (x - tm) * (y - fm)).sum();
    let slope = if stt > 0.0 { stf / stt } else { 0.0 };
    let centroid = fm - slope * tm;
    let residual = t.iter().zip(f).map(|(x, y)| y - (centroid + slope * x)).collect();
    Ok((slope, centroid, residual))
}
