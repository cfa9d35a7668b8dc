//! Impulse-response and whole-image quality metrics.
//!
//! Cuts are analysed over ±16 bins around the peak after ×8 FFT
//! interpolation. Widths come from linear interpolation of the −3 dB
//! crossings; the main lobe runs between the first minima on either side.
//! PSLR is the highest sample outside the main lobe, ISLR the energy outside
//! over the energy inside, both within the ±16-bin window. When both raw
//! neighbours of the peak are already below half power the width is one bin.
//! Near the image edge the cut is continued with zeros.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Cplx, Real};

pub const ISLR_HALF_WINDOW: usize = 16;
pub const UPSAMPLE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutMetrics {
    /// −3 dB width, bins.
    pub width: f64,
    pub pslr_db: f64,
    pub islr_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrfMetrics {
    pub range: CutMetrics,
    pub azimuth: CutMetrics,
}

/// Metrics of the response at `(row, col)`: the range cut runs along the
/// row, the azimuth cut down the column.
pub fn irf_metrics<T: Real>(image: &Array2<Cplx<T>>, at: (usize, usize)) -> Result<IrfMetrics> {
    let (rows, cols) = image.dim();
    if at.0 >= rows || at.1 >= cols {
        return Err(Error::Metric(format!("point {at:?} outside a {rows}×{cols} image")));
    }
    let conv = |c: &Cplx<T>| Complex64::new(c.re.as_f64(), c.im.as_f64());
    let range: Vec<Complex64> = image.row(at.0).iter().map(conv).collect();
    let azimuth: Vec<Complex64> = image.column(at.1).iter().map(conv).collect();
    Ok(IrfMetrics { range: cut_metrics(&range, at.1)?, azimuth: cut_metrics(&azimuth, at.0)? })
}

/// Metrics of a 1-D complex cut around index `at`.
pub fn cut_metrics(cut: &[Complex64], at: usize) -> Result<CutMetrics> {
    if at >= cut.len() {
        return Err(Error::Metric(format!("index {at} outside a cut of {}", cut.len())));
    }
    let peak_raw = cut[at].norm_sqr();
    if !(peak_raw > 0.0) || !peak_raw.is_finite() {
        return Err(Error::Metric("no energy at the analysed point".into()));
    }
    // interpolate over twice the analysis window to keep edge ringing out of it
    let pad = 2 * ISLR_HALF_WINDOW;
    let zero = Complex64::new(0.0, 0.0);
    let seg: Vec<Complex64> = (0..2 * pad + 1)
        .map(|i| (at + i).checked_sub(pad).and_then(|j| cut.get(j)).copied().unwrap_or(zero))
        .collect();
    let fine = upsample(&seg, UPSAMPLE);
    let intensity: Vec<f64> = fine.iter().map(|c| c.norm_sqr()).collect();
    let centre = pad * UPSAMPLE;
    let search_lo = centre.saturating_sub(UPSAMPLE);
    let search_hi = (centre + UPSAMPLE).min(intensity.len() - 1);
    let peak_idx = (search_lo..=search_hi).max_by(|&a, &b| intensity[a].total_cmp(&intensity[b])).unwrap_or(centre);
    let peak = intensity[peak_idx];
    let half = 0.5 * peak;

    let left_low = at == 0 || cut[at - 1].norm_sqr() < 0.5 * peak_raw;
    let right_low = at + 1 >= cut.len() || cut[at + 1].norm_sqr() < 0.5 * peak_raw;
    let width = if left_low && right_low {
        1.0
    } else {
        let mut l = peak_idx;
        while l > 0 && intensity[l] >= half {
            l -= 1;
        }
        let mut r = peak_idx;
        while r + 1 < intensity.len() && intensity[r] >= half {
            r += 1;
        }
        if intensity[l] >= half || intensity[r] >= half {
            return Err(Error::Metric("main lobe does not fall to −3 dB inside the cut".into()));
        }
        let xl = l as f64 + (half - intensity[l]) / (intensity[l + 1] - intensity[l]);
        let xr = r as f64 - (half - intensity[r]) / (intensity[r - 1] - intensity[r]);
        (xr - xl) / UPSAMPLE as f64
    };

    let w_lo = peak_idx.saturating_sub(ISLR_HALF_WINDOW * UPSAMPLE);
    let w_hi = (peak_idx + ISLR_HALF_WINDOW * UPSAMPLE).min(intensity.len() - 1);
    let mut nl = peak_idx;
    while nl > w_lo && intensity[nl - 1] < intensity[nl] {
        nl -= 1;
    }
    let mut nr = peak_idx;
    while nr < w_hi && intensity[nr + 1] < intensity[nr] {
        nr += 1;
    }
    if nl == w_lo && nr == w_hi {
        return Err(Error::Metric("no identifiable main lobe".into()));
    }
    let main: f64 = intensity[nl..=nr].iter().sum();
    let side: Vec<f64> = intensity[w_lo..nl].iter().chain(&intensity[nr + 1..=w_hi]).copied().collect();
    let side_peak = side.iter().copied().fold(0.0, f64::max);
    let side_sum: f64 = side.iter().sum();
    if side.is_empty() || !(side_peak > 0.0) {
        return Err(Error::Metric("no side lobes inside the analysis window".into()));
    }
    Ok(CutMetrics {
        width,
        pslr_db: 10.0 * (side_peak / peak).log10(),
        islr_db: 10.0 * (side_sum / main).log10(),
    })
}

/// Band-limited interpolation by zero-padding the spectrum.
fn upsample(x: &[Complex64], factor: usize) -> Vec<Complex64> {
    let n = x.len();
    let m = n * factor;
    let mut planner = FftPlanner::<f64>::new();
    let mut spec = x.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let mut big = vec![Complex64::new(0.0, 0.0); m];
    let pos = n.div_ceil(2);
    big[..pos].copy_from_slice(&spec[..pos]);
    big[m - (n - pos)..].copy_from_slice(&spec[pos..]);
    if n % 2 == 0 {
        // split the Nyquist bin between both ends
        let nyq = spec[n / 2];
        big[n / 2] = nyq * 0.5;
        big[m - n / 2] = nyq * 0.5;
    }
    planner.plan_fft_inverse(m).process(&mut big);
    big.iter().map(|c| c / n as f64).collect()
}

fn intensities<T: Real>(image: &Array2<Cplx<T>>) -> Vec<f64> {
    image.iter().map(|c| c.norm_sqr().as_f64()).collect()
}

/// Shannon entropy of the normalised intensity, nats. Zero for an empty image.
pub fn entropy<T: Real>(image: &Array2<Cplx<T>>) -> f64 {
    let i = intensities(image);
    let total: f64 = i.iter().sum();
    if !(total > 0.0) {
        return 0.0;
    }
    -i.iter().filter(|&&v| v > 0.0).map(|&v| v / total * (v / total).ln()).sum::<f64>()
}

/// Standard deviation over mean of the intensity.
pub fn contrast<T: Real>(image: &Array2<Cplx<T>>) -> f64 {
    let i = intensities(image);
    let n = i.len() as f64;
    let mean = i.iter().sum::<f64>() / n;
    if !(mean > 0.0) {
        return 0.0;
    }
    let var = i.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Row and column of the brightest pixel.
pub fn brightest<T: Real>(image: &Array2<Cplx<T>>) -> (usize, usize) {
    let cols = image.ncols().max(1);
    let (idx, _) = image
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, c)| {
            let v = c.norm_sqr().as_f64();
            if v > best.1 { (i, v) } else { best }
        });
    (idx / cols, idx % cols)
}
