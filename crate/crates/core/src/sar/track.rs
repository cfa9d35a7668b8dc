//! Coarse range-migration tracks and the RCM-line signal sampled along them.

use crate::error::{domain, Error, Result};
use crate::geometry::{bistatic_range, PlatformTrack, TargetMotion};
use crate::scalar::{Cplx, Real};

use super::compress::RangeCompressed;

/// Fractional range bin of the target on every pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct RcmTrack {
    pub bins: Vec<f64>,
}

impl RcmTrack {
    /// Track predicted by the range model for a known motion.
    pub fn from_geometry<T: Real>(
        rc: &RangeCompressed<T>,
        tx: &PlatformTrack<f64>,
        rx: &PlatformTrack<f64>,
        motion: &TargetMotion<f64>,
    ) -> Self {
        let bins = (0..rc.n_pulses())
            .map(|n| rc.bin_of_range(bistatic_range(tx, rx, motion, rc.slow_time(n))))
            .collect();
        Self { bins }
    }

    /// Constant track at `bin`.
    pub fn flat(n_pulses: usize, bin: f64) -> Self {
        Self { bins: vec![bin; n_pulses] }
    }

    /// Follows the brightest bin from pulse to pulse, starting at the
    /// strongest bin of the magnitude summed over the central sixteenth of
    /// the usable pulses and searching `±search`
    /// bins around the previous pulse. Erased pulses inherit their
    /// neighbour's bin. A running median over `smooth` pulses removes
    /// isolated jumps.
    pub fn peak_tracking<T: Real>(rc: &RangeCompressed<T>, search: usize, smooth: usize) -> Result<Self> {
        let (np, nb) = (rc.n_pulses(), rc.n_bins());
        if np == 0 || nb == 0 {
            return domain("empty range-compressed data");
        }
        let mag = |n: usize, k: usize| rc.data[[n, k]].norm().as_f64();
        let usable: Vec<usize> = (0..np).filter(|&n| !rc.erased[n]).collect();
        if usable.is_empty() {
            return Err(Error::Estimation("every pulse is erased".into()));
        }
        let mid = usable[usable.len() / 2];
        let centre = &usable[(usable.len() / 2).saturating_sub(usable.len() / 32)..=usable.len() / 2 + usable.len() / 32];
        let profile: Vec<f64> = (0..nb).map(|k| centre.iter().map(|&n| mag(n, k)).sum()).collect();
        let start_bin = argmax(&profile, 0, nb);
        let pick = |n: usize, around: usize| {
            let lo = around.saturating_sub(search);
            let hi = (around + search + 1).min(nb);
            let row: Vec<f64> = (lo..hi).map(|k| mag(n, k)).collect();
            lo + argmax(&row, 0, row.len())
        };
        let mut raw = vec![0usize; np];
        raw[mid] = pick(mid, start_bin);
        let mut prev = raw[mid];
        for n in (mid + 1)..np {
            if !rc.erased[n] {
                prev = pick(n, prev);
            }
            raw[n] = prev;
        }
        prev = raw[mid];
        for n in (0..mid).rev() {
            if !rc.erased[n] {
                prev = pick(n, prev);
            }
            raw[n] = prev;
        }
        let half = smooth / 2;
        let bins = (0..np)
            .map(|n| {
                let lo = n.saturating_sub(half);
                let hi = (n + half + 1).min(np);
                let mut w: Vec<usize> = raw[lo..hi].to_vec();
                w.sort_unstable();
                w[w.len() / 2] as f64
            })
            .collect();
        Ok(Self { bins })
    }

    pub fn rounded(&self) -> Vec<i64> {
        self.bins.iter().map(|b| b.round() as i64).collect()
    }
}

fn argmax(v: &[f64], lo: usize, hi: usize) -> usize {
    let mut best = lo;
    for k in lo..hi {
        if v[k] > v[best] {
            best = k;
        }
    }
    best - lo
}

/// Compressed samples taken along a track, erased pulses skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct RcmLine {
    pub samples: Vec<Cplx<f64>>,
    /// Slow time of each sample, s.
    pub times: Vec<f64>,
    /// Pulse index of each sample.
    pub pulses: Vec<usize>,
    pub prf: f64,
}

impl RcmLine {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Samples `rc` at the nearest bin of `track` on every usable pulse.
pub fn extract_rcm_line<T: Real>(rc: &RangeCompressed<T>, track: &RcmTrack) -> Result<RcmLine> {
    if track.bins.len() != rc.n_pulses() {
        return domain(format!("track has {} pulses, data has {}", track.bins.len(), rc.n_pulses()));
    }
    let mut line = RcmLine { samples: Vec::new(), times: Vec::new(), pulses: Vec::new(), prf: rc.prf };
    for (n, b) in track.rounded().into_iter().enumerate() {
        if b < 0 || b >= rc.n_bins() as i64 {
            return Err(Error::TrackOutside { pulse: n, bin: track.bins[n] });
        }
        if rc.erased[n] {
            continue;
        }
        let v = rc.data[[n, b as usize]];
        line.samples.push(Cplx::new(v.re.as_f64(), v.im.as_f64()));
        line.times.push(rc.slow_time(n));
        line.pulses.push(n);
    }
    Ok(line)
}
