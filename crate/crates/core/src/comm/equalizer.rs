//! Least-squares Wiener equalizer from a Toeplitz autocovariance estimate.
//!
//! With taps `w_k`, `k = −K..=K`, the output is `z(n) = Σ w_k y(n+k)`.
//! The normal equations are `Σ_k r(k−l) w_k = p_l` with
//! `r(m) = ⟨y(n+m) y*(n)⟩` and `p_l = ⟨d(n) y*(n+l)⟩`, both estimated over
//! the training span with samples outside it taken as zero. Under that
//! windowing an identity channel yields a unit centre tap exactly.

use nalgebra::{Complex as NaComplex, DMatrix};

use crate::error::{domain, Error, Result};
use crate::scalar::{Cplx, Real};

type C64 = Cplx<f64>;

fn to_c64<T: Real>(c: &Cplx<T>) -> C64 {
    C64::new(c.re.as_f64(), c.im.as_f64())
}

/// Biased lag estimates `r(0..order)` arranged as a Hermitian Toeplitz matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocovariance {
    /// `r(m)` for `m = 0..order`, diagonal loading already added to `r(0)`.
    pub lags: Vec<C64>,
    pub loading: f64,
}

impl Autocovariance {
    pub fn order(&self) -> usize {
        self.lags.len()
    }

    /// Entry `(l, k)` is `r(k − l)`, with `r(−m) = conj r(m)`.
    pub fn entry(&self, l: usize, k: usize) -> C64 {
        if k >= l {
            self.lags[k - l]
        } else {
            self.lags[l - k].conj()
        }
    }

    pub fn matrix(&self) -> DMatrix<NaComplex<f64>> {
        let n = self.order();
        DMatrix::from_fn(n, n, |l, k| {
            let e = self.entry(l, k);
            NaComplex::new(e.re, e.im)
        })
    }

    /// Ratio of extreme eigenvalue magnitudes; infinite when singular.
    pub fn condition_number(&self) -> f64 {
        let eig = nalgebra::SymmetricEigen::new(self.matrix());
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for &v in eig.eigenvalues.iter() {
            lo = lo.min(v.abs());
            hi = hi.max(v.abs());
        }
        if lo == 0.0 || !lo.is_finite() {
            f64::INFINITY
        } else {
            hi / lo
        }
    }
}

/// Toeplitz autocovariance of `received` with `order` lags and diagonal
/// loading `loading · r(0)`.
pub fn estimate_autocovariance<T: Real>(received: &[Cplx<T>], order: usize, loading: f64) -> Result<Autocovariance> {
    if order == 0 {
        return domain("autocovariance order must be positive");
    }
    if received.len() < 4 * order {
        return domain(format!("need at least {} samples for order {order}, got {}", 4 * order, received.len()));
    }
    if !(loading >= 0.0) {
        return domain("loading must be non-negative");
    }
    let y: Vec<C64> = received.iter().map(to_c64).collect();
    let n = y.len() as f64;
    let mut lags: Vec<C64> = (0..order)
        .map(|m| y[m..].iter().zip(&y).map(|(a, b)| a * b.conj()).sum::<C64>() / n)
        .collect();
    lags[0] = C64::new(lags[0].re * (1.0 + loading), 0.0);
    Ok(Autocovariance { lags, loading })
}

/// Solves `A x = b` for Hermitian Toeplitz `A` by Levinson recursion.
pub fn levinson_solve(acov: &Autocovariance, b: &[C64]) -> Result<Vec<C64>> {
    let n = acov.order();
    if b.len() != n {
        return domain("right-hand side length differs from the matrix order");
    }
    // t(i − j) is entry (i, j)
    let t = |d: isize| acov.entry(d.max(0) as usize, (-d).max(0) as usize);
    let singular = |what: &str| Error::Numerical {
        message: format!("Toeplitz system is singular ({what})"),
        condition: acov.condition_number(),
    };
    let t0 = t(0);
    if t0.norm() <= f64::MIN_POSITIVE {
        return Err(singular("zero diagonal"));
    }
    let mut f = vec![C64::new(1.0, 0.0) / t0];
    let mut bw = f.clone();
    let mut x = vec![b[0] / t0];
    for m in 1..n {
        let ef: C64 = (0..m).map(|i| t((m - i) as isize) * f[i]).sum();
        let eb: C64 = (0..m).map(|i| t(-((i + 1) as isize)) * bw[i]).sum();
        let denom = C64::new(1.0, 0.0) - ef * eb;
        if denom.norm() < 1e-13 {
            return Err(singular("vanishing reflection denominator"));
        }
        let mut nf = vec![C64::new(0.0, 0.0); m + 1];
        let mut nb = vec![C64::new(0.0, 0.0); m + 1];
        for i in 0..=m {
            let fi = if i < m { f[i] } else { C64::new(0.0, 0.0) };
            let bi = if i > 0 { bw[i - 1] } else { C64::new(0.0, 0.0) };
            nf[i] = (fi - ef * bi) / denom;
            nb[i] = (bi - eb * fi) / denom;
        }
        f = nf;
        bw = nb;
        let ex: C64 = (0..m).map(|i| t((m - i) as isize) * x[i]).sum();
        x.push(C64::new(0.0, 0.0));
        let gain = b[m] - ex;
        for (xi, bi) in x.iter_mut().zip(&bw) {
            *xi += gain * bi;
        }
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(singular("non-finite solution"));
    }
    Ok(x)
}

/// Trained equalizer and the statistics it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    /// Channel impulse response estimate `ĥ(m)`, `m = −K..=K`.
    pub impulse_response: Vec<C64>,
    pub autocovariance: Autocovariance,
    /// Equalizer taps `w_k`, `k = −K..=K`; odd length, centre tap at `K`.
    pub taps: Vec<C64>,
    /// Training-span minimum mean-square error of the normal equations.
    pub mmse: f64,
}

impl ChannelEstimate {
    pub fn half_length(&self) -> usize {
        self.taps.len() / 2
    }

    pub fn condition_number(&self) -> f64 {
        self.autocovariance.condition_number()
    }

    /// `z(n) = Σ_k w_k y(n+k)`, zero outside `received`.
    pub fn apply<T: Real>(&self, received: &[Cplx<T>]) -> Vec<Cplx<T>> {
        let k = self.half_length() as isize;
        let n = received.len() as isize;
        let y: Vec<C64> = received.iter().map(to_c64).collect();
        (0..n)
            .map(|i| {
                let mut acc = C64::new(0.0, 0.0);
                for (j, w) in self.taps.iter().enumerate() {
                    let idx = i + j as isize - k;
                    if (0..n).contains(&idx) {
                        acc += w * y[idx as usize];
                    }
                }
                Cplx::new(T::lit(acc.re), T::lit(acc.im))
            })
            .collect()
    }
}

/// Trains a `taps`-long equalizer on the head of `received`, where the
/// transmitted samples `training` are known.
pub fn train_equalizer<T: Real>(received: &[Cplx<T>], training: &[Cplx<T>], taps: usize, loading: f64) -> Result<ChannelEstimate> {
    if taps % 2 == 0 {
        return domain(format!("equalizer length must be odd, got {taps}"));
    }
    if training.is_empty() || training.len() > received.len() {
        return domain("training span must lie inside the received sequence");
    }
    let span = &received[..training.len()];
    let acov = estimate_autocovariance(span, taps, loading)?;
    let y: Vec<C64> = span.iter().map(to_c64).collect();
    let d: Vec<C64> = training.iter().map(to_c64).collect();
    let nt = d.len() as f64;
    let k = (taps / 2) as isize;
    let at = |i: isize| if (0..y.len() as isize).contains(&i) { y[i as usize] } else { C64::new(0.0, 0.0) };
    // p over l = −K..=K
    let p: Vec<C64> = (-k..=k)
        .map(|l| (0..d.len()).map(|n| d[n] * at(n as isize + l).conj()).sum::<C64>() / nt)
        .collect();
    let w = levinson_solve(&acov, &p)?;
    let d_energy: f64 = d.iter().map(|v| v.norm_sqr()).sum();
    let impulse_response = (-k..=k)
        .map(|m| (0..d.len()).map(|n| at(n as isize + m) * d[n].conj()).sum::<C64>() / d_energy)
        .collect();
    let sigma_d = d_energy / nt;
    let wp: C64 = w.iter().zip(&p).map(|(a, b)| a.conj() * b).sum();
    Ok(ChannelEstimate { impulse_response, autocovariance: acov, taps: w, mmse: (sigma_d - wp.re).max(0.0) })
}

/// Trains on `training` and equalizes the whole of `received`.
pub fn wiener_equalize<T: Real>(
    received: &[Cplx<T>],
    training: &[Cplx<T>],
    taps: usize,
    loading: f64,
) -> Result<(Vec<Cplx<T>>, ChannelEstimate)> {
    let est = train_equalizer(received, training, taps, loading)?;
    Ok((est.apply(received), est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn qpsk(n: usize, seed: u64) -> Vec<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, if rng.random::<bool>() { 1.0 } else { -1.0 }))
            .collect()
    }

    fn convolve(x: &[C64], h: &[C64]) -> Vec<C64> {
        (0..x.len())
            .map(|n| h.iter().enumerate().filter(|(k, _)| *k <= n).map(|(k, hk)| hk * x[n - k]).sum())
            .collect()
    }

    #[test]
    fn white_input_gives_near_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 200_000;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let y: Vec<C64> = (0..n)
            .map(|_| C64::new(s * rng.sample::<f64, _>(StandardNormal), s * rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let a = estimate_autocovariance(&y, 4, 0.0).unwrap();
        assert!((a.lags[0].re - 1.0).abs() < 0.02);
        for m in 1..4 {
            assert!(a.lags[m].norm() < 3.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn constant_input_fills_every_entry() {
        let c = C64::new(0.6, -0.8);
        let n = 4096;
        let a = estimate_autocovariance(&vec![c; n], 5, 0.0).unwrap();
        for l in 0..5 {
            for k in 0..5 {
                // biased estimator: (N − |k − l|)/N · |c|²
                assert!((a.entry(l, k) - C64::new(1.0, 0.0)).norm() <= 5.0 / n as f64);
            }
        }
    }

    #[test]
    fn hermitian_and_toeplitz() {
        let y = qpsk(64, 3);
        let a = estimate_autocovariance(&y, 8, 1e-6).unwrap();
        for l in 0..8 {
            for k in 0..8 {
                assert_eq!(a.entry(l, k), a.entry(k, l).conj());
                if l > 0 && k > 0 {
                    assert_eq!(a.entry(l, k), a.entry(l - 1, k - 1));
                }
            }
        }
        assert!(estimate_autocovariance(&y, 17, 0.0).is_err());
    }

    #[test]
    fn levinson_matches_cholesky() {
        let y: Vec<C64> = convolve(&qpsk(500, 4), &[C64::new(1.0, 0.0), C64::new(0.3, 0.5)]);
        let a = estimate_autocovariance(&y, 21, 1e-6).unwrap();
        let b: Vec<C64> = qpsk(21, 5);
        let x = levinson_solve(&a, &b).unwrap();
        let m = a.matrix();
        let rhs = nalgebra::DVector::from_iterator(21, b.iter().map(|v| NaComplex::new(v.re, v.im)));
        let oracle = m.cholesky().unwrap().solve(&rhs);
        for (p, q) in x.iter().zip(oracle.iter()) {
            assert!((p - C64::new(q.re, q.im)).norm() < 1e-9 * q.norm().max(1.0));
        }
    }

    #[test]
    fn identity_channel_is_transparent() {
        let y = qpsk(400, 6);
        let (z, est) = wiener_equalize(&y, &y[..200], 31, 0.0).unwrap();
        for (a, b) in z.iter().zip(&y) {
            assert!((a - b).norm() <= 1e-9 * b.norm());
        }
        assert!((est.taps[15] - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn three_tap_channel_isi_suppressed() {
        let x = qpsk(4096, 7);
        let h = [C64::new(1.0, 0.0), C64::new(0.4, 0.1), C64::new(0.0, 0.2)];
        let y = convolve(&x, &h);
        let (z, _) = wiener_equalize(&y, &x, 31, 1e-6).unwrap();
        let err: f64 = z[16..4080].iter().zip(&x[16..4080]).map(|(a, b)| (a - b).norm_sqr()).sum();
        let sig: f64 = x[16..4080].iter().map(|v| v.norm_sqr()).sum();
        assert!(10.0 * (err / sig).log10() < -30.0);
    }

    #[test]
    fn pure_delay_is_undone() {
        let x = qpsk(2048, 8);
        for d in [1usize, 4, 9] {
            let mut y = vec![C64::new(0.0, 0.0); d];
            y.extend_from_slice(&x[..x.len() - d]);
            let (z, est) = wiener_equalize(&y, &x, 31, 1e-6).unwrap();
            let peak = est.taps.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
            assert_eq!(peak as isize - 15, d as isize);
            let lag = jrc_testkit::aperiodic_correlation(&z, &x).peak_lag();
            assert_eq!(lag, 0);
        }
    }

    #[test]
    fn mmse_non_increasing_in_length() {
        let x = qpsk(1024, 9);
        let h = [C64::new(1.0, 0.0), C64::new(0.5, -0.3), C64::new(0.2, 0.1), C64::new(-0.1, 0.0)];
        let y = convolve(&x, &h);
        let m: Vec<f64> = [7usize, 15, 31].iter().map(|&l| train_equalizer(&y, &x, l, 1e-6).unwrap().mmse).collect();
        assert!(m[0] >= m[1] && m[1] >= m[2], "{m:?}");
    }

    #[test]
    fn singular_system_reports_condition() {
        let y = vec![C64::new(0.0, 0.0); 200];
        match wiener_equalize(&y, &y[..150], 31, 1e-6) {
            Err(Error::Numerical { condition, .. }) => assert!(condition.is_infinite()),
            other => panic!("expected numerical error, got {other:?}"),
        }
        assert!(train_equalizer(&y, &y[..150], 30, 0.0).is_err());
    }
}
