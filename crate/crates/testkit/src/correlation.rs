use num_complex::Complex64;

/// Periodic cross-correlation by direct summation:
/// `out[k] = sum_n a[n] * b[(n + k) mod N]` for `k` in `0..N`.
///
/// Panics if the sequences differ in length or are empty.
pub fn periodic_correlation(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert!(!a.is_empty(), "empty sequence");
    assert_eq!(a.len(), b.len(), "periodic correlation needs equal lengths");
    let n = a.len();
    (0..n)
        .map(|k| (0..n).map(|i| a[i] * b[(i + k) % n]).sum())
        .collect()
}

/// Full aperiodic correlation `c[k] = sum_n a[n + k] * conj(b[n])`.
#[derive(Debug, Clone)]
pub struct AperiodicCorrelation {
    /// Correlation values, index 0 corresponds to lag `-(len(b) - 1)`.
    pub values: Vec<Complex64>,
    /// Number of negative lags stored before lag zero.
    pub zero_lag: usize,
}

impl AperiodicCorrelation {
    pub fn at(&self, lag: isize) -> Complex64 {
        let idx = lag + self.zero_lag as isize;
        if idx < 0 || idx as usize >= self.values.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[idx as usize]
        }
    }

    /// Lag with the largest magnitude (first one on ties).
    pub fn peak_lag(&self) -> isize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if v.norm() > self.values[best].norm() {
                best = i;
            }
        }
        best as isize - self.zero_lag as isize
    }
}

pub fn aperiodic_correlation(a: &[Complex64], b: &[Complex64]) -> AperiodicCorrelation {
    assert!(!a.is_empty() && !b.is_empty(), "empty sequence");
    let zero_lag = b.len() - 1;
    let total = a.len() + b.len() - 1;
    let mut values = vec![Complex64::new(0.0, 0.0); total];
    for (idx, slot) in values.iter_mut().enumerate() {
        let lag = idx as isize - zero_lag as isize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, bn) in b.iter().enumerate() {
            let ai = n as isize + lag;
            if ai >= 0 && (ai as usize) < a.len() {
                acc += a[ai as usize] * bn.conj();
            }
        }
        *slot = acc;
    }
    AperiodicCorrelation { values, zero_lag }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_zero_lag_is_energy() {
        let a = [1.0, -2.0, 0.5, 3.0];
        let c = periodic_correlation(&a, &a);
        let energy: f64 = a.iter().map(|x| x * x).sum();
        assert_eq!(c[0], energy);
    }

    #[test]
    fn aperiodic_locates_shift() {
        let b: Vec<Complex64> = [1.0, -1.0, 1.0, 1.0, -1.0]
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let mut a = vec![Complex64::new(0.0, 0.0); 12];
        a[4..9].copy_from_slice(&b);
        let c = aperiodic_correlation(&a, &b);
        assert_eq!(c.peak_lag(), 4);
        assert!((c.at(4).re - 5.0).abs() < 1e-12);
    }
}
