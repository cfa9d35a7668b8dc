/// Central difference `(f(t+h) - f(t-h)) / 2h`.
pub fn finite_difference<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    assert!(h > 0.0, "step must be positive");
    (f(t + h) - f(t - h)) / (2.0 * h)
}

/// Complementary error function.
///
/// Maclaurin series of erf for |x| < 3, Lentz continued fraction beyond.
/// Both converge to full double precision in their ranges.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x2 / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    } else {
        // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + 1/2/(x + 1/(x + 3/2/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = x;
        let mut d = 0.0;
        for k in 1..500 {
            let a = k as f64 / 2.0;
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        (-x * x).exp() / std::f64::consts::PI.sqrt() / f
    }
}

/// Standard normal tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn qfunction(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerEstimate {
    pub errors: u64,
    pub bits: u64,
    pub rate: f64,
    /// Binomial standard error of `rate`.
    pub sigma: f64,
}

impl BerEstimate {
    /// Whether `expected` lies within `k` standard errors. A zero-error run
    /// is compared against the one-error resolution instead of zero width.
    pub fn within_sigmas(&self, expected: f64, k: f64) -> bool {
        let sigma = (expected * (1.0 - expected) / self.bits as f64).sqrt();
        (self.rate - expected).abs() <= k * sigma.max(1.0 / self.bits as f64)
    }
}

/// Runs `runner(chunk)` (which returns the number of bit errors among `chunk`
/// fresh bits) until at least `n_bits` bits have been simulated.
pub fn monte_carlo_ber<F: FnMut(usize) -> usize>(mut runner: F, n_bits: usize, chunk: usize) -> BerEstimate {
    assert!(chunk > 0);
    let mut bits = 0u64;
    let mut errors = 0u64;
    while (bits as usize) < n_bits {
        let this = chunk.min(n_bits - bits as usize);
        errors += runner(this) as u64;
        bits += this as u64;
    }
    let rate = errors as f64 / bits as f64;
    BerEstimate {
        errors,
        bits,
        rate,
        sigma: (rate * (1.0 - rate) / bits as f64).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_square() {
        let d = finite_difference(|t| t * t, 1.0, 1e-4);
        assert!((d - 2.0).abs() < 1e-6);
    }

    #[test]
    fn derivative_of_constant() {
        assert_eq!(finite_difference(|_| 3.5, 0.7, 1e-3), 0.0);
    }

    #[test]
    fn q_at_zero_is_half() {
        assert!((qfunction(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn q_reference_values() {
        // Q(1) and Q(3) from standard tables (15 significant digits)
        assert!((qfunction(1.0) - 0.158_655_253_931_457).abs() < 1e-14);
        assert!((qfunction(3.0) - 1.349_898_031_630_09e-3).abs() < 1e-16);
        // Q(2.82) ~ 2.4e-3
        assert!((qfunction(2.82) / 2.4e-3 - 1.0).abs() < 0.02);
    }

    #[test]
    fn erfc_branches_agree_at_switch() {
        let below = erfc(3.0 - 1e-12);
        let above = erfc(3.0 + 1e-12);
        assert!((below - above).abs() / above < 1e-9);
        assert!((erfc(5.0) - 1.537_459_794_428_035e-12).abs() < 1e-24);
    }

    #[test]
    fn noiseless_ber_is_zero() {
        let est = monte_carlo_ber(|_| 0, 100_000, 4096);
        assert_eq!(est.rate, 0.0);
        assert_eq!(est.bits, 100_000);
    }
}
