//! Arbitrary-precision evaluations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite input")
}

/// Square root evaluated with `digits` decimal digits by integer square root
/// of the exact rational input, then rounded once to `f64`.
pub fn exact_sqrt(x: f64, digits: u32) -> f64 {
    assert!(x >= 0.0);
    let scale = BigInt::from(10u32).pow(2 * digits);
    let scaled = exact(x) * BigRational::from_integer(scale);
    let floor = scaled.to_integer();
    let root = floor.sqrt().to_string();
    let digits = digits as usize;
    let text = if root.len() > digits {
        let (int, frac) = root.split_at(root.len() - digits);
        format!("{int}.{frac}")
    } else {
        format!("0.{:0>width$}", root, width = digits)
    };
    text.parse().expect("decimal string")
}

/// Inputs of the quadratic single-leg range model, taken as exact binary
/// fractions. `heave` is the displacement value at `t`, supplied by the
/// caller since it is transcendental.
#[derive(Debug, Clone, Copy)]
pub struct RangeTerms {
    pub initial_range: f64,
    pub heave: f64,
    pub velocity: f64,
    pub ground_velocity: f64,
    pub squint: f64,
    pub v_rad: f64,
    pub v_al: f64,
    pub a_rad: f64,
}

/// `R0 + heave + (V*squint + v_rad) t + 0.5 (V*Vgr/R0 - 2 V v_al / R0 + a_rad) t^2`
/// in exact rational arithmetic; the effective velocity only enters squared,
/// so no irrational operation is needed.
pub fn exact_range_history(terms: &RangeTerms, t: f64) -> f64 {
    let r0 = exact(terms.initial_range);
    assert!(!r0.is_zero());
    let v = exact(terms.velocity);
    let t = exact(t);
    let linear = &v * exact(terms.squint) + exact(terms.v_rad);
    let two = BigRational::from_integer(BigInt::from(2));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let quad = &v * exact(terms.ground_velocity) / &r0 - &two * &v * exact(terms.v_al) / &r0
        + exact(terms.a_rad);
    let value = r0 + exact(terms.heave) + linear * &t + half * quad * &t * &t;
    value.to_f64().expect("representable")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_perfect_square() {
        assert_eq!(exact_sqrt(5_290_000.0, 30), 2300.0);
        assert_eq!(exact_sqrt(4.0, 10), 2.0);
    }

    #[test]
    fn sqrt_two() {
        assert_eq!(exact_sqrt(2.0, 40), std::f64::consts::SQRT_2);
    }

    #[test]
    fn stationary_range_is_hyperbolic_approximation() {
        let terms = RangeTerms {
            initial_range: 8000.0,
            heave: 0.0,
            velocity: 200.0,
            ground_velocity: 200.0,
            squint: 0.0,
            v_rad: 0.0,
            v_al: 0.0,
            a_rad: 0.0,
        };
        assert_eq!(exact_range_history(&terms, 1.0), 8002.5);
    }
}
