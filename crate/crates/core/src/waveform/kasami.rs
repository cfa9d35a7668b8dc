//! Binary m-sequences and the small Kasami family built from them.

use crate::error::{domain, Result};
use crate::scalar::Real;

/// Exponents below `n` of a primitive polynomial `x^n + ... + 1` over GF(2).
fn primitive_taps(n: u32) -> Option<&'static [u32]> {
    Some(match n {
        4 => &[0, 1],
        6 => &[0, 1],
        8 => &[0, 2, 3, 4],
        10 => &[0, 3],
        12 => &[0, 1, 4, 6],
        14 => &[0, 1, 6, 10],
        16 => &[0, 1, 3, 12],
        _ => return None,
    })
}

/// Maximal-length sequence of period `2^n - 1` from the recurrence
/// `a[k+n] = Σ a[k+i]` over the polynomial taps, seeded with `1, 0, …, 0`.
pub fn m_sequence(n: u32) -> Result<Vec<u8>> {
    let taps = primitive_taps(n)
        .ok_or_else(|| crate::Error::Domain(format!("no primitive polynomial tabulated for degree {n}")))?;
    let len = (1usize << n) - 1;
    let mut a = vec![0u8; len + n as usize];
    a[0] = 1;
    for k in 0..len {
        let mut bit = 0;
        for &t in taps {
            bit ^= a[k + t as usize];
        }
        a[k + n as usize] = bit;
    }
    a.truncate(len);
    Ok(a)
}

/// One member of a binary spreading-code family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadingCode {
    chips: Vec<u8>,
    degree: u32,
    index: usize,
}

impl SpreadingCode {
    pub fn chips(&self) -> &[u8] {
        &self.chips
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    /// Bipolar form, chip 0 → +1 and chip 1 → −1.
    pub fn bipolar<T: Real>(&self) -> Vec<T> {
        self.chips.iter().map(|&c| chip_amplitude(c)).collect()
    }
}

#[inline]
pub(crate) fn chip_amplitude<T: Real>(chip: u8) -> T {
    if chip == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Number of codes in the small Kasami family of degree `n`.
pub fn kasami_family_size(n: u32) -> usize {
    1usize << (n / 2)
}

/// The `index`-th small-set Kasami sequence of period `2^n - 1`.
///
/// Index 0 is the m-sequence `u` itself; index `i ≥ 1` is
/// `u ⊕ shift(w, i - 1)`, where `w` is `u` decimated by `2^(n/2) + 1`.
pub fn kasami_small_set(n: u32, index: usize) -> Result<SpreadingCode> {
    if n % 2 != 0 || !(4..=16).contains(&n) {
        return domain(format!("Kasami degree must be even and in 4..=16, got {n}"));
    }
    let size = kasami_family_size(n);
    if index >= size {
        return domain(format!("Kasami index {index} out of range (family size {size})"));
    }
    let u = m_sequence(n)?;
    if index == 0 {
        return Ok(SpreadingCode { chips: u, degree: n, index });
    }
    let len = u.len();
    let s = (1usize << (n / 2)) + 1;
    let shift = index - 1;
    let chips = (0..len)
        .map(|j| u[j] ^ u[(s * ((j + shift) % len)) % len])
        .collect();
    Ok(SpreadingCode { chips, degree: n, index })
}
