//! Exact base-b arithmetic: digit strings on `[0, 1]`, polynomials over
//! `Z_b`, and Laurent expansions of `q/p`.

mod badic;
mod laurent;
mod poly;

pub use badic::BAdicReal;
pub use laurent::{laurent_expand, LaurentPrefix};
pub use poly::{is_prime, PolyZb};

use crate::{Error, Result};

pub(crate) const MAX_BASE: u32 = 256;

pub(crate) fn check_base(base: u32) -> Result<()> {
    if base < 2 {
        return Err(Error::InvalidBase(base, "base must be at least 2"));
    }
    if base > MAX_BASE {
        return Err(Error::InvalidBase(base, "base must be at most 256"));
    }
    Ok(())
}

/// Base-b digits of `k`, least significant first. Empty for `k = 0`.
pub fn int_digits(mut k: u64, base: u32) -> Vec<u32> {
    let b = base as u64;
    let mut out = Vec::new();
    while k > 0 {
        out.push((k % b) as u32);
        k /= b;
    }
    out
}

/// Inverse of [`int_digits`]; digits least significant first.
pub fn digits_to_int(digits: &[u32], base: u32) -> u64 {
    digits
        .iter()
        .rev()
        .fold(0u64, |acc, &d| acc * base as u64 + d as u64)
}
