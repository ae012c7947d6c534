//! b-adic Walsh functions and the digit functionals used by the error
//! formulas.
//!
//! Walsh values are handled as exponents `e` in `Z_b`, meaning `omega_b^e`
//! with `omega_b = exp(2 pi i / b)`. Complex numbers only appear through
//! [`unit`].

use num_complex::Complex64;

use crate::arith::BAdicReal;
use crate::{Error, Result};

/// Base-b sum of digits of `k`.
pub fn delta_b(mut k: u64, b: u32) -> u64 {
    let b = b as u64;
    let mut s = 0;
    while k > 0 {
        s += k % b;
        k /= b;
    }
    s
}

/// `floor(k / b)`: drops the least significant digit.
pub fn floor_div_b(k: u64, b: u32) -> u64 {
    k / b as u64
}

/// Membership in `E_b = { k >= 1 : delta_b(k) = 0 mod b }`.
pub fn in_eb(k: u64, b: u32) -> bool {
    k >= 1 && delta_b(k, b) % b as u64 == 0
}

/// Sum of the positions of the `alpha` most significant nonzero digits of
/// `k`, positions counted from 1 at the least significant digit.
/// `mu_alpha(0) = 0`.
pub fn mu_alpha(k: u64, alpha: u32, b: u32) -> u64 {
    let mut positions = Vec::new();
    let (mut k, b64) = (k, b as u64);
    let mut pos = 1u64;
    while k > 0 {
        if k % b64 != 0 {
            positions.push(pos);
        }
        k /= b64;
        pos += 1;
    }
    positions.iter().rev().take(alpha as usize).sum()
}

/// `omega_b^e` as a complex number.
pub fn unit(e: u32, b: u32) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (e % b) as f64 / b as f64)
}

/// Exponent of `wal_k(x)`: `kappa_0 xi_1 + ... + kappa_{a-1} xi_a mod b`.
pub fn walsh_exponent(k: u64, x: &BAdicReal) -> u32 {
    let b = x.base() as u64;
    let (mut k, mut i, mut e) = (k, 1usize, 0u64);
    while k > 0 {
        e += (k % b) * x.digit(i) as u64;
        k /= b;
        i += 1;
    }
    (e % b) as u32
}

/// `wal_k(x)` with the base taken from `x`.
pub fn walsh_1d(k: u64, x: &BAdicReal) -> Complex64 {
    unit(walsh_exponent(k, x), x.base())
}

fn check_nd(ks: &[u64], xs: &[BAdicReal]) -> Result<u32> {
    if ks.len() != xs.len() {
        return Err(Error::DimensionMismatch {
            expected: ks.len(),
            got: xs.len(),
        });
    }
    let b = xs.first().map(|x| x.base()).unwrap_or(2);
    if let Some(x) = xs.iter().find(|x| x.base() != b) {
        return Err(Error::BaseMismatch(b, x.base()));
    }
    Ok(b)
}

/// Exponent of `wal_k(x) = prod_j wal_{k_j}(x_j)`.
pub fn walsh_nd_exponent(ks: &[u64], xs: &[BAdicReal]) -> Result<u32> {
    let b = check_nd(ks, xs)?;
    Ok(ks
        .iter()
        .zip(xs)
        .map(|(&k, x)| walsh_exponent(k, x))
        .fold(0, |acc, e| (acc + e) % b))
}

pub fn walsh_nd(ks: &[u64], xs: &[BAdicReal]) -> Result<Complex64> {
    let b = check_nd(ks, xs)?;
    Ok(unit(walsh_nd_exponent(ks, xs)?, b))
}

/// Digitwise sum of two integers modulo `b`.
pub fn int_digitwise_add(k: u64, l: u64, b: u32) -> u64 {
    let b = b as u64;
    let (mut k, mut l, mut out, mut scale) = (k, l, 0u64, 1u64);
    while k > 0 || l > 0 {
        out += ((k % b + l % b) % b) * scale;
        k /= b;
        l /= b;
        scale *= b;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_point(c: u64, b: u32, t: usize) -> BAdicReal {
        let mut d = crate::arith::int_digits(c, b);
        d.resize(t, 0);
        d.reverse();
        BAdicReal::from_digits(b, d.into_iter().map(|x| x as u8).collect()).unwrap()
    }

    #[test]
    fn digit_functionals() {
        assert_eq!(delta_b(3, 2), 2);
        assert_eq!(delta_b(5, 3), 3);
        assert_eq!(delta_b(0, 7), 0);
        assert_eq!(floor_div_b(5, 3), 1);
        assert_eq!(floor_div_b(0, 4), 0);
        for j in 0..50u64 {
            for k0 in 0..3 {
                assert_eq!(floor_div_b(3 * j + k0, 3), j);
            }
        }
    }

    #[test]
    fn eb_membership() {
        assert!(in_eb(3, 2));
        assert!(!in_eb(1, 2));
        assert!(!in_eb(0, 2));
        assert_eq!((1..).find(|&k| in_eb(k, 3)), Some(5));
        for b in 2..=7u32 {
            for k in 1..2000u64 {
                if in_eb(k, b) {
                    for j in 0..4 {
                        assert!(in_eb(k * (b as u64).pow(j), b));
                    }
                }
                assert_eq!(in_eb(k, b), in_eb(k * b as u64, b));
            }
        }
    }

    #[test]
    fn smallest_eb_member_is_at_least_b() {
        // mu_alpha(0) never enters a sum over E_b because floor(k/b) >= 1.
        for b in 2..=7u32 {
            let min = (1..).find(|&k| in_eb(k, b)).unwrap();
            assert!(min >= b as u64, "b={b} min={min}");
            assert!(floor_div_b(min, b) >= 1);
        }
    }

    #[test]
    fn mu_alpha_examples() {
        assert_eq!(mu_alpha(6, 2, 2), 5);
        assert_eq!(mu_alpha(6, 1, 2), 3);
        assert_eq!(mu_alpha(5, 2, 3), 3);
        assert_eq!(mu_alpha(0, 3, 2), 0);
    }

    #[test]
    fn mu_alpha_monotone_and_saturating() {
        for b in [2u32, 3, 5] {
            for k in 0..3000u64 {
                let v = crate::arith::int_digits(k, b).iter().filter(|&&d| d != 0).count() as u32;
                for alpha in 1..6 {
                    assert!(mu_alpha(k, alpha, b) <= mu_alpha(k, alpha + 1, b));
                    if alpha >= v {
                        assert_eq!(mu_alpha(k, alpha, b), mu_alpha(k, v.max(1), b));
                    }
                }
            }
        }
    }

    #[test]
    fn walsh_examples() {
        let x = BAdicReal::from_digits(3, vec![1]).unwrap();
        assert_eq!(walsh_exponent(0, &x), 0);
        assert_eq!(walsh_exponent(1, &x), 1);
        let y = BAdicReal::from_digits(2, vec![1, 1]).unwrap();
        assert_eq!(walsh_exponent(3, &y), 0);
        assert!((walsh_1d(3, &y) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // Tail digits participate: 1 = 0.111... in base 2.
        assert_eq!(walsh_exponent(1, &BAdicReal::one(2).unwrap()), 1);
    }

    #[test]
    fn walsh_nd_examples() {
        let h = BAdicReal::from_digits(2, vec![1]).unwrap();
        let xs = [h.clone(), h.clone()];
        assert_eq!(walsh_nd_exponent(&[0, 0], &xs).unwrap(), 0);
        assert_eq!(walsh_nd_exponent(&[1, 1], &xs).unwrap(), 0);
        assert_eq!(walsh_nd_exponent(&[1, 0], &xs).unwrap(), walsh_exponent(1, &h));
        assert!(walsh_nd(&[1], &xs).is_err());
        let mixed = [h, BAdicReal::from_digits(3, vec![1]).unwrap()];
        assert!(matches!(walsh_nd(&[1, 1], &mixed), Err(Error::BaseMismatch(2, 3))));
    }

    #[test]
    fn character_property_on_finite_digits() {
        for b in [2u32, 3, 5] {
            let t = 3;
            let n = (b as u64).pow(t);
            for k in 0..n {
                for l in 0..n.min(40) {
                    for c in 0..n {
                        let x = grid_point(c, b, t as usize);
                        let lhs = (walsh_exponent(k, &x) + walsh_exponent(l, &x)) % b;
                        assert_eq!(lhs, walsh_exponent(int_digitwise_add(k, l, b), &x));
                    }
                }
                for c in 0..n.min(30) {
                    for d in 0..n.min(30) {
                        let x = grid_point(c, b, t as usize);
                        let y = grid_point(d, b, t as usize);
                        let lhs = (walsh_exponent(k, &x) + walsh_exponent(k, &y)) % b;
                        let sum = x.digitwise_add(&y).unwrap();
                        assert_eq!(lhs, walsh_exponent(k, &sum));
                    }
                }
            }
        }
    }
}
