use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use super::check_base;
use crate::{Error, Result};

/// A number in `[0, 1]` written as a finite digit prefix followed by one
/// digit repeated forever.
///
/// The value is `sum_{i<=p} xi_i b^-i + t b^-p / (b - 1)`. Equality compares
/// values, so `0.0222...` and `0.1` in base 3 are equal even though their
/// digits (and hence their Walsh values) differ.
#[derive(Debug, Clone)]
pub struct BAdicReal {
    base: u32,
    prefix: Vec<u8>,
    tail: u8,
}

impl BAdicReal {
    pub fn new(base: u32, prefix: Vec<u8>, tail: u8) -> Result<Self> {
        check_base(base)?;
        for &d in prefix.iter().chain(std::iter::once(&tail)) {
            if d as u32 >= base {
                return Err(Error::InvalidDigit {
                    digit: d as u32,
                    base,
                });
            }
        }
        Ok(BAdicReal { base, prefix, tail })
    }

    /// Finite expansion `0.d1 d2 ... dp` with a zero tail.
    pub fn from_digits(base: u32, prefix: Vec<u8>) -> Result<Self> {
        Self::new(base, prefix, 0)
    }

    pub fn zero(base: u32) -> Result<Self> {
        Self::new(base, Vec::new(), 0)
    }

    /// `1 = 0.(b-1)(b-1)...`.
    pub fn one(base: u32) -> Result<Self> {
        check_base(base)?;
        Self::new(base, Vec::new(), (base - 1) as u8)
    }

    pub(crate) fn from_parts_unchecked(base: u32, prefix: Vec<u8>, tail: u8) -> Self {
        debug_assert!(prefix.iter().all(|&d| (d as u32) < base) && (tail as u32) < base);
        BAdicReal { base, prefix, tail }
    }

    /// First `precision` digits of the expansion of `x` with infinitely many
    /// digits different from `b - 1`; `x = 1` maps to the all-`(b-1)` tail.
    ///
    /// Digits are peeled off with floating point `b * x`, so values within
    /// rounding of a finite b-adic expansion snap onto it (`1/3` gives `0.1`
    /// in base 3).
    pub fn from_f64(x: f64, base: u32, precision: usize) -> Result<Self> {
        check_base(base)?;
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(x));
        }
        if x == 1.0 {
            return Self::one(base);
        }
        let b = base as f64;
        let mut r = x;
        let mut prefix = Vec::with_capacity(precision);
        for _ in 0..precision {
            let y = r * b;
            let d = y.floor().clamp(0.0, b - 1.0);
            prefix.push(d as u8);
            r = (y - d).clamp(0.0, 1.0);
        }
        Ok(BAdicReal {
            base,
            prefix,
            tail: 0,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn tail(&self) -> u8 {
        self.tail
    }

    /// Length of the explicit prefix.
    pub fn precision(&self) -> usize {
        self.prefix.len()
    }

    /// Digit `xi_i`, 1-based; positions past the prefix read the tail.
    #[inline]
    pub fn digit(&self, i: usize) -> u8 {
        debug_assert!(i >= 1);
        self.prefix.get(i - 1).copied().unwrap_or(self.tail)
    }

    pub fn to_f64(&self) -> f64 {
        let b = self.base as f64;
        let mut v = self.tail as f64 / (b - 1.0);
        for &d in self.prefix.iter().rev() {
            v = (d as f64 + v) / b;
        }
        v
    }

    /// Exact value as `(numerator, denominator)` with the unreduced
    /// denominator `b^p (b - 1)`.
    pub fn exact_value(&self) -> (BigUint, BigUint) {
        let b = BigUint::from(self.base);
        let bm1 = BigUint::from(self.base - 1);
        let mut num = BigUint::from(0u32);
        for &d in &self.prefix {
            num = num * &b + BigUint::from(d);
        }
        num = num * &bm1 + BigUint::from(self.tail);
        let den = num_traits::pow(b, self.prefix.len()) * bm1;
        (num, den)
    }

    pub fn to_ratio(&self) -> BigRational {
        let (n, d) = self.exact_value();
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn check_same_base(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    fn digitwise(&self, other: &Self, op: impl Fn(u32, u32) -> u32) -> Result<Self> {
        self.check_same_base(other)?;
        let len = self.prefix.len().max(other.prefix.len());
        let prefix = (1..=len)
            .map(|i| op(self.digit(i) as u32, other.digit(i) as u32) as u8)
            .collect();
        let tail = op(self.tail as u32, other.tail as u32) as u8;
        Ok(BAdicReal {
            base: self.base,
            prefix,
            tail,
        })
    }

    /// Digitwise addition modulo `b`, tails included.
    pub fn digitwise_add(&self, other: &Self) -> Result<Self> {
        let b = self.base;
        self.digitwise(other, |x, y| (x + y) % b)
    }

    /// Digitwise subtraction modulo `b`, tails included.
    pub fn digitwise_sub(&self, other: &Self) -> Result<Self> {
        let b = self.base;
        self.digitwise(other, |x, y| (x + b - y) % b)
    }

    /// The first `n` digits (tail rule applied past the prefix), tail 0.
    pub fn truncated(&self, n: usize) -> Self {
        BAdicReal {
            base: self.base,
            prefix: (1..=n).map(|i| self.digit(i)).collect(),
            tail: 0,
        }
    }

    /// True when both digit representations coincide.
    pub fn same_digits(&self, other: &Self) -> bool {
        self.base == other.base && self.prefix == other.prefix && self.tail == other.tail
    }

    /// Parses `"d1d2...dp(t)"`; a missing `(t)` means tail 0. Digits above 9
    /// use `a..z`.
    pub fn parse(base: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, tail) = match s.find('(') {
            Some(open) => {
                let close = s
                    .strip_suffix(')')
                    .ok_or_else(|| Error::invalid(format!("unterminated tail in {s:?}")))?;
                let inner = &close[open + 1..];
                let mut it = inner.chars();
                let t = match (it.next(), it.next()) {
                    (Some(c), None) => parse_digit(c, base)?,
                    _ => return Err(Error::invalid(format!("tail must be one digit in {s:?}"))),
                };
                (&s[..open], t)
            }
            None => (s, 0),
        };
        let prefix = body
            .chars()
            .map(|c| parse_digit(c, base))
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, prefix, tail)
    }
}

fn parse_digit(c: char, base: u32) -> Result<u8> {
    let d = c
        .to_digit(36)
        .ok_or_else(|| Error::invalid(format!("bad digit {c:?}")))?;
    if d >= base {
        return Err(Error::InvalidDigit { digit: d, base });
    }
    Ok(d as u8)
}

impl PartialEq for BAdicReal {
    fn eq(&self, other: &Self) -> bool {
        if self.base != other.base {
            return false;
        }
        let (n1, d1) = self.exact_value();
        let (n2, d2) = other.exact_value();
        n1 * d2 == n2 * d1
    }
}

impl fmt::Display for BAdicReal {
    /// `"d1d2...dp(t)"`, digits in base 36 notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |d: u8| std::char::from_digit(d as u32, 36).unwrap_or('?');
        for &d in &self.prefix {
            write!(f, "{}", render(d))?;
        }
        write!(f, "({})", render(self.tail))
    }
}
