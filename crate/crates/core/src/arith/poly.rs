use std::cmp::Ordering;
use std::fmt;

use super::check_base;
use crate::{Error, Result};

pub fn is_prime(b: u32) -> bool {
    if b < 2 {
        return false;
    }
    (2..).take_while(|d| d * d <= b).all(|d| b % d != 0)
}

/// Polynomial over `Z_b` for prime `b`, coefficients in ascending degree.
///
/// Trailing zero coefficients are stripped, so the zero polynomial has an
/// empty coefficient list and no degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyZb {
    base: u32,
    coeffs: Vec<u32>,
}

impl PolyZb {
    /// Builds a polynomial, rejecting coefficients outside `0..b`.
    pub fn new(base: u32, coeffs: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        if !is_prime(base) {
            return Err(Error::InvalidBase(base, "polynomial arithmetic needs a prime base"));
        }
        if let Some(&d) = coeffs.iter().find(|&&c| c >= base) {
            return Err(Error::InvalidDigit { digit: d, base });
        }
        Ok(Self::normalized(base, coeffs))
    }

    fn normalized(base: u32, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyZb { base, coeffs }
    }

    pub fn zero(base: u32) -> Result<Self> {
        Self::new(base, Vec::new())
    }

    pub fn one(base: u32) -> Result<Self> {
        Self::new(base, vec![1])
    }

    /// The polynomial whose coefficients are the base-b digits of `k`
    /// (`k = kappa_0 + kappa_1 b + ...` becomes `kappa_0 + kappa_1 x + ...`).
    pub fn from_index(base: u32, k: u64) -> Result<Self> {
        Self::new(base, super::int_digits(k, base))
    }

    /// Inverse of [`PolyZb::from_index`].
    pub fn to_index(&self) -> u64 {
        super::digits_to_int(&self.coeffs, self.base)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.base != other.base {
            return Err(Error::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let b = self.base;
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len).map(|i| (self.coeff(i) + other.coeff(i)) % b).collect();
        Ok(Self::normalized(b, c))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let b = self.base;
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len)
            .map(|i| (self.coeff(i) + b - other.coeff(i)) % b)
            .collect();
        Ok(Self::normalized(b, c))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::normalized(self.base, Vec::new()));
        }
        let b = self.base as u64;
        let mut c = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + x as u64 * y as u64) % b;
            }
        }
        Ok(Self::normalized(self.base, c.into_iter().map(|v| v as u32).collect()))
    }

    /// Multiplies every coefficient by the scalar `c`.
    pub fn scale(&self, c: u32) -> Self {
        let b = self.base as u64;
        let v = self
            .coeffs
            .iter()
            .map(|&x| (x as u64 * c as u64 % b) as u32)
            .collect();
        Self::normalized(self.base, v)
    }

    /// Long division: `self = q * divisor + r` with `deg r < deg divisor`.
    pub fn divrem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check(divisor)?;
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let b = self.base;
        let lead_inv = inv_mod(divisor.coeffs[dd], b);
        let mut rem: Vec<u32> = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::normalized(b, Vec::new()), self.clone()));
        }
        let mut quot = vec![0u32; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c == 0 {
                continue;
            }
            let f = (c as u64 * lead_inv as u64 % b as u64) as u32;
            quot[i - dd] = f;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                let idx = i - dd + j;
                rem[idx] = ((rem[idx] as u64 + (b - f) as u64 * dc as u64) % b as u64) as u32;
            }
        }
        rem.truncate(dd);
        Ok((Self::normalized(b, quot), Self::normalized(b, rem)))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.divrem(divisor)?.1)
    }

    /// Irreducibility by trial division with every monic polynomial of
    /// degree `1..=deg/2`.
    pub fn is_irreducible(&self) -> Result<bool> {
        let d = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => {
                return Err(Error::invalid(
                    "irreducibility is defined for polynomials of degree >= 1",
                ))
            }
        };
        let b = self.base as u64;
        for fd in 1..=d / 2 {
            let count = b.pow(fd as u32);
            for low in 0..count {
                let mut c = super::int_digits(low, self.base);
                c.resize(fd, 0);
                c.push(1);
                let f = Self::normalized(self.base, c);
                if self.rem(&f)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// First irreducible polynomial of degree `n` in increasing index order
    /// among monic polynomials.
    pub fn first_irreducible(base: u32, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("degree must be at least 1"));
        }
        let b = base as u64;
        let count = b
            .checked_pow(n as u32)
            .ok_or_else(|| Error::invalid("degree too large"))?;
        for low in 0..count {
            let mut c = super::int_digits(low, base);
            c.resize(n, 0);
            c.push(1);
            let p = Self::new(base, c)?;
            if p.is_irreducible()? {
                return Ok(p);
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }

    /// Parses the comma-separated ascending coefficient list, e.g. `"1,1,1"`.
    pub fn parse(base: u32, s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Self::zero(base);
        }
        let coeffs = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::invalid(format!("bad coefficient {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(base, coeffs)
    }

    /// Lexicographic comparison of coefficient lists padded to `len`.
    pub fn cmp_padded(&self, other: &Self, len: usize) -> Ordering {
        (0..len)
            .map(|i| self.coeff(i).cmp(&other.coeff(i)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl fmt::Display for PolyZb {
    /// Comma-separated ascending coefficients; the zero polynomial is `"0"`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub(crate) fn inv_mod(a: u32, p: u32) -> u32 {
    // Fermat: a^(p-2) for prime p.
    let (mut base, mut exp, m) = (a as u64 % p as u64, p as u64 - 2, p as u64);
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc as u32
}
