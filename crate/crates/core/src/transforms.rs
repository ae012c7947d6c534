//! Random digital shifts and the b-adic tent transformation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::BAdicReal;
use crate::nets::DigitalNet;
use crate::walsh::delta_b;
use crate::{Error, Result};

/// Seed and stream id of a reproducible digit source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub seed: u64,
    pub stream: u64,
}

impl RngSpec {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngSpec { seed, stream }
    }

    /// A fresh generator positioned at the start of the stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// A shift `sigma = (sigma_1, ..., sigma_s)` with a common base and digit
/// precision; every coordinate has tail 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftVector {
    base: u32,
    precision: usize,
    coords: Vec<BAdicReal>,
}

impl ShiftVector {
    pub fn new(coords: Vec<BAdicReal>) -> Result<Self> {
        let first = coords
            .first()
            .ok_or_else(|| Error::invalid("shift must have at least one coordinate"))?;
        let (base, precision) = (first.base(), first.precision());
        for c in &coords {
            if c.base() != base {
                return Err(Error::BaseMismatch(base, c.base()));
            }
            if c.precision() != precision {
                return Err(Error::invalid("shift coordinates must share one precision"));
            }
            if c.tail() != 0 {
                return Err(Error::invalid("shift coordinates must have tail 0"));
            }
        }
        Ok(ShiftVector {
            base,
            precision,
            coords,
        })
    }

    /// The all-zero shift.
    pub fn zero(base: u32, dim: usize, precision: usize) -> Result<Self> {
        crate::arith::check_base(base)?;
        let coords = (0..dim)
            .map(|_| BAdicReal::from_parts_unchecked(base, vec![0; precision], 0))
            .collect();
        ShiftVector::new(coords)
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[BAdicReal] {
        &self.coords
    }
}

/// Default shift precision for a net of precision `n` and smoothness
/// `alpha`.
pub fn default_shift_precision(n: usize, alpha: u32) -> usize {
    n + alpha as usize + 2
}

/// Draws a shift with i.i.d. uniform digits from `rng`.
pub fn sample_shift_from<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    base: u32,
    precision: usize,
) -> Result<ShiftVector> {
    crate::arith::check_base(base)?;
    let coords = (0..dim)
        .map(|_| {
            let digits = (0..precision).map(|_| rng.gen_range(0..base) as u8).collect();
            BAdicReal::from_parts_unchecked(base, digits, 0)
        })
        .collect();
    ShiftVector::new(coords)
}

/// Draws a shift from the start of the stream named by `spec`.
pub fn sample_shift(spec: &RngSpec, dim: usize, base: u32, precision: usize) -> Result<ShiftVector> {
    sample_shift_from(&mut spec.rng(), dim, base, precision)
}

fn check_shift(points: &[Vec<BAdicReal>], sigma: &ShiftVector) -> Result<()> {
    for p in points {
        if p.len() != sigma.dim() {
            return Err(Error::DimensionMismatch {
                expected: sigma.dim(),
                got: p.len(),
            });
        }
        for x in p {
            if x.base() != sigma.base() {
                return Err(Error::BaseMismatch(sigma.base(), x.base()));
            }
            if x.precision() > sigma.precision() {
                return Err(Error::invalid(format!(
                    "shift precision {} is below point precision {}",
                    sigma.precision(),
                    x.precision()
                )));
            }
        }
    }
    Ok(())
}

/// `P (+) sigma`, coordinatewise digitwise addition.
pub fn digital_shift(points: &[Vec<BAdicReal>], sigma: &ShiftVector) -> Result<Vec<Vec<BAdicReal>>> {
    check_shift(points, sigma)?;
    points
        .iter()
        .map(|p| p.iter().zip(&sigma.coords).map(|(x, s)| x.digitwise_add(s)).collect())
        .collect()
}

/// The b-adic tent transformation `phi_b`.
///
/// For digits `xi_1 xi_2 ...` the result has digits
/// `eta_i = xi_{i+1} - xi_1 mod b`. A pure-tail input has `xi_1` equal to
/// its tail, so it maps to 0.
pub fn tent_fold(x: &BAdicReal) -> BAdicReal {
    let b = x.base();
    let xi1 = x.digit(1) as u32;
    let sub = |d: u8| ((d as u32 + b - xi1) % b) as u8;
    let prefix = x.prefix().iter().skip(1).map(|&d| sub(d)).collect();
    BAdicReal::from_parts_unchecked(b, prefix, sub(x.tail()))
}

/// The truncated transformation `phi_{b,n}`: the first `n` digits of
/// `phi_b(x)` with tail 0.
pub fn tent_fold_truncated(x: &BAdicReal, n: usize) -> Result<BAdicReal> {
    if n == 0 {
        return Err(Error::invalid("truncation length must be at least 1"));
    }
    Ok(tent_fold(x).truncated(n))
}

/// `sigma_b`: drops the first digit (multiplication by `b` modulo 1).
pub fn sigma_b(x: &BAdicReal) -> BAdicReal {
    let prefix = x.prefix().iter().skip(1).copied().collect();
    BAdicReal::from_parts_unchecked(x.base(), prefix, x.tail())
}

/// `tau_b`: the constant-digit number `xi_1 / (b - 1)`.
pub fn tau_b(x: &BAdicReal) -> BAdicReal {
    BAdicReal::from_parts_unchecked(x.base(), Vec::new(), x.digit(1))
}

/// The index `k` with `floor(k / b) = j` and `delta_b(k) = 0 mod b`, so
/// that `wal_j(phi_b(x)) = wal_k(x)`.
pub fn tent_walsh_index(j: u64, b: u32) -> u64 {
    let b64 = b as u64;
    j * b64 + (b64 - delta_b(j, b) % b64) % b64
}

/// `phi_b(P (+) sigma)` as exact coordinates, in point order.
pub fn fold_shifted_net(net: &DigitalNet, sigma: &ShiftVector) -> Result<Vec<Vec<BAdicReal>>> {
    let shifted = digital_shift(&net.points(), sigma)?;
    Ok(shifted
        .iter()
        .map(|p| p.iter().map(tent_fold).collect())
        .collect())
}

/// `phi_b(P (+) sigma)` evaluated in floating point without building
/// intermediate digit strings. Agrees with [`fold_shifted_net`] followed by
/// [`BAdicReal::to_f64`].
pub fn fold_shifted_values(net: &DigitalNet, sigma: &ShiftVector) -> Result<Vec<Vec<f64>>> {
    if net.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: net.dim(),
        });
    }
    if net.base() != sigma.base() {
        return Err(Error::BaseMismatch(sigma.base(), net.base()));
    }
    if net.precision() > sigma.precision() {
        return Err(Error::invalid(format!(
            "shift precision {} is below point precision {}",
            sigma.precision(),
            net.precision()
        )));
    }
    let b = net.base();
    let bf = b as f64;
    let p = sigma.precision();
    let mut buf = vec![0u32; p];
    let out = (0..net.num_points())
        .map(|l| {
            (0..net.dim())
                .map(|j| {
                    let x = net.digits(l, j);
                    let s = sigma.coords[j].prefix();
                    for (i, d) in buf.iter_mut().enumerate() {
                        let xd = x.get(i).copied().unwrap_or(0) as u32;
                        *d = (xd + s[i] as u32) % b;
                    }
                    let xi1 = buf.first().copied().unwrap_or(0);
                    // Tail digit (0 - xi_1) contributes tail/(b-1) at the
                    // bottom; Horner upward through the folded prefix.
                    let tail = ((b - xi1) % b) as f64;
                    let mut v = tail / (bf - 1.0);
                    for &d in buf.iter().skip(1).rev() {
                        v = (((d + b - xi1) % b) as f64 + v) / bf;
                    }
                    v
                })
                .collect()
        })
        .collect();
    Ok(out)
}
