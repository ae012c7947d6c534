//! Digital nets over `Z_b`: construction from generating matrices or from
//! higher-order polynomial lattice rule parameters, and dual-net queries.

use num_complex::Complex64;

use crate::arith::{int_digits, laurent_expand, BAdicReal, PolyZb};
use crate::caps::{pow_sat, Caps};
use crate::walsh::unit;
use crate::{Error, Result};

/// Generating matrices `C_1..C_s`, each `n x m` over `Z_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratingMatrices {
    base: u32,
    n: usize,
    m: usize,
    /// Row-major `n x m` matrices.
    mats: Vec<Vec<u8>>,
}

impl GeneratingMatrices {
    /// `mats[j][row][col]`; every matrix must be `n x m` with `m <= n`.
    pub fn new(base: u32, n: usize, m: usize, mats: Vec<Vec<Vec<u8>>>) -> Result<Self> {
        crate::arith::check_base(base)?;
        if m == 0 || m > n {
            return Err(Error::invalid(format!("need 1 <= m <= n, got m={m} n={n}")));
        }
        if mats.is_empty() {
            return Err(Error::invalid("need at least one generating matrix"));
        }
        let mut flat = Vec::with_capacity(mats.len());
        for mat in mats {
            if mat.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: mat.len(),
                });
            }
            let mut f = Vec::with_capacity(n * m);
            for row in mat {
                if row.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: row.len(),
                    });
                }
                if let Some(&d) = row.iter().find(|&&d| d as u32 >= base) {
                    return Err(Error::InvalidDigit {
                        digit: d as u32,
                        base,
                    });
                }
                f.extend(row);
            }
            flat.push(f);
        }
        Ok(GeneratingMatrices {
            base,
            n,
            m,
            mats: flat,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// Digit precision of the points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// `log_b` of the number of points.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.mats.len()
    }

    /// Entry `(row, col)` of `C_j`, all indices 0-based.
    pub fn entry(&self, j: usize, row: usize, col: usize) -> u8 {
        self.mats[j][row * self.m + col]
    }

    pub fn num_points(&self) -> u64 {
        (self.base as u64).pow(self.m as u32)
    }

    /// Digits `y_1..y_n` of coordinate `j` of point `l`, i.e. `C_j` times
    /// the digit vector of `l`.
    pub fn point_digits(&self, l: u64, j: usize, out: &mut [u8]) {
        let b = self.base;
        let mut ld = int_digits(l, b);
        ld.resize(self.m, 0);
        let mat = &self.mats[j];
        for (row, o) in out.iter_mut().enumerate().take(self.n) {
            let r = &mat[row * self.m..(row + 1) * self.m];
            let acc: u32 = r.iter().zip(&ld).map(|(&c, &d)| c as u32 * d).sum();
            *o = (acc % b) as u8;
        }
    }

    /// `C_j^T` applied to the first `n` digits of `k`, packed as an index in
    /// `0..b^m` (digit `r` at weight `b^r`).
    pub fn syndrome(&self, j: usize, k: u64) -> u64 {
        let b = self.base as u64;
        let mut kd = int_digits(k, self.base);
        kd.truncate(self.n);
        let mat = &self.mats[j];
        let mut out = 0u64;
        let mut scale = 1u64;
        for col in 0..self.m {
            let acc: u64 = kd
                .iter()
                .enumerate()
                .map(|(row, &d)| mat[row * self.m + col] as u64 * d as u64)
                .sum();
            out += (acc % b) * scale;
            scale *= b;
        }
        out
    }

    fn check_dims(&self, k: &[u64]) -> Result<()> {
        if k.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: k.len(),
            });
        }
        Ok(())
    }

    /// Dual-net membership through `sum_j C_j^T k_j = 0` in `Z_b^m`, using
    /// the first `n` digits of each `k_j`.
    pub fn is_dual_member(&self, k: &[u64]) -> Result<bool> {
        self.check_dims(k)?;
        let acc = k
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &kj)| syndrome_add(acc, self.syndrome(j, kj), self.base));
        Ok(acc == 0)
    }

    /// Nonzero dual members with every `k_j < b^t`, lexicographic in
    /// `(k_1, ..., k_s)`.
    pub fn enumerate_dual(&self, t: u32, caps: &Caps) -> Result<Vec<Vec<u64>>> {
        let s = self.dim() as u32;
        caps.check_enumerate("dual-net box b^(s T)", pow_sat(self.base, s * t))?;
        let side = (self.base as u64).pow(t);
        // Per-coordinate syndromes, then an odometer with the last
        // coordinate moving fastest.
        let syn: Vec<Vec<u64>> = (0..self.dim())
            .map(|j| (0..side).map(|k| self.syndrome(j, k)).collect())
            .collect();
        let mut out = Vec::new();
        let mut k = vec![0u64; self.dim()];
        loop {
            let acc = k
                .iter()
                .enumerate()
                .fold(0u64, |acc, (j, &kj)| syndrome_add(acc, syn[j][kj as usize], self.base));
            if acc == 0 && k.iter().any(|&x| x != 0) {
                out.push(k.clone());
            }
            let mut pos = self.dim();
            loop {
                if pos == 0 {
                    return Ok(out);
                }
                pos -= 1;
                k[pos] += 1;
                if k[pos] < side {
                    break;
                }
                k[pos] = 0;
            }
        }
    }
}

/// Digitwise sum of two packed `Z_b^m` vectors.
pub(crate) fn syndrome_add(x: u64, y: u64, b: u32) -> u64 {
    crate::walsh::int_digitwise_add(x, y, b)
}

/// Higher-order polynomial lattice rule parameters: prime base, modulus of
/// degree `n`, generating vector with `deg q_j < n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyLatticeSpec {
    base: u32,
    m: usize,
    n: usize,
    modulus: PolyZb,
    q: Vec<PolyZb>,
    irreducible: bool,
}

impl PolyLatticeSpec {
    pub fn new(base: u32, m: usize, n: usize, modulus: PolyZb, q: Vec<PolyZb>) -> Result<Self> {
        if !crate::arith::is_prime(base) {
            return Err(Error::InvalidBase(base, "polynomial lattices need a prime base"));
        }
        if m == 0 || m > n {
            return Err(Error::invalid(format!("need 1 <= m <= n, got m={m} n={n}")));
        }
        if modulus.base() != base {
            return Err(Error::BaseMismatch(base, modulus.base()));
        }
        if modulus.degree() != Some(n) {
            return Err(Error::invalid(format!(
                "modulus must have degree n={n}, got {:?}",
                modulus.degree()
            )));
        }
        if q.is_empty() {
            return Err(Error::invalid("generating vector must be nonempty"));
        }
        for (j, qj) in q.iter().enumerate() {
            if qj.base() != base {
                return Err(Error::BaseMismatch(base, qj.base()));
            }
            if qj.degree().is_some_and(|d| d >= n) {
                return Err(Error::invalid(format!("q{} must have degree < n={n}", j + 1)));
            }
        }
        let irreducible = modulus.is_irreducible()?;
        Ok(PolyLatticeSpec {
            base,
            m,
            n,
            modulus,
            q,
            irreducible,
        })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn modulus(&self) -> &PolyZb {
        &self.modulus
    }

    pub fn q(&self) -> &[PolyZb] {
        &self.q
    }

    /// Whether the modulus is irreducible (checked at construction).
    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    /// Same modulus and sizes, different generating vector.
    pub fn with_q(&self, q: Vec<PolyZb>) -> Result<Self> {
        for (j, qj) in q.iter().enumerate() {
            if qj.base() != self.base {
                return Err(Error::BaseMismatch(self.base, qj.base()));
            }
            if qj.degree().is_some_and(|d| d >= self.n) {
                return Err(Error::invalid(format!("q{} must have degree < n={}", j + 1, self.n)));
            }
        }
        if q.is_empty() {
            return Err(Error::invalid("generating vector must be nonempty"));
        }
        Ok(PolyLatticeSpec { q, ..self.clone() })
    }

    /// Generating matrices with `c_{l,r} = t_{l+r-1}` from the Laurent
    /// coefficients of `q_j / p`.
    pub fn matrices(&self) -> GeneratingMatrices {
        let (n, m) = (self.n, self.m);
        let mats = self
            .q
            .iter()
            .map(|qj| {
                let t = laurent_expand(qj, &self.modulus, n + m - 1)
                    .expect("spec invariants guarantee a proper fraction");
                (0..n)
                    .map(|l| (0..m).map(|r| t.t(l + r + 1) as u8).collect())
                    .collect()
            })
            .collect();
        GeneratingMatrices::new(self.base, n, m, mats).expect("valid by construction")
    }

    /// Points `x_h = (v_n(h q_1 / p), ..., v_n(h q_s / p))` computed directly
    /// from the rational functions, in order of `h`.
    pub fn net_direct(&self, caps: &Caps) -> Result<DigitalNet> {
        let gen = self.matrices();
        check_net_size(&gen, caps)?;
        let (s, n) = (self.dim(), self.n);
        let npts = gen.num_points();
        let mut digits = vec![0u8; npts as usize * s * n];
        for h in 0..npts {
            let hp = PolyZb::from_index(self.base, h)?;
            for (j, qj) in self.q.iter().enumerate() {
                let num = hp.mul(qj)?.rem(&self.modulus)?;
                let t = laurent_expand(&num, &self.modulus, n)?;
                let off = (h as usize * s + j) * n;
                for (d, &c) in digits[off..off + n].iter_mut().zip(t.coeffs()) {
                    *d = c as u8;
                }
            }
        }
        Ok(DigitalNet { gen, digits })
    }

    /// Dual membership through the residue of `sum_j tr_n(k_j) q_j` modulo
    /// `p`, which must have degree below `n - m`.
    pub fn is_dual_member(&self, k: &[u64]) -> Result<bool> {
        if k.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: k.len(),
            });
        }
        let mut acc = PolyZb::zero(self.base)?;
        for (&kj, qj) in k.iter().zip(&self.q) {
            let mut d = int_digits(kj, self.base);
            d.truncate(self.n);
            let tr = PolyZb::new(self.base, d)?;
            acc = acc.add(&tr.mul(qj)?)?;
        }
        let residue = acc.rem(&self.modulus)?;
        Ok(match residue.degree() {
            None => true,
            Some(d) => d < self.n - self.m,
        })
    }
}

fn check_net_size(gen: &GeneratingMatrices, caps: &Caps) -> Result<()> {
    let digits = pow_sat(gen.base, gen.m as u32)
        .saturating_mul(gen.dim() as u128)
        .saturating_mul(gen.n as u128);
    caps.check_materialize("net coordinate digits", digits)
}

/// A digital net with all `b^m` points materialized as `n`-digit
/// coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitalNet {
    gen: GeneratingMatrices,
    /// `[point][dim][digit]`.
    digits: Vec<u8>,
}

impl DigitalNet {
    /// Materializes `y_{l,j} = C_j l` for every `l < b^m`.
    pub fn from_matrices(gen: GeneratingMatrices, caps: &Caps) -> Result<Self> {
        check_net_size(&gen, caps)?;
        let (s, n) = (gen.dim(), gen.n);
        let npts = gen.num_points();
        let mut digits = vec![0u8; npts as usize * s * n];
        for l in 0..npts {
            for j in 0..s {
                let off = (l as usize * s + j) * n;
                gen.point_digits(l, j, &mut digits[off..off + n]);
            }
        }
        Ok(DigitalNet { gen, digits })
    }

    pub fn matrices(&self) -> &GeneratingMatrices {
        &self.gen
    }

    pub fn base(&self) -> u32 {
        self.gen.base
    }

    pub fn dim(&self) -> usize {
        self.gen.dim()
    }

    pub fn precision(&self) -> usize {
        self.gen.n
    }

    pub fn num_points(&self) -> usize {
        self.gen.num_points() as usize
    }

    /// The `n` digits of coordinate `j` of point `l`.
    pub fn digits(&self, l: usize, j: usize) -> &[u8] {
        let n = self.gen.n;
        let off = (l * self.dim() + j) * n;
        &self.digits[off..off + n]
    }

    pub fn coordinate(&self, l: usize, j: usize) -> BAdicReal {
        BAdicReal::from_parts_unchecked(self.base(), self.digits(l, j).to_vec(), 0)
    }

    pub fn point(&self, l: usize) -> Vec<BAdicReal> {
        (0..self.dim()).map(|j| self.coordinate(l, j)).collect()
    }

    pub fn points(&self) -> Vec<Vec<BAdicReal>> {
        (0..self.num_points()).map(|l| self.point(l)).collect()
    }

    pub fn points_f64(&self) -> Vec<Vec<f64>> {
        self.points()
            .iter()
            .map(|p| p.iter().map(BAdicReal::to_f64).collect())
            .collect()
    }

    fn check_dims(&self, k: &[u64]) -> Result<()> {
        if k.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: k.len(),
            });
        }
        Ok(())
    }

    /// Exponent of `wal_k(x_l)` using the first `n` digits of each `k_j`.
    fn exponent(&self, l: usize, k: &[u64]) -> u32 {
        let b = self.base() as u64;
        let n = self.precision();
        let mut e = 0u64;
        for (j, &kj) in k.iter().enumerate() {
            let xd = self.digits(l, j);
            let mut kk = kj;
            for &x in xd.iter().take(n) {
                if kk == 0 {
                    break;
                }
                e += (kk % b) * x as u64;
                kk /= b;
            }
        }
        (e % b) as u32
    }

    /// Dual membership by evaluating the bilinear form against every point.
    pub fn is_dual_member_direct(&self, k: &[u64]) -> Result<bool> {
        self.check_dims(k)?;
        Ok((0..self.num_points()).all(|l| self.exponent(l, k) == 0))
    }

    /// `sum_{x in P} wal_k(x)` as counts per exponent class.
    pub fn walsh_character_sum(&self, k: &[u64]) -> Result<CharacterSum> {
        self.check_dims(k)?;
        let mut counts = vec![0u64; self.base() as usize];
        for l in 0..self.num_points() {
            counts[self.exponent(l, k) as usize] += 1;
        }
        Ok(CharacterSum {
            base: self.base(),
            counts,
        })
    }

    /// True when `x (+) y` is a point for every pair of points.
    pub fn is_closed_under_addition(&self) -> bool {
        let n = self.precision();
        let s = self.dim();
        let b = self.base();
        let mut set = std::collections::HashSet::with_capacity(self.num_points());
        for l in 0..self.num_points() {
            let off = l * s * n;
            set.insert(&self.digits[off..off + s * n]);
        }
        let mut buf = vec![0u8; s * n];
        for x in 0..self.num_points() {
            for y in 0..self.num_points() {
                let (ox, oy) = (x * s * n, y * s * n);
                for i in 0..s * n {
                    buf[i] = ((self.digits[ox + i] as u32 + self.digits[oy + i] as u32) % b) as u8;
                }
                if !set.contains(buf.as_slice()) {
                    return false;
                }
            }
        }
        true
    }
}

/// Walsh character sum over a point set, kept as exact counts per exponent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterSum {
    base: u32,
    counts: Vec<u64>,
}

impl CharacterSum {
    /// Number of points whose Walsh exponent is `e`.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn value(&self) -> Complex64 {
        self.counts
            .iter()
            .enumerate()
            .map(|(e, &c)| unit(e as u32, self.base) * c as f64)
            .sum()
    }

    /// The exact integer value when the counts form a character sum over a
    /// subgroup: `N` if every point has exponent 0, `0` if the counts are
    /// uniform over a nontrivial subgroup of `Z_b`.
    pub fn exact(&self) -> Option<u64> {
        let total: u64 = self.counts.iter().sum();
        if self.counts[0] == total {
            return Some(total);
        }
        let b = self.base as usize;
        for d in (1..b).filter(|d| b % d == 0) {
            let on_subgroup = (0..b).all(|e| (e % d == 0) == (self.counts[e] > 0));
            let uniform = (0..b).step_by(d).all(|e| self.counts[e] == self.counts[0]);
            if on_subgroup && uniform {
                return Some(0);
            }
        }
        None
    }
}
