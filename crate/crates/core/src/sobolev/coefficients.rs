//! Diagonal Walsh coefficients `K^(l, l)` of the one-dimensional kernel and
//! calibration of the decay constant `C_{alpha,b}`.
//!
//! For `l` with `a` base-b digits, `wal_l` is constant on the `L = b^a` cells
//! of width `h = b^{-a}`. The smooth part of the kernel separates into
//! `|int B_tau(x) conj(wal_l(x)) dx|^2`, and each cell integral of `B_tau`
//! is a finite Taylor sum. The `B_{2 alpha}(|x - y|)` part depends only on
//! the cell offset `Delta`, so it reduces to cell-pair integrals `I(Delta)`
//! against the aperiodic autocorrelation `A(Delta)` of the cell values.
//! Both `I(Delta)` and the cell integrals are exact polynomial identities.

use num_complex::Complex64;
use rayon::prelude::*;

use super::bernoulli::Bernoulli;
use crate::caps::pow_sat;
use crate::walsh::{mu_alpha, unit};
use crate::{Error, Result};

/// Cell-level data shared by every `l` with the same digit count.
struct Depth {
    cells: usize,
    /// `cell_int[tau-1][c] = int_{cell c} B_tau`.
    cell_int: Vec<Vec<f64>>,
    /// `pair[Delta] = int_{cell 0} int_{cell Delta} B_{2 alpha}(|x - y|)`.
    pair: Vec<f64>,
}

struct Ctx {
    alpha: usize,
    base: u32,
    bern: Bernoulli,
    fact: Vec<f64>,
    roots: Vec<Complex64>,
}

impl Ctx {
    fn new(alpha: u32, base: u32) -> Self {
        let a = alpha as usize;
        let mut fact = vec![1.0f64; 2 * a + 3];
        for i in 1..fact.len() {
            fact[i] = fact[i - 1] * i as f64;
        }
        Ctx {
            alpha: a,
            base,
            bern: Bernoulli::new(2 * a + 2),
            fact,
            roots: (0..base).map(|e| unit(e, base)).collect(),
        }
    }

    fn depth(&self, digits: u32) -> Depth {
        let cells = (self.base as usize).pow(digits);
        let h = 1.0 / cells as f64;
        let a = self.alpha;
        let f = &self.fact;
        // int_x^{x+h} B_tau = sum_{j=1}^{tau+1} h^j/j! * tau!/(tau+1-j)! * B_{tau+1-j}(x)
        let cell_int = (1..=a)
            .map(|tau| {
                (0..cells)
                    .map(|c| {
                        let x = c as f64 * h;
                        (1..=tau + 1)
                            .map(|j| {
                                h.powi(j as i32) / f[j] * f[tau] / f[tau + 1 - j]
                                    * self.bern.eval(tau + 1 - j, x)
                            })
                            .sum()
                    })
                    .collect()
            })
            .collect();
        // With G'' = B_{2a}: I(Delta) = G(D+h) - 2G(D) + G(D-h) at D = Delta h
        // for Delta >= 1, and 2 (G(h) - G(0) - h G'(0)) for Delta = 0.
        let two_a = 2 * a;
        let mut pair = Vec::with_capacity(cells);
        pair.push(
            2.0 * (2..=two_a + 2)
                .map(|j| h.powi(j as i32) / f[j] * f[two_a] / f[two_a + 2 - j] * self.bern.number(two_a + 2 - j))
                .sum::<f64>(),
        );
        for delta in 1..cells {
            let d = delta as f64 * h;
            pair.push(
                2.0 * (1..=a + 1)
                    .map(|j| {
                        h.powi(2 * j as i32) / f[2 * j] * f[two_a] / f[two_a + 2 - 2 * j]
                            * self.bern.eval(two_a + 2 - 2 * j, d)
                    })
                    .sum::<f64>(),
            );
        }
        Depth {
            cells,
            cell_int,
            pair,
        }
    }

    /// `K^(l, l)` for `l` with exactly `digits` base-b digits (`l = 0` uses
    /// zero digits).
    fn coefficient(&self, l: u64, digits: u32, depth: &Depth) -> f64 {
        let b = self.base as usize;
        let kappa: Vec<usize> = {
            let mut v = Vec::with_capacity(digits as usize);
            let mut k = l;
            for _ in 0..digits {
                v.push((k % b as u64) as usize);
                k /= b as u64;
            }
            v
        };
        // Cell exponents, cell c = sum_i xi_i b^{a-i} with xi_1 outermost.
        let mut expo = vec![0usize];
        for &k in &kappa {
            let mut next = Vec::with_capacity(expo.len() * b);
            for &e in &expo {
                for xi in 0..b {
                    next.push((e + k * xi) % b);
                }
            }
            expo = next;
        }
        let smooth: f64 = (0..self.alpha)
            .map(|t| {
                let beta: Complex64 = expo
                    .iter()
                    .zip(&depth.cell_int[t])
                    .map(|(&e, &ci)| self.roots[(b - e) % b] * ci)
                    .sum();
                beta.norm_sqr() / (self.fact[t + 1] * self.fact[t + 1])
            })
            .sum();

        // Autocorrelation of the Kronecker product, innermost digit first.
        let mut acf: Vec<Complex64> = vec![Complex64::new(1.0, 0.0)];
        for &k in kappa.iter().rev() {
            let q_len = acf.len();
            let outer = |q: usize| -> Complex64 {
                if q >= b {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.roots[(k * q) % b] * (b - q) as f64
                }
            };
            let mut next = Vec::with_capacity(b * q_len);
            for q in 0..b {
                let (aq, aq1) = (outer(q), outer(q + 1));
                for rho in 0..q_len {
                    let mut v = aq * acf[rho];
                    if rho > 0 {
                        v += aq1 * acf[q_len - rho].conj();
                    }
                    next.push(v);
                }
            }
            acf = next;
        }
        debug_assert_eq!(acf.len(), depth.cells);
        let mut tail = depth.pair[0] * depth.cells as f64;
        for delta in 1..depth.cells {
            tail += 2.0 * depth.pair[delta] * acf[delta].re;
        }
        let two_a = 2 * self.alpha;
        let sign = if self.alpha % 2 == 1 { 1.0 } else { -1.0 };
        smooth + sign * tail / self.fact[two_a]
    }
}

fn digit_count(mut l: u64, b: u32) -> u32 {
    let mut d = 0;
    while l > 0 {
        l /= b as u64;
        d += 1;
    }
    d
}

/// `K^_{alpha,(1)}(l, l) = int int K(x, y) conj(wal_l(x)) wal_l(y) dx dy`.
pub fn kernel_walsh_diag(alpha: u32, base: u32, l: u64) -> Result<f64> {
    check(alpha, base)?;
    let ctx = Ctx::new(alpha, base);
    let d = digit_count(l, base);
    Ok(ctx.coefficient(l, d, &ctx.depth(d)))
}

fn check(alpha: u32, base: u32) -> Result<()> {
    if alpha == 0 {
        return Err(Error::invalid("alpha must be at least 1"));
    }
    crate::arith::check_base(base)
}

/// `K^(l, l)` for every `l < b^depth`, in index order.
pub fn kernel_walsh_diag_table(alpha: u32, base: u32, depth: u32) -> Result<Vec<f64>> {
    check(alpha, base)?;
    let total = pow_sat(base, depth);
    if total > 1 << 26 {
        return Err(Error::Capacity {
            what: "Walsh coefficient table",
            requested: total,
            cap: 1 << 26,
        });
    }
    let ctx = Ctx::new(alpha, base);
    let mut out = vec![0.0f64; total as usize];
    let b = base as u64;
    for d in 1..=depth {
        let dep = ctx.depth(d);
        let (lo, hi) = (b.pow(d - 1), b.pow(d));
        let vals: Vec<f64> = (lo..hi)
            .into_par_iter()
            .map(|l| ctx.coefficient(l, d, &dep))
            .collect();
        out[lo as usize..hi as usize].copy_from_slice(&vals);
    }
    Ok(out)
}

/// Scan depth used when calibrating `C_{alpha,b}`: 8 digits, reduced for
/// large bases so the `b^{2D}` cost stays bounded.
pub fn default_calibration_depth(base: u32) -> u32 {
    let mut d = 8;
    while d > 2 && pow_sat(base, 2 * d) > 250_000_000 {
        d -= 1;
    }
    d
}

/// Result of a calibration scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// `1.1 * max_ratio`.
    pub c_walsh: f64,
    /// `max_{1 <= k < b^depth} |K^(k, k)| b^{2 mu_alpha(k)}`.
    pub max_ratio: f64,
    /// Index attaining the maximum.
    pub argmax: u64,
    pub depth: u32,
}

/// Smallest `C` with `|K^(k, k)| <= C b^{-2 mu_alpha(k)}` over
/// `1 <= k < b^depth`, rounded up by 10%.
pub fn calibrate_c_walsh(alpha: u32, base: u32, depth: u32) -> Result<Calibration> {
    if depth == 0 {
        return Err(Error::invalid("calibration depth must be at least 1"));
    }
    let table = kernel_walsh_diag_table(alpha, base, depth)?;
    let bf = base as f64;
    let (mut best, mut arg) = (0.0f64, 1u64);
    for (k, &v) in table.iter().enumerate().skip(1) {
        let r = v.abs() * bf.powi(2 * mu_alpha(k as u64, alpha, base) as i32);
        if r > best {
            best = r;
            arg = k as u64;
        }
    }
    Ok(Calibration {
        c_walsh: 1.1 * best,
        max_ratio: best,
        argmax: arg,
        depth,
    })
}
