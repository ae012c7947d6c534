//! Sums over the dual net of a digital net: the exact error formula for
//! folded shifted nets and the figure of merit `B_{alpha,gamma}`.
//!
//! Both have the form `sum_{u nonempty} gamma_u sum_{k_u} prod_{j in u} w(k_j)`
//! over `k_u in E_b^{|u|}` with `(k_u, 0)` in the dual net. Membership only
//! depends on the syndromes `C_j^T k_j in Z_b^m`, so each coordinate is
//! reduced to a histogram `D_j[z]` of weights per syndrome and the subset
//! sum becomes a convolution over `Z_b^m` evaluated at 0. All terms are
//! nonnegative, so no cancellation occurs.

use super::coefficients::kernel_walsh_diag_table;
use super::constants::a_constants;
use super::{KernelParams, Weights};
use crate::caps::{pow_sat, Caps};
use crate::nets::{syndrome_add, GeneratingMatrices};
use crate::walsh::{in_eb, mu_alpha};
use crate::{Error, Result};

/// Truncated value of the bound `B_{alpha,gamma}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOfMerit {
    /// Sum over dual members with every `k_j < b^truncation`.
    pub value: f64,
    pub truncation: u32,
    pub c_walsh: f64,
    /// Heuristic size of the omitted terms: the subset sum with one
    /// coordinate replaced by the `b^{-4T}` multiples-of-`b^T` estimate
    /// (`lambda = 1`). `None` when `alpha < 2`.
    pub tail_estimate: Option<f64>,
}

/// Syndromes of every `k < b^t` for coordinate `j`.
fn syndrome_table(gen: &GeneratingMatrices, j: usize, t: u32) -> Vec<u64> {
    let b = gen.base();
    let b64 = b as u64;
    let side = b64.pow(t) as usize;
    let mut out = vec![0u64; side];
    // Rows of C_j as packed Z_b^m vectors, scaled by each digit value.
    let rows: Vec<Vec<u64>> = (0..t as usize)
        .map(|r| {
            let packed = if r < gen.n() {
                (0..gen.m()).rev().fold(0u64, |acc, c| acc * b64 + gen.entry(j, r, c) as u64)
            } else {
                0
            };
            let mut mult = vec![0u64; b as usize];
            for d in 1..b as usize {
                mult[d] = syndrome_add(mult[d - 1], packed, b);
            }
            mult
        })
        .collect();
    // syn(k) = syn(k - top * b^r) + top * row_r, with r the top digit index.
    let mut scale = 1usize;
    for row in rows.iter() {
        let next = scale * b as usize;
        for k in scale..next.min(side) {
            let top = k / scale;
            out[k] = syndrome_add(out[k - top * scale], row[top], b);
        }
        scale = next;
    }
    out
}

/// Weight histogram per syndrome for one coordinate.
fn histogram(syn: &[u64], weight: &[f64], size: usize) -> Vec<f64> {
    let mut h = vec![0.0; size];
    for (k, (&z, &w)) in syn.iter().zip(weight).enumerate() {
        if k > 0 && w != 0.0 {
            h[z as usize] += w;
        }
    }
    h
}

/// `(f * g)[z] = sum_{x (+) y = z} f[x] g[y]` over `Z_b^m`.
fn convolve(f: &[f64], g: &[f64], b: u32) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    let gnz: Vec<(usize, f64)> = g.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
    for (x, &fx) in f.iter().enumerate() {
        if fx == 0.0 {
            continue;
        }
        for &(y, gy) in &gnz {
            let z = if b == 2 { x ^ y } else { syndrome_add(x as u64, y as u64, b) as usize };
            out[z] += fx * gy;
        }
    }
    out
}

/// `sum_{u nonempty} gamma_u [conv_{j in u} D_j](0)`.
fn subset_convolution_at_zero(hists: &[Vec<f64>], weights: &Weights, b: u32) -> f64 {
    let size = hists[0].len();
    if let Some(g) = weights.product_gammas() {
        // G tracks prod_j (delta + gamma_j D_j) - delta.
        let mut acc = vec![0.0; size];
        for (d, &gj) in hists.iter().zip(g) {
            if gj == 0.0 {
                continue;
            }
            let conv = convolve(&acc, d, b);
            for z in 0..size {
                acc[z] += gj * (d[z] + conv[z]);
            }
        }
        return acc[0];
    }
    fn dfs(j: usize, mask: usize, cur: &[f64], hists: &[Vec<f64>], weights: &Weights, b: u32) -> f64 {
        if j == hists.len() {
            return if mask == 0 { 0.0 } else { weights.gamma(mask) * cur[0] };
        }
        let skip = dfs(j + 1, mask, cur, hists, weights, b);
        let with = convolve(cur, &hists[j], b);
        skip + dfs(j + 1, mask | 1 << j, &with, hists, weights, b)
    }
    let mut delta = vec![0.0; size];
    delta[0] = 1.0;
    dfs(0, 0, &delta, hists, weights, b)
}

fn check_inputs(gen: &GeneratingMatrices, params: &KernelParams, weights: &Weights, t: u32, caps: &Caps) -> Result<()> {
    if gen.base() != params.base {
        return Err(Error::BaseMismatch(params.base, gen.base()));
    }
    if gen.dim() != weights.dim() {
        return Err(Error::DimensionMismatch {
            expected: weights.dim(),
            got: gen.dim(),
        });
    }
    if t == 0 {
        return Err(Error::invalid("truncation must be at least 1"));
    }
    caps.check_enumerate(
        "per-coordinate k range b^T times s",
        pow_sat(gen.base(), t).saturating_mul(gen.dim() as u128),
    )?;
    caps.check_enumerate("syndrome convolution b^(2m)", pow_sat(gen.base(), 2 * gen.m() as u32))
}

fn dual_sum(gen: &GeneratingMatrices, weights: &Weights, t: u32, coord_weight: &[f64]) -> f64 {
    let size = (gen.base() as u64).pow(gen.m() as u32) as usize;
    let hists: Vec<Vec<f64>> = (0..gen.dim())
        .map(|j| histogram(&syndrome_table(gen, j, t), coord_weight, size))
        .collect();
    subset_convolution_at_zero(&hists, weights, gen.base())
}

/// Mean square worst-case error of the folded shifted net, summed over dual
/// members with every `k_j < b^t`:
/// `sum gamma_u prod_{j in u} K^(floor(k_j/b), floor(k_j/b))`.
pub fn dual_net_wce(
    gen: &GeneratingMatrices,
    params: &KernelParams,
    weights: &Weights,
    t: u32,
    caps: &Caps,
) -> Result<f64> {
    check_inputs(gen, params, weights, t, caps)?;
    let b = params.base;
    let coeffs = kernel_walsh_diag_table(params.alpha, b, t - 1)?;
    let w: Vec<f64> = (0..(b as u64).pow(t))
        .map(|k| if in_eb(k, b) { coeffs[(k / b as u64) as usize] } else { 0.0 })
        .collect();
    Ok(dual_sum(gen, weights, t, &w))
}

/// The truncated bound
/// `sum_{u nonempty} gamma_u C^{|u|} sum_{k_u in E_b^{|u|}, (k_u, 0) dual} b^{-2 mu_alpha(floor(k_u/b))}`.
pub fn bound_b(
    gen: &GeneratingMatrices,
    params: &KernelParams,
    weights: &Weights,
    t: u32,
    caps: &Caps,
) -> Result<FigureOfMerit> {
    check_inputs(gen, params, weights, t, caps)?;
    let b = params.base;
    let bf = b as f64;
    let c = params.c_walsh;
    let w: Vec<f64> = (0..(b as u64).pow(t))
        .map(|k| {
            if in_eb(k, b) {
                c * bf.powi(-2 * mu_alpha(k / b as u64, params.alpha, b) as i32)
            } else {
                0.0
            }
        })
        .collect();
    let value = dual_sum(gen, weights, t, &w);
    let tail_estimate = a_constants(params.alpha, b, 1.0).ok().map(|(a1, a2)| {
        // Terms with one coordinate at or beyond b^T: |u| c^{|u|} A1^{|u|-1} A2 b^{-4T}.
        let one = a2 * bf.powi(-4 * t as i32);
        tail_weight(weights, c, a1) * one
    });
    Ok(FigureOfMerit {
        value,
        truncation: t,
        c_walsh: c,
        tail_estimate,
    })
}

/// `sum_{u nonempty} gamma_u |u| c^{|u|} a1^{|u|-1}`.
fn tail_weight(weights: &Weights, c: f64, a1: f64) -> f64 {
    match weights.product_gammas() {
        // Derivative of prod_j (1 + gamma_j c x) at x = a1.
        Some(g) => {
            let factors: Vec<f64> = g.iter().map(|&gj| 1.0 + gj * c * a1).collect();
            (0..g.len())
                .map(|j| {
                    g[j] * c * factors.iter().enumerate().filter(|(i, _)| *i != j).map(|(_, f)| f).product::<f64>()
                })
                .sum()
        }
        None => (1..1usize << weights.dim())
            .map(|u| {
                let k = u.count_ones() as i32;
                weights.gamma(u) * k as f64 * c.powi(k) * a1.powi(k - 1)
            })
            .sum(),
    }
}
