//! Unanchored Sobolev spaces of smoothness `alpha`: kernel, worst-case
//! errors, the dual-net error formula, the figure of merit and the
//! constants of the existence bound.

mod bernoulli;
mod coefficients;
mod constants;
mod dual;

pub use bernoulli::{bernoulli_numbers, bernoulli_poly_coeffs, bernoulli_polynomial, Bernoulli};
pub use coefficients::{
    calibrate_c_walsh, default_calibration_depth, kernel_walsh_diag, kernel_walsh_diag_table, Calibration,
};
pub use constants::{
    a_constants, default_lambda_grid, eb_weight_sum_multiples_truncated, eb_weight_sum_truncated,
    existence_bound, existence_bound_opt, info_complexity_bound, n_b_count,
};
pub use dual::{bound_b, dual_net_wce, FigureOfMerit};

use rayon::prelude::*;

use crate::nets::DigitalNet;
use crate::transforms::{default_shift_precision, fold_shifted_values, sample_shift_from, RngSpec};
use crate::{Error, Result};

/// Largest dimension accepted for explicit weight tables.
pub const MAX_TABLE_DIM: usize = 16;

#[derive(Debug, Clone, PartialEq)]
enum WeightsRepr {
    /// `gamma_u = prod_{j in u} gamma_j` for nonempty `u`.
    Product(Vec<f64>),
    /// `gamma_u` indexed by the bitmask of `u`; entry 0 mirrors `gamma_empty`.
    Table(Vec<f64>),
}

/// Weights `gamma_u` for `u` a subset of `{1..s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    dim: usize,
    gamma_empty: f64,
    repr: WeightsRepr,
}

fn check_gamma(g: f64) -> Result<()> {
    if !(g.is_finite() && g >= 0.0) {
        return Err(Error::invalid(format!("weights must be finite and nonnegative, got {g}")));
    }
    Ok(())
}

impl Weights {
    /// Product weights with `gamma_empty = 1`.
    pub fn product(gammas: Vec<f64>) -> Result<Self> {
        Weights::product_with_empty(gammas, 1.0)
    }

    /// Product weights for nonempty `u` and an explicit `gamma_empty`.
    pub fn product_with_empty(gammas: Vec<f64>, gamma_empty: f64) -> Result<Self> {
        if gammas.is_empty() {
            return Err(Error::invalid("weights need dimension at least 1"));
        }
        gammas.iter().try_for_each(|&g| check_gamma(g))?;
        check_gamma(gamma_empty)?;
        if gamma_empty == 0.0 {
            return Err(Error::invalid("gamma_empty must be positive"));
        }
        Ok(Weights {
            dim: gammas.len(),
            gamma_empty,
            repr: WeightsRepr::Product(gammas),
        })
    }

    /// Explicit table of `2^s` values indexed by subset bitmask (bit `j-1`
    /// for coordinate `j`). Entry 0 is `gamma_empty`.
    pub fn table(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim > MAX_TABLE_DIM {
            return Err(Error::invalid(format!(
                "weight tables need 1 <= s <= {MAX_TABLE_DIM}, got {dim}"
            )));
        }
        if values.len() != 1 << dim {
            return Err(Error::DimensionMismatch {
                expected: 1 << dim,
                got: values.len(),
            });
        }
        values.iter().try_for_each(|&g| check_gamma(g))?;
        if values[0] == 0.0 {
            return Err(Error::invalid("gamma_empty must be positive"));
        }
        Ok(Weights {
            dim,
            gamma_empty: values[0],
            repr: WeightsRepr::Table(values),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gamma_empty(&self) -> f64 {
        self.gamma_empty
    }

    /// Per-coordinate weights when the representation is a product.
    pub fn product_gammas(&self) -> Option<&[f64]> {
        match &self.repr {
            WeightsRepr::Product(g) => Some(g),
            WeightsRepr::Table(_) => None,
        }
    }

    /// `gamma_u` for the subset with bitmask `mask`.
    pub fn gamma(&self, mask: usize) -> f64 {
        if mask == 0 {
            return self.gamma_empty;
        }
        match &self.repr {
            WeightsRepr::Product(g) => g
                .iter()
                .enumerate()
                .filter(|(j, _)| mask >> j & 1 == 1)
                .map(|(_, &x)| x)
                .product(),
            WeightsRepr::Table(t) => t[mask],
        }
    }

    /// Weights of the first `dim` coordinates: `gamma_u` for `u` inside
    /// `{1..dim}`.
    pub fn leading(&self, dim: usize) -> Result<Self> {
        if dim == 0 || dim > self.dim {
            return Err(Error::invalid(format!("cannot restrict {} weights to {dim}", self.dim)));
        }
        match &self.repr {
            WeightsRepr::Product(g) => Weights::product_with_empty(g[..dim].to_vec(), self.gamma_empty),
            WeightsRepr::Table(t) => Weights::table(dim, t[..1 << dim].to_vec()),
        }
    }

    /// The same weights as an explicit table (requires `s <= 16`).
    pub fn to_table(&self) -> Result<Self> {
        if self.dim > MAX_TABLE_DIM {
            return Err(Error::invalid("too many coordinates for a weight table"));
        }
        Weights::table(self.dim, (0..1usize << self.dim).map(|u| self.gamma(u)).collect())
    }

    /// `sum_{u nonempty} gamma_u^lambda c^{|u|}`.
    pub(crate) fn subset_power_sum(&self, lambda: f64, c: f64) -> f64 {
        match &self.repr {
            WeightsRepr::Product(g) => {
                // prod_j (1 + g_j^lambda c) - 1, accumulated without the 1.
                g.iter().fold(0.0, |d, &gj| {
                    let t = gj.powf(lambda) * c;
                    d + t + d * t
                })
            }
            WeightsRepr::Table(t) => (1..t.len())
                .map(|u| t[u].powf(lambda) * c.powi(u.count_ones() as i32))
                .sum(),
        }
    }
}

/// Smoothness, base and the Walsh-decay constant `C_{alpha,b}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub alpha: u32,
    pub base: u32,
    pub c_walsh: f64,
}

impl KernelParams {
    pub fn new(alpha: u32, base: u32, c_walsh: f64) -> Result<Self> {
        if alpha == 0 {
            return Err(Error::invalid("alpha must be at least 1"));
        }
        crate::arith::check_base(base)?;
        if !(c_walsh.is_finite() && c_walsh > 0.0) {
            return Err(Error::invalid(format!("C_walsh must be positive, got {c_walsh}")));
        }
        Ok(KernelParams { alpha, base, c_walsh })
    }

    /// Parameters with `C_walsh` calibrated from the kernel's own Walsh
    /// coefficients.
    pub fn calibrated(alpha: u32, base: u32) -> Result<Self> {
        let cal = calibrate_c_walsh(alpha, base, default_calibration_depth(base))?;
        KernelParams::new(alpha, base, cal.c_walsh)
    }
}

/// One-dimensional kernel `K_{alpha,(1)}` with precomputed Bernoulli data.
#[derive(Debug, Clone)]
pub struct Kernel1d {
    alpha: usize,
    bern: Bernoulli,
    inv_fact: Vec<f64>,
    tail_scale: f64,
}

impl Kernel1d {
    pub fn new(alpha: u32) -> Self {
        let a = alpha as usize;
        let bern = Bernoulli::new(2 * a);
        let mut fact = vec![1.0f64; 2 * a + 1];
        for i in 1..=2 * a {
            fact[i] = fact[i - 1] * i as f64;
        }
        let sign = if a % 2 == 1 { 1.0 } else { -1.0 };
        Kernel1d {
            alpha: a,
            bern,
            inv_fact: fact.iter().map(|f| 1.0 / f).collect(),
            tail_scale: sign * (1.0 / fact[2 * a]),
        }
    }

    /// `B_tau(x) / tau!` for `tau = 1..alpha`.
    fn features(&self, x: f64, out: &mut [f64]) {
        for (t, o) in out.iter_mut().enumerate() {
            *o = self.bern.eval(t + 1, x) * self.inv_fact[t + 1];
        }
    }

    fn eval_features(&self, fx: &[f64], fy: &[f64], x: f64, y: f64) -> f64 {
        let smooth: f64 = fx.iter().zip(fy).map(|(a, b)| a * b).sum();
        smooth + self.tail_scale * self.bern.eval(2 * self.alpha, (x - y).abs())
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut fx = vec![0.0; self.alpha];
        let mut fy = vec![0.0; self.alpha];
        self.features(x, &mut fx);
        self.features(y, &mut fy);
        self.eval_features(&fx, &fy, x, y)
    }
}

/// `K_{alpha,(1)}(x, y)`.
pub fn kernel_1d(alpha: u32, x: f64, y: f64) -> f64 {
    Kernel1d::new(alpha).eval(x, y)
}

/// `sum_{u nonempty} gamma_u prod_{j in u} k_j`.
fn weighted_subset_sum(weights: &Weights, k: &[f64], scratch: &mut Vec<f64>) -> f64 {
    match &weights.repr {
        WeightsRepr::Product(g) => g.iter().zip(k).fold(0.0, |d, (&gj, &kj)| {
            let t = gj * kj;
            d + t + d * t
        }),
        WeightsRepr::Table(t) => {
            scratch.clear();
            scratch.resize(t.len(), 0.0);
            scratch[0] = 1.0;
            let mut acc = 0.0;
            for u in 1..t.len() {
                let low = u.trailing_zeros() as usize;
                scratch[u] = scratch[u & (u - 1)] * k[low];
                acc += t[u] * scratch[u];
            }
            acc
        }
    }
}

fn check_point_dims(weights: &Weights, x: &[f64], y: &[f64]) -> Result<()> {
    for v in [x, y] {
        if v.len() != weights.dim() {
            return Err(Error::DimensionMismatch {
                expected: weights.dim(),
                got: v.len(),
            });
        }
    }
    Ok(())
}

/// `K_{alpha,gamma}(x, y) = sum_u gamma_u prod_{j in u} K_{alpha,(1)}(x_j, y_j)`.
pub fn kernel(params: &KernelParams, weights: &Weights, x: &[f64], y: &[f64]) -> Result<f64> {
    check_point_dims(weights, x, y)?;
    let k1 = Kernel1d::new(params.alpha);
    let k: Vec<f64> = x.iter().zip(y).map(|(&a, &b)| k1.eval(a, b)).collect();
    Ok(weights.gamma_empty() + weighted_subset_sum(weights, &k, &mut Vec::new()))
}

/// Compensated running sum.
#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Square worst-case error of the equal-weight rule on `points`:
/// `(1/N^2) sum_{x,y} K(x, y) - gamma_empty`.
///
/// Rows are summed in parallel; each row uses a compensated sum and rows
/// are combined in index order, so the result does not depend on the
/// thread count.
pub fn wce_squared(points: &[Vec<f64>], params: &KernelParams, weights: &Weights) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::invalid("worst-case error needs at least one point"));
    }
    let s = weights.dim();
    for p in points {
        if p.len() != s {
            return Err(Error::DimensionMismatch { expected: s, got: p.len() });
        }
        if let Some(&x) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::OutOfRange(x));
        }
    }
    let k1 = Kernel1d::new(params.alpha);
    let a = params.alpha as usize;
    let feats: Vec<f64> = points
        .iter()
        .flat_map(|p| {
            p.iter().flat_map(|&x| {
                let mut f = vec![0.0; a];
                k1.features(x, &mut f);
                f
            })
        })
        .collect();
    let n = points.len();
    let feat = |i: usize, j: usize| &feats[(i * s + j) * a..(i * s + j + 1) * a];
    // Row i covers the pairs (i, i) and (i, l) for l > i, the latter counted twice.
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut k = vec![0.0; s];
            let mut scratch = Vec::new();
            let mut acc = Neumaier::default();
            for l in i..n {
                for (j, kj) in k.iter_mut().enumerate() {
                    *kj = k1.eval_features(feat(i, j), feat(l, j), points[i][j], points[l][j]);
                }
                let v = weighted_subset_sum(weights, &k, &mut scratch);
                acc.add(if l == i { v } else { 2.0 * v });
            }
            acc.value()
        })
        .collect();
    let mut total = Neumaier::default();
    rows.iter().for_each(|&r| total.add(r));
    Ok(total.value() / (n as f64 * n as f64))
}

/// Monte Carlo estimate of the mean square worst-case error over random
/// digital shifts followed by the tent transformation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WceEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub replicates: usize,
}

/// Averages `wce_squared(phi_b(P (+) sigma))` over `replicates` shifts drawn
/// in sequence from `rng`. `shift_precision` defaults to `n + alpha + 2`.
pub fn mean_wce_estimate(
    net: &DigitalNet,
    params: &KernelParams,
    weights: &Weights,
    replicates: usize,
    rng: &RngSpec,
    shift_precision: Option<usize>,
) -> Result<WceEstimate> {
    if replicates < 2 {
        return Err(Error::invalid("need at least two replicates"));
    }
    if net.base() != params.base {
        return Err(Error::BaseMismatch(params.base, net.base()));
    }
    if net.dim() != weights.dim() {
        return Err(Error::DimensionMismatch {
            expected: weights.dim(),
            got: net.dim(),
        });
    }
    let p = shift_precision.unwrap_or_else(|| default_shift_precision(net.precision(), params.alpha));
    let mut gen = rng.rng();
    let shifts = (0..replicates)
        .map(|_| sample_shift_from(&mut gen, net.dim(), net.base(), p))
        .collect::<Result<Vec<_>>>()?;
    let values = shifts
        .par_iter()
        .map(|sigma| {
            let pts = fold_shifted_values(net, sigma)?;
            wce_squared(&pts, params, weights)
        })
        .collect::<Result<Vec<f64>>>()?;
    let r = replicates as f64;
    let mean = values.iter().sum::<f64>() / r;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
    Ok(WceEstimate {
        mean,
        std_error: (var / r).sqrt(),
        replicates,
    })
}
