//! Randomized convergence experiments and least-squares rate fits.

use crate::arith::PolyZb;
use crate::caps::Caps;
use crate::nets::DigitalNet;
use crate::search::{random_search, SearchConfig};
use crate::sobolev::{mean_wce_estimate, KernelParams, Weights};
use crate::transforms::{default_shift_precision, fold_shifted_values, sample_shift_from, RngSpec};
use crate::{Error, Result};

/// What each replicate measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrand {
    /// The square worst-case error itself.
    Kernel,
    /// Squared integration error of `prod_j (1 + c x_j^alpha e^{x_j})`.
    Smooth { c: f64 },
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub base: u32,
    pub alpha: u32,
    pub m_min: usize,
    pub m_max: usize,
    pub weights: Weights,
    pub replicates: usize,
    /// Random-search candidates per `m`.
    pub candidates: usize,
    pub integrand: Integrand,
    pub rng: RngSpec,
    /// `n = alpha m` instead of `ceil(alpha m / 2)`.
    pub classic: bool,
    /// Digit budget of the bound; defaults to `n + alpha + 2`.
    pub truncation: Option<u32>,
    /// Defaults to the calibrated constant.
    pub c_walsh: Option<f64>,
    pub shift_precision: Option<usize>,
}

impl ExperimentPlan {
    /// Plan with the documented defaults: 32 candidates, 128 replicates,
    /// kernel integrand, seed 1.
    pub fn new(base: u32, alpha: u32, m_min: usize, m_max: usize, weights: Weights) -> Self {
        ExperimentPlan {
            base,
            alpha,
            m_min,
            m_max,
            weights,
            replicates: 128,
            candidates: 32,
            integrand: Integrand::Kernel,
            rng: RngSpec::new(1, 0),
            classic: false,
            truncation: None,
            c_walsh: None,
            shift_precision: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_min == 0 || self.m_min > self.m_max {
            return Err(Error::invalid("m range must be nonempty and ascending from 1"));
        }
        if self.replicates < 2 {
            return Err(Error::invalid("need at least two replicates"));
        }
        if self.candidates == 0 {
            return Err(Error::invalid("need at least one candidate"));
        }
        if !crate::arith::is_prime(self.base) {
            return Err(Error::InvalidBase(self.base, "polynomial lattices need a prime base"));
        }
        if self.alpha == 0 {
            return Err(Error::invalid("alpha must be at least 1"));
        }
        Ok(())
    }

    /// Modulus degree for `m`.
    pub fn precision(&self, m: usize) -> usize {
        let a = self.alpha as usize;
        if self.classic {
            a * m
        } else {
            (a * m).div_ceil(2)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub m: usize,
    pub n: usize,
    pub points: u64,
    /// `sqrt(max(mean, 0))`.
    pub rmse: f64,
    /// Standard error of the mean-square estimate.
    pub std_error: f64,
    pub mean_square: f64,
    /// Truncated bound of the chosen rule.
    pub bound: f64,
    /// Least-squares slope of `log_b rmse` over the rows so far.
    pub slope_so_far: Option<f64>,
    /// The mean-square estimate was negative and clamped to 0.
    pub clamped: bool,
    pub q: Vec<PolyZb>,
}

/// `int_0^1 x^alpha e^x dx` by composite Simpson (error far below 1e-12).
pub fn smooth_factor_integral(alpha: u32) -> f64 {
    let n = 4000;
    let h = 1.0 / n as f64;
    let f = |x: f64| x.powi(alpha as i32) * x.exp();
    let mut s = f(0.0) + f(1.0);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

fn smooth_mean_square(
    net: &DigitalNet,
    alpha: u32,
    c: f64,
    replicates: usize,
    rng: &RngSpec,
    precision: usize,
) -> Result<(f64, f64)> {
    let exact = (1.0 + c * smooth_factor_integral(alpha)).powi(net.dim() as i32);
    let mut gen = rng.rng();
    let mut errs = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let sigma = sample_shift_from(&mut gen, net.dim(), net.base(), precision)?;
        let pts = fold_shifted_values(net, &sigma)?;
        let q = pts
            .iter()
            .map(|p| p.iter().map(|&x| 1.0 + c * x.powi(alpha as i32) * x.exp()).product::<f64>())
            .sum::<f64>()
            / pts.len() as f64;
        errs.push((q - exact).powi(2));
    }
    let r = replicates as f64;
    let mean = errs.iter().sum::<f64>() / r;
    let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (r - 1.0);
    Ok((mean, (var / r).sqrt()))
}

/// Runs the plan row by row. `on_row` sees each row as soon as it is done.
pub fn run_experiment(plan: &ExperimentPlan, caps: &Caps, mut on_row: impl FnMut(&ExperimentRow)) -> Result<Vec<ExperimentRow>> {
    plan.validate()?;
    let c_walsh = match plan.c_walsh {
        Some(c) => c,
        None => KernelParams::calibrated(plan.alpha, plan.base)?.c_walsh,
    };
    let params = KernelParams::new(plan.alpha, plan.base, c_walsh)?;
    let mut rows: Vec<ExperimentRow> = Vec::new();
    for m in plan.m_min..=plan.m_max {
        let n = plan.precision(m);
        let cfg = SearchConfig {
            base: plan.base,
            m,
            n,
            modulus: PolyZb::first_irreducible(plan.base, n)?,
            dim: plan.weights.dim(),
            params,
            weights: plan.weights.clone(),
            truncation: plan.truncation.unwrap_or((n + plan.alpha as usize + 2) as u32),
            caps: *caps,
        };
        let stream = 2 * m as u64;
        let best = random_search(&cfg, plan.candidates, &RngSpec::new(plan.rng.seed, plan.rng.stream + stream))?
            .swap_remove(0);
        let spec = crate::nets::PolyLatticeSpec::new(plan.base, m, n, cfg.modulus.clone(), best.q.clone())?;
        let net = DigitalNet::from_matrices(spec.matrices(), caps)?;
        let mc_rng = RngSpec::new(plan.rng.seed, plan.rng.stream + stream + 1);
        let precision = plan
            .shift_precision
            .unwrap_or_else(|| default_shift_precision(n, plan.alpha));
        let (mean, se) = match plan.integrand {
            Integrand::Kernel => {
                let est = mean_wce_estimate(&net, &params, &plan.weights, plan.replicates, &mc_rng, Some(precision))?;
                (est.mean, est.std_error)
            }
            Integrand::Smooth { c } => smooth_mean_square(&net, plan.alpha, c, plan.replicates, &mc_rng, precision)?,
        };
        let clamped = mean < 0.0;
        let rmse = mean.max(0.0).sqrt();
        let mut row = ExperimentRow {
            m,
            n,
            points: net.num_points() as u64,
            rmse,
            std_error: se,
            mean_square: mean,
            bound: best.merit.value,
            slope_so_far: None,
            clamped,
            q: best.q,
        };
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .chain(std::iter::once(&row))
            .filter(|r| r.rmse > 0.0)
            .map(|r| (r.m as f64, r.rmse))
            .collect();
        row.slope_so_far = ols(&pts, plan.base).ok().map(|f| f.slope);
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}

/// Least-squares line through `(m, log_b rmse)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

fn ols(rows: &[(f64, f64)], base: u32) -> Result<ConvergenceFit> {
    if rows.len() < 2 {
        return Err(Error::invalid("a fit needs at least two rows"));
    }
    if let Some(&(_, r)) = rows.iter().find(|(_, r)| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::invalid(format!("rmse values must be positive, got {r}")));
    }
    let lb = (base as f64).ln();
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.1.ln() / lb).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("a fit needs at least two distinct m values"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ConvergenceFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Ordinary least squares on `(m, log_b rmse)`; needs three or more rows
/// with positive rmse.
pub fn fit_convergence(rows: &[(f64, f64)], base: u32) -> Result<ConvergenceFit> {
    if rows.len() < 3 {
        return Err(Error::invalid("a convergence fit needs at least three rows"));
    }
    ols(rows, base)
}
