//! Generating-vector search for higher order polynomial lattice rules,
//! ranked by the truncated bound `B_{alpha,gamma}`.

use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;

use crate::arith::PolyZb;
use crate::caps::{pow_sat, Caps};
use crate::nets::PolyLatticeSpec;
use crate::sobolev::{bound_b, existence_bound, FigureOfMerit, KernelParams, Weights};
use crate::transforms::RngSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    /// `k` uniform draws with replacement.
    Random { k: usize, rng: RngSpec },
    /// Coordinate by coordinate.
    Greedy,
}

/// Everything a search needs except the generating vector.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub base: u32,
    pub m: usize,
    pub n: usize,
    pub modulus: PolyZb,
    pub dim: usize,
    pub params: KernelParams,
    pub weights: Weights,
    pub truncation: u32,
    pub caps: Caps,
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.params.base != self.base {
            return Err(Error::BaseMismatch(self.base, self.params.base));
        }
        if self.weights.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: self.weights.dim(),
            });
        }
        self.skeleton(1).map(|_| ())
    }

    /// A spec with the given dimension and all `q_j = 1`.
    fn skeleton(&self, dim: usize) -> Result<PolyLatticeSpec> {
        let one = PolyZb::one(self.base)?;
        PolyLatticeSpec::new(self.base, self.m, self.n, self.modulus.clone(), vec![one; dim])
    }

    /// Number of candidate vectors, `b^{n s}`.
    pub fn candidate_count(&self) -> u128 {
        pow_sat(self.base, (self.n * self.dim) as u32)
    }
}

/// A generating vector with its score.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub q: Vec<PolyZb>,
    pub merit: FigureOfMerit,
}

fn cmp_q(a: &[PolyZb], b: &[PolyZb], n: usize) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.cmp_padded(y, n))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn rank(mut c: Vec<Candidate>, n: usize) -> Vec<Candidate> {
    c.sort_by(|x, y| {
        x.merit
            .value
            .total_cmp(&y.merit.value)
            .then_with(|| cmp_q(&x.q, &y.q, n))
    });
    c
}

fn score(cfg: &SearchConfig, skeleton: &PolyLatticeSpec, weights: &Weights, q: Vec<PolyZb>) -> Result<Candidate> {
    let spec = skeleton.with_q(q)?;
    let merit = bound_b(&spec.matrices(), &cfg.params, weights, cfg.truncation, &cfg.caps)?;
    Ok(Candidate {
        q: spec.q().to_vec(),
        merit,
    })
}

fn polys_from_index(base: u32, n: usize, dim: usize, mut idx: u128) -> Result<Vec<PolyZb>> {
    let per = pow_sat(base, n as u32);
    (0..dim)
        .map(|_| {
            let q = PolyZb::from_index(base, (idx % per) as u64);
            idx /= per;
            q
        })
        .collect()
}

/// Every `q in G_{b,n}^s`, ranked ascending by bound, ties by coefficients.
pub fn exhaustive_search(cfg: &SearchConfig) -> Result<Vec<Candidate>> {
    cfg.validate()?;
    let total = cfg.candidate_count();
    cfg.caps.check_enumerate("exhaustive candidates b^(n s)", total)?;
    let skeleton = cfg.skeleton(cfg.dim)?;
    let all = (0..total as u64)
        .into_par_iter()
        .map(|i| score(cfg, &skeleton, &cfg.weights, polys_from_index(cfg.base, cfg.n, cfg.dim, i as u128)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank(all, cfg.n))
}

/// `k` i.i.d. uniform candidates drawn from `rng`, ranked.
pub fn random_search(cfg: &SearchConfig, k: usize, rng: &RngSpec) -> Result<Vec<Candidate>> {
    cfg.validate()?;
    if k == 0 {
        return Err(Error::invalid("random search needs k >= 1"));
    }
    cfg.caps.check_enumerate("random candidates", k as u128)?;
    let mut gen = rng.rng();
    let draws: Vec<Vec<PolyZb>> = (0..k)
        .map(|_| {
            (0..cfg.dim)
                .map(|_| {
                    let c = (0..cfg.n).map(|_| gen.gen_range(0..cfg.base)).collect();
                    PolyZb::new(cfg.base, c)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let skeleton = cfg.skeleton(cfg.dim)?;
    let all = draws
        .into_par_iter()
        .map(|q| score(cfg, &skeleton, &cfg.weights, q))
        .collect::<Result<Vec<_>>>()?;
    Ok(rank(all, cfg.n))
}

/// Chooses `q_1`, then `q_2` given `q_1`, and so on, each minimising the
/// bound of the leading coordinates.
pub fn greedy_search(cfg: &SearchConfig) -> Result<Candidate> {
    cfg.validate()?;
    let per = pow_sat(cfg.base, cfg.n as u32);
    cfg.caps.check_enumerate("greedy candidates per coordinate", per)?;
    let mut chosen: Vec<PolyZb> = Vec::with_capacity(cfg.dim);
    let mut last = None;
    for j in 1..=cfg.dim {
        let skeleton = cfg.skeleton(j)?;
        let weights = cfg.weights.leading(j)?;
        let all = (0..per as u64)
            .into_par_iter()
            .map(|i| {
                let mut q = chosen.clone();
                q.push(PolyZb::from_index(cfg.base, i)?);
                score(cfg, &skeleton, &weights, q)
            })
            .collect::<Result<Vec<_>>>()?;
        let best = rank(all, cfg.n).swap_remove(0);
        chosen = best.q.clone();
        last = Some(best);
    }
    last.ok_or_else(|| Error::invalid("search needs dimension >= 1"))
}

/// Dispatches on `mode`; greedy returns a single-entry ranking.
pub fn run_search(cfg: &SearchConfig, mode: &SearchMode) -> Result<Vec<Candidate>> {
    match mode {
        SearchMode::Exhaustive => exhaustive_search(cfg),
        SearchMode::Random { k, rng } => random_search(cfg, *k, rng),
        SearchMode::Greedy => Ok(vec![greedy_search(cfg)?]),
    }
}

/// Outcome of the averaging check behind the existence bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceReport {
    pub lambda: f64,
    pub candidates: usize,
    pub best: Candidate,
    /// `min_q B(q)`.
    pub min_bound: f64,
    /// `mean_q B(q)^lambda`.
    pub mean_bound_lambda: f64,
    /// `(mean_q B(q)^lambda)^{1/lambda}`.
    pub mean_root: f64,
    pub existence_bound: f64,
    /// `min_q B(q) <= (mean_q B^lambda)^{1/lambda}`.
    pub min_le_mean: bool,
    /// `(mean_q B^lambda)^{1/lambda} <= existence bound`.
    pub mean_le_bound: bool,
}

/// Exhaustive averaging check for one `lambda`; needs an irreducible
/// modulus.
pub fn verify_existence(cfg: &SearchConfig, lambda: f64) -> Result<ExistenceReport> {
    let skeleton = {
        cfg.validate()?;
        cfg.skeleton(cfg.dim)?
    };
    if !skeleton.is_irreducible() {
        return Err(Error::invalid("the existence bound needs an irreducible modulus"));
    }
    let bound = existence_bound(
        cfg.params.alpha,
        cfg.base,
        lambda,
        &cfg.weights,
        cfg.params.c_walsh,
        cfg.m as u32,
        cfg.n as u32,
    )?;
    let ranked = exhaustive_search(cfg)?;
    let count = ranked.len();
    let mean_bound_lambda = ranked.iter().map(|c| c.merit.value.powf(lambda)).sum::<f64>() / count as f64;
    let mean_root = mean_bound_lambda.powf(1.0 / lambda);
    let best = ranked[0].clone();
    let min_bound = best.merit.value;
    Ok(ExistenceReport {
        lambda,
        candidates: count,
        min_le_mean: min_bound.powf(lambda) <= mean_bound_lambda,
        mean_le_bound: mean_root <= bound,
        best,
        min_bound,
        mean_bound_lambda,
        mean_root,
        existence_bound: bound,
    })
}
