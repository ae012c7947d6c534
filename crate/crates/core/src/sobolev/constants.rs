//! Closed-form constants of the existence bound and the digit sums they
//! dominate.

use super::Weights;
use crate::arith::is_prime;
use crate::{Error, Result};

fn check_lambda(alpha: u32, lambda: f64) -> Result<()> {
    if alpha < 2 {
        return Err(Error::invalid("the existence bound needs alpha >= 2"));
    }
    let lo = 1.0 / (2.0 * alpha as f64);
    if !(lambda > lo && lambda <= 1.0) {
        return Err(Error::invalid(format!("lambda must lie in ({lo}, 1], got {lambda}")));
    }
    Ok(())
}

/// `(A_{alpha,b,lambda,1}, A_{alpha,b,lambda,2})`.
pub fn a_constants(alpha: u32, b: u32, lambda: f64) -> Result<(f64, f64)> {
    check_lambda(alpha, lambda)?;
    crate::arith::check_base(b)?;
    let bf = b as f64;
    let p = |i: u32| bf.powf(2.0 * lambda * i as f64);
    let a = alpha;
    let prod1 = |v: u32| (1..=v).map(|i| (bf - 1.0) / (p(i) - 1.0)).product::<f64>();
    let prod2 = |v: u32| (1..=v).map(|i| p(1) * (bf - 1.0) / (p(i) - 1.0)).product::<f64>();
    let a1 = bf / (bf - 1.0)
        * ((1..a).map(prod1).sum::<f64>() + (p(a) - 1.0) / (p(a) - bf) * prod1(a));
    let a2 = (2..a).map(prod2).sum::<f64>() / (bf - 1.0) + p(1) / (p(a) - bf) * prod2(a - 1);
    Ok((a1, a2))
}

/// `sum over k in E_b, k < b^t, b^n | k of b^{-2 lambda mu_alpha(floor(k/b))}`
/// by a digit recursion over `(nonzero digits seen, digit sum mod b)`.
fn eb_sum(b: u32, alpha: u32, lambda: f64, n: u32, t: u32) -> f64 {
    let bu = b as usize;
    let a = alpha as usize;
    let bf = b as f64;
    // state[c][r]: total weight with c counted nonzero digits (capped at
    // alpha) and digit sum r mod b, over the positions processed so far.
    let mut state = vec![vec![0.0f64; bu]; a + 1];
    state[0][0] = 1.0;
    // Positions t-1 down to 1 carry the digits of floor(k/b); position i
    // has weight b^{-2 lambda i} for the first alpha nonzero digits.
    for i in (1..t).rev() {
        if i < n {
            continue;
        }
        let w = bf.powf(-2.0 * lambda * i as f64);
        let mut next = state.clone();
        for (c, row) in state.iter().enumerate() {
            for (r, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let (nc, f) = if c < a { (c + 1, w) } else { (c, 1.0) };
                for d in 1..bu {
                    next[nc][(r + d) % bu] += v * f;
                }
            }
        }
        state = next;
    }
    // The last digit kappa_0 completes the digit sum; it must be 0 when b | k.
    let total: f64 = if n == 0 {
        state.iter().map(|row| row.iter().sum::<f64>()).sum()
    } else {
        state.iter().map(|row| row[0]).sum()
    };
    total - 1.0
}

/// `sum_{k in E_b, k < b^t} b^{-2 lambda mu_alpha(floor(k/b))}`.
pub fn eb_weight_sum_truncated(b: u32, alpha: u32, lambda: f64, t: u32) -> Result<f64> {
    crate::arith::check_base(b)?;
    if alpha == 0 || t == 0 {
        return Err(Error::invalid("need alpha >= 1 and T >= 1"));
    }
    Ok(eb_sum(b, alpha, lambda, 0, t))
}

/// The same sum restricted to multiples of `b^n`.
pub fn eb_weight_sum_multiples_truncated(b: u32, alpha: u32, lambda: f64, n: u32, t: u32) -> Result<f64> {
    crate::arith::check_base(b)?;
    if alpha == 0 || t == 0 || (n > 0 && t < n + 1) {
        return Err(Error::invalid("need alpha >= 1 and T >= n + 1"));
    }
    Ok(eb_sum(b, alpha, lambda, n, t))
}

/// `N_b(v)`: tuples in `(Z_b \ {0})^v` summing to 0 mod b.
pub fn n_b_count(b: u32, v: u32) -> Result<u128> {
    if !is_prime(b) {
        return Err(Error::InvalidBase(b, "N_b is defined for prime b"));
    }
    if v == 0 {
        return Err(Error::invalid("v must be at least 1"));
    }
    let mut n = 0u128;
    let mut pow = 1u128;
    // N_b(w) = (b-1)^{w-1} - N_b(w-1) for w = 2..v.
    for _ in 2..=v {
        pow *= (b - 1) as u128;
        n = pow - n;
    }
    Ok(n)
}

/// Right-hand side of the existence bound for one `lambda`:
/// `b^{-min(m/lambda, 4n)} [sum_{u nonempty} gamma_u^lambda C^{lambda|u|} (A1^{|u|} + A2^{|u|})]^{1/lambda}`.
pub fn existence_bound(
    alpha: u32,
    b: u32,
    lambda: f64,
    weights: &Weights,
    c_walsh: f64,
    m: u32,
    n: u32,
) -> Result<f64> {
    let s = weight_sum(alpha, b, lambda, weights, c_walsh)?;
    let expo = (m as f64 / lambda).min(4.0 * n as f64);
    Ok((b as f64).powf(-expo) * s.powf(1.0 / lambda))
}

fn weight_sum(alpha: u32, b: u32, lambda: f64, weights: &Weights, c_walsh: f64) -> Result<f64> {
    let (a1, a2) = a_constants(alpha, b, lambda)?;
    let cl = c_walsh.powf(lambda);
    Ok(weights.subset_power_sum(lambda, cl * a1) + weights.subset_power_sum(lambda, cl * a2))
}

/// `count` equally spaced values in `(1/(2 alpha), 1]`, ending at 1.
pub fn default_lambda_grid(alpha: u32, count: usize) -> Vec<f64> {
    let lo = 1.0 / (2.0 * alpha as f64);
    (1..=count).map(|i| lo + (1.0 - lo) * i as f64 / count as f64).collect()
}

/// Minimum of [`existence_bound`] over `grid`, with the minimising `lambda`.
pub fn existence_bound_opt(
    alpha: u32,
    b: u32,
    grid: &[f64],
    weights: &Weights,
    c_walsh: f64,
    m: u32,
    n: u32,
) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for &lambda in grid {
        let v = existence_bound(alpha, b, lambda, weights, c_walsh, m, n)?;
        if best.is_none_or(|(bv, _)| v < bv) {
            best = Some((v, lambda));
        }
    }
    best.ok_or_else(|| Error::invalid("lambda grid is empty"))
}

/// Smallest `b^m` with `1 <= m <= m_max` such that some grid `lambda` gives
/// `b^{-m/lambda} S(lambda)^{1/lambda} <= eps^2 gamma_empty`, or `None`
/// when no `m <= m_max` qualifies.
pub fn info_complexity_bound(
    eps: f64,
    alpha: u32,
    b: u32,
    weights: &Weights,
    c_walsh: f64,
    grid: &[f64],
    m_max: u32,
) -> Result<Option<(u32, u128)>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    if grid.is_empty() {
        return Err(Error::invalid("lambda grid is empty"));
    }
    let target = eps * eps * weights.gamma_empty();
    let logs: Vec<(f64, f64)> = grid
        .iter()
        .map(|&l| Ok((l, weight_sum(alpha, b, l, weights, c_walsh)?.ln() / l)))
        .collect::<Result<_>>()?;
    let lb = (b as f64).ln();
    for m in 1..=m_max {
        if logs.iter().any(|&(l, ls)| -(m as f64) / l * lb + ls <= target.ln()) {
            return Ok(Some((m, (b as u128).pow(m))));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walsh::{in_eb, mu_alpha};

    fn brute_eb(b: u32, alpha: u32, lambda: f64, n: u32, t: u32) -> f64 {
        let bn = (b as u64).pow(n);
        (1..(b as u64).pow(t))
            .filter(|&k| in_eb(k, b) && k % bn == 0)
            .map(|k| (b as f64).powf(-2.0 * lambda * mu_alpha(k / b as u64, alpha, b) as f64))
            .sum()
    }

    #[test]
    fn a1_example_and_pole() {
        let (a1, _) = a_constants(2, 2, 1.0).unwrap();
        assert!((a1 - 5.0 / 7.0).abs() < 1e-15);
        let (near, _) = a_constants(2, 2, 0.25 + 1e-9).unwrap();
        assert!(near > 1e6);
        assert!(a_constants(2, 2, 0.25).is_err());
        assert!(a_constants(1, 2, 1.0).is_err());
        assert!(a_constants(2, 2, 1.1).is_err());
    }

    #[test]
    fn a2_alpha2_has_only_the_closing_term() {
        let (_, a2) = a_constants(2, 3, 1.0).unwrap();
        let p = |i: f64| 3f64.powf(2.0 * i);
        let want = p(1.0) / (p(2.0) - 3.0) * (p(1.0) * 2.0 / (p(1.0) - 1.0));
        assert!((a2 - want).abs() < 1e-15);
    }

    #[test]
    fn digit_recursion_matches_brute_force() {
        for b in [2u32, 3, 5] {
            for alpha in [1u32, 2, 3] {
                for &lambda in &[0.6, 1.0] {
                    let tmax = if b == 5 { 5 } else { 7 };
                    for t in 1..=tmax {
                        let fast = eb_weight_sum_truncated(b, alpha, lambda, t).unwrap();
                        let slow = brute_eb(b, alpha, lambda, 0, t);
                        assert!((fast - slow).abs() < 1e-13, "b {b} a {alpha} t {t}");
                        for n in 1..t {
                            let fast = eb_weight_sum_multiples_truncated(b, alpha, lambda, n, t).unwrap();
                            let slow = brute_eb(b, alpha, lambda, n, t);
                            assert!((fast - slow).abs() < 1e-13);
                        }
                    }
                }
            }
        }
        assert_eq!(eb_weight_sum_truncated(3, 2, 1.0, 1).unwrap(), 0.0);
        assert_eq!(
            eb_weight_sum_multiples_truncated(3, 2, 1.0, 0, 6).unwrap(),
            eb_weight_sum_truncated(3, 2, 1.0, 6).unwrap()
        );
        assert!(eb_weight_sum_multiples_truncated(3, 2, 1.0, 4, 4).is_err());
    }

    #[test]
    fn counts_match_enumeration() {
        for b in [2u32, 3, 5] {
            for v in 1..=6u32 {
                let mut count = 0u128;
                let total = (b as u64 - 1).pow(v);
                for idx in 0..total {
                    let (mut r, mut s) = (idx, 0u64);
                    for _ in 0..v {
                        s += r % (b as u64 - 1) + 1;
                        r /= b as u64 - 1;
                    }
                    count += (s % b as u64 == 0) as u128;
                }
                let n = n_b_count(b, v).unwrap();
                assert_eq!(n, count, "b {b} v {v}");
                assert!(n <= ((b - 1) as u128).pow(v - 1));
            }
        }
        assert_eq!(n_b_count(3, 2).unwrap(), 2);
        assert_eq!(n_b_count(7, 1).unwrap(), 0);
        assert!(n_b_count(4, 2).is_err());
    }

    #[test]
    fn existence_bound_arithmetic() {
        let w = Weights::product(vec![0.7]).unwrap();
        let (a1, a2) = a_constants(2, 2, 0.8).unwrap();
        let c = 1.3;
        let v = existence_bound(2, 2, 0.8, &w, c, 4, 100).unwrap();
        let want = 2f64.powf(-4.0 / 0.8) * (0.7f64.powf(0.8) * c.powf(0.8) * (a1 + a2)).powf(1.0 / 0.8);
        assert!((v - want).abs() < 1e-15 * want.max(1.0));
        // Doubling m squares the b^{-m/lambda} factor.
        let v2 = existence_bound(2, 2, 0.8, &w, c, 8, 100).unwrap();
        assert!((v2 / v - 2f64.powf(-4.0 / 0.8)).abs() < 1e-12);
        // With n >= alpha m / 2 the m/lambda branch is always the minimum.
        for m in 1..20u32 {
            let n = (2 * m).div_ceil(2);
            for &l in &default_lambda_grid(2, 64) {
                assert!(m as f64 / l <= 4.0 * n as f64);
            }
        }
        assert!(existence_bound(2, 2, 0.2, &w, c, 4, 4).is_err());
        let (best, lam) = existence_bound_opt(2, 2, &default_lambda_grid(2, 64), &w, c, 6, 6).unwrap();
        assert!(best <= existence_bound(2, 2, 1.0, &w, c, 6, 6).unwrap());
        assert!(lam > 0.25 && lam <= 1.0);
    }

    #[test]
    fn information_complexity() {
        let grid = default_lambda_grid(2, 64);
        let tiny = Weights::product(vec![1e-6, 1e-6]).unwrap();
        assert_eq!(info_complexity_bound(0.99, 2, 2, &tiny, 1.0, &grid, 60).unwrap(), Some((1, 2)));
        let w = Weights::product(vec![1.0, 0.5, 0.25]).unwrap();
        let mut prev = 0;
        for &eps in &[0.5, 0.1, 0.01, 0.001] {
            let (m, _) = info_complexity_bound(eps, 2, 2, &w, 1.0, &grid, 200).unwrap().unwrap();
            assert!(m >= prev);
            prev = m;
            let ok = |m: u32| {
                grid.iter()
                    .any(|&l| existence_bound(2, 2, l, &w, 1.0, m, 10 * m).unwrap() <= eps * eps)
            };
            assert!(ok(m));
            if m > 1 {
                assert!(!ok(m - 1));
            }
        }
        assert_eq!(info_complexity_bound(1e-9, 2, 2, &w, 1.0, &grid, 3).unwrap(), None);
        assert!(info_complexity_bound(1.0, 2, 2, &w, 1.0, &grid, 3).is_err());
    }
}
