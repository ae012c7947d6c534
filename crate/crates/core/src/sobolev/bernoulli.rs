//! Bernoulli numbers and polynomials from exact rational recurrences.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// `B_0..B_n` with the convention `B_1 = -1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    let mut out: Vec<BigRational> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if k == 0 {
            out.push(BigRational::one());
            continue;
        }
        // sum_{i=0}^{k} C(k+1, i) B_i = 0
        let mut acc = BigRational::zero();
        let mut binom = BigInt::one();
        for (i, bi) in out.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bi;
            binom = binom * BigInt::from(k + 1 - i) / BigInt::from(i + 1);
        }
        out.push(-acc / BigRational::from_integer(BigInt::from(k + 1)));
    }
    out
}

/// Coefficients of `B_n(x)` in ascending powers of `x`.
pub fn bernoulli_poly_coeffs(n: usize) -> Vec<BigRational> {
    let nums = bernoulli_numbers(n);
    // B_n(x) = sum_k C(n, k) B_k x^{n-k}
    let mut coeffs = vec![BigRational::zero(); n + 1];
    let mut binom = BigInt::one();
    for (k, bk) in nums.iter().enumerate() {
        coeffs[n - k] = BigRational::from_integer(binom.clone()) * bk;
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    coeffs
}

/// Floating-point evaluator for `B_0..B_max`.
#[derive(Debug, Clone)]
pub struct Bernoulli {
    coeffs: Vec<Vec<f64>>,
    numbers: Vec<f64>,
}

impl Bernoulli {
    pub fn new(max_degree: usize) -> Self {
        let coeffs = (0..=max_degree)
            .map(|n| {
                bernoulli_poly_coeffs(n)
                    .iter()
                    .map(|c| c.to_f64().expect("finite coefficient"))
                    .collect()
            })
            .collect();
        let numbers = bernoulli_numbers(max_degree)
            .iter()
            .map(|c| c.to_f64().expect("finite number"))
            .collect();
        Bernoulli { coeffs, numbers }
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `B_n(x)`.
    pub fn eval(&self, n: usize, x: f64) -> f64 {
        self.coeffs[n].iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// The Bernoulli number `B_n = B_n(0)`.
    pub fn number(&self, n: usize) -> f64 {
        self.numbers[n]
    }
}

/// `bernoulli_polynomial(n, x) = B_n(x)`.
pub fn bernoulli_polynomial(n: usize, x: f64) -> f64 {
    Bernoulli::new(n).eval(n, x)
}
