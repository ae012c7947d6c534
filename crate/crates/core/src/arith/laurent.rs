use super::{check_base, BAdicReal, PolyZb};
use crate::{Error, Result};

/// Coefficients `t_1..t_L` of `x^-1..x^-L` in the expansion of a proper
/// rational function over `Z_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPrefix {
    base: u32,
    coeffs: Vec<u32>,
}

impl LaurentPrefix {
    pub fn new(base: u32, coeffs: Vec<u32>) -> Result<Self> {
        check_base(base)?;
        if let Some(&d) = coeffs.iter().find(|&&c| c >= base) {
            return Err(Error::InvalidDigit { digit: d, base });
        }
        Ok(LaurentPrefix { base, coeffs })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    /// `t_1..t_L`.
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// `t_l`, 1-based.
    pub fn t(&self, l: usize) -> u32 {
        self.coeffs[l - 1]
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n > self.coeffs.len() {
            return Err(Error::invalid(format!(
                "v_n needs {n} coefficients, only {} available",
                self.coeffs.len()
            )));
        }
        Ok(())
    }

    /// `sum_{l=1..n} t_l b^-l` as a digit string with zero tail.
    pub fn vn_badic(&self, n: usize) -> Result<BAdicReal> {
        self.check_len(n)?;
        BAdicReal::from_digits(
            self.base,
            self.coeffs[..n].iter().map(|&c| c as u8).collect(),
        )
    }

    /// `sum_{l=1..n} t_l b^-l`.
    pub fn vn(&self, n: usize) -> Result<f64> {
        Ok(self.vn_badic(n)?.to_f64())
    }
}

/// Expands `q/p = sum_{l>=1} t_l x^-l` to `len` terms by formal long
/// division. Requires `deg q < deg p`.
pub fn laurent_expand(q: &PolyZb, p: &PolyZb, len: usize) -> Result<LaurentPrefix> {
    if q.base() != p.base() {
        return Err(Error::BaseMismatch(q.base(), p.base()));
    }
    let n = p.degree().ok_or(Error::DivisionByZero)?;
    if q.degree().is_some_and(|d| d >= n) {
        return Err(Error::invalid(format!(
            "numerator degree {} must be below denominator degree {n}",
            q.degree().unwrap()
        )));
    }
    let b = p.base() as u64;
    let lead_inv = super::poly::inv_mod(p.coeff(n), p.base()) as u64;
    // Remainder kept as a dense vector of length n + 1 (degree <= n after x-shift).
    let mut rem: Vec<u64> = (0..n).map(|i| q.coeff(i) as u64).collect();
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        rem.insert(0, 0);
        let t = rem[n] * lead_inv % b;
        if t != 0 {
            for (j, r) in rem.iter_mut().enumerate() {
                *r = (*r + (b - t) * p.coeff(j) as u64) % b;
            }
        }
        debug_assert_eq!(rem[n], 0);
        rem.truncate(n);
        out.push(t as u32);
    }
    LaurentPrefix::new(p.base(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(b: u32, c: &[u32]) -> PolyZb {
        PolyZb::new(b, c.to_vec()).unwrap()
    }

    #[test]
    fn expansion_examples() {
        // 1/(x^2+x+1) = x^-2 + x^-3 + x^-5 + x^-6 + ... over Z_2.
        let e = laurent_expand(&p(2, &[1]), &p(2, &[1, 1, 1]), 6).unwrap();
        assert_eq!(e.coeffs(), &[0, 1, 1, 0, 1, 1]);
        let z = laurent_expand(&PolyZb::zero(3).unwrap(), &p(3, &[1, 0, 1]), 5).unwrap();
        assert_eq!(z.coeffs(), &[0; 5]);
        let e = laurent_expand(&p(2, &[0, 1]), &p(2, &[1, 1, 1]), 4).unwrap();
        assert_eq!(e.t(1), 1);
    }

    #[test]
    fn expansion_errors() {
        assert!(laurent_expand(&p(2, &[1, 1, 1]), &p(2, &[1, 1, 1]), 3).is_err());
        assert!(laurent_expand(&p(2, &[1]), &PolyZb::zero(2).unwrap(), 3).is_err());
    }

    #[test]
    fn vn_examples() {
        let z = LaurentPrefix::new(2, vec![0; 4]).unwrap();
        assert_eq!(z.vn(4).unwrap(), 0.0);
        assert_eq!(LaurentPrefix::new(2, vec![0, 1]).unwrap().vn(2).unwrap(), 0.25);
        assert_eq!(
            LaurentPrefix::new(2, vec![1, 1, 0, 1]).unwrap().vn(4).unwrap(),
            13.0 / 16.0
        );
        assert!(z.vn(5).is_err());
    }

    proptest! {
        /// p * (t_1 x^-1 + ... + t_L x^-L) matches q in every coefficient
        /// from x^{deg p - 1} down to x^{deg p - L}.
        #[test]
        fn multiply_back_recovers_numerator(
            (b, pc, qc) in prop::sample::select(vec![2u32, 3, 5]).prop_flat_map(|b| {
                (1usize..=8).prop_flat_map(move |n| {
                    let lead = 1..b;
                    (
                        Just(b),
                        (prop::collection::vec(0..b, n), lead)
                            .prop_map(|(mut c, l)| { c.push(l); c }),
                        prop::collection::vec(0..b, n),
                    )
                })
            })
        ) {
            let pp = p(b, &pc);
            let qq = p(b, &qc);
            let n = pp.degree().unwrap() as i64;
            let len = 12usize;
            let t = laurent_expand(&qq, &pp, len).unwrap();
            // Coefficient of x^e in p * sum t_l x^-l for e in (n - len, n).
            for e in (n - len as i64 + 1)..n {
                let mut acc = 0u64;
                for l in 1..=len as i64 {
                    let i = e + l;
                    if (0..=n).contains(&i) {
                        acc += pp.coeff(i as usize) as u64 * t.t(l as usize) as u64;
                    }
                }
                let want = if e >= 0 { qq.coeff(e as usize) as u64 } else { 0 };
                prop_assert_eq!(acc % b as u64, want);
            }
        }
    }
}
