//! Runtime limits on materialization and enumeration.

/// Environment variable overriding both caps.
pub const CAP_ENV: &str = "TENTQMC_CAP";

/// Upper limits that keep desk-scale runs predictable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Maximum number of coordinate digits (points x dims x digits) a net
    /// may materialize.
    pub materialize: u128,
    /// Maximum size of an enumerated index box (frequency vectors or
    /// candidate generating vectors).
    pub enumerate: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            materialize: 1 << 22,
            enumerate: 1 << 24,
        }
    }
}

impl Caps {
    /// Defaults, with both caps replaced by `TENTQMC_CAP` when it is set to
    /// a positive integer.
    pub fn from_env() -> Self {
        let mut caps = Caps::default();
        if let Some(v) = std::env::var(CAP_ENV)
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
            .filter(|&v| v > 0)
        {
            caps.materialize = v;
            caps.enumerate = v;
        }
        caps
    }

    pub(crate) fn check_enumerate(&self, what: &'static str, requested: u128) -> crate::Result<()> {
        if requested > self.enumerate {
            return Err(crate::Error::Capacity {
                what,
                requested,
                cap: self.enumerate,
            });
        }
        Ok(())
    }

    pub(crate) fn check_materialize(&self, what: &'static str, requested: u128) -> crate::Result<()> {
        if requested > self.materialize {
            return Err(crate::Error::Capacity {
                what,
                requested,
                cap: self.materialize,
            });
        }
        Ok(())
    }
}

/// `b^e` as u128, saturating at `u128::MAX`.
pub(crate) fn pow_sat(b: u32, e: u32) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(b as u128);
    }
    acc
}
