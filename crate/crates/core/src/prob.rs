//! Probability values in base-2 log domain.
//!
//! Products of per-position probabilities are the only arithmetic the
//! algorithms need, so probabilities are carried as `log2` values and
//! multiplied by addition. Probability zero is the `-inf` sentinel.
//!
//! Every comparison against a threshold and every floor of a scaled
//! probability goes through this module so that the whole crate resolves
//! boundary cases identically: a value within `CMP_SLACK` of a boundary
//! rounds toward inclusion.

/// Comparison slack absorbing float rounding in probability products.
pub const CMP_SLACK: f64 = 1e-9;

/// Tolerance for a position's distribution summing to one.
pub const SUM_TOLERANCE: f64 = 1e-6;

/// A probability stored as its base-2 logarithm.
///
/// `Prob::ZERO` (log = `-inf`) is absorbing under multiplication. All other
/// values come from probabilities in `(0, 1]`, so their logs are finite and
/// non-positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prob {
    log2: f64,
}

impl Prob {
    pub const ONE: Prob = Prob { log2: 0.0 };
    pub const ZERO: Prob = Prob {
        log2: f64::NEG_INFINITY,
    };

    /// Wraps a linear-domain probability. Values must lie in `[0, 1]`.
    pub fn from_linear(p: f64) -> Prob {
        debug_assert!((0.0..=1.0).contains(&p), "probability {p} out of range");
        if p == 0.0 {
            Prob::ZERO
        } else {
            Prob { log2: p.log2() }
        }
    }

    pub(crate) fn from_log2(log2: f64) -> Prob {
        Prob { log2 }
    }

    pub fn linear(self) -> f64 {
        self.log2.exp2()
    }

    pub fn log2(self) -> f64 {
        self.log2
    }

    pub fn is_zero(self) -> bool {
        self.log2 == f64::NEG_INFINITY
    }

    /// Product of two probabilities.
    #[must_use]
    pub fn mul(self, other: Prob) -> Prob {
        Prob {
            log2: self.log2 + other.log2,
        }
    }

    /// `⌊p · z⌋` with the shared comparison slack, so a product that is
    /// mathematically integral never rounds down an extra step.
    pub fn scaled_floor(self, z: f64) -> u64 {
        scaled_floor_log2(self.log2, z)
    }

    /// Whether `p ≥ 1/z`, evaluated as `p · z ≥ 1 - CMP_SLACK`.
    pub fn meets(self, z: f64) -> bool {
        self.scaled_floor(z) >= 1
    }

    /// Whether `p ≥ t` for a linear threshold `t`, with slack toward
    /// inclusion.
    pub fn at_least(self, t: f64) -> bool {
        if t <= 0.0 {
            return true;
        }
        self.linear() >= t - CMP_SLACK * t
    }
}

/// Floor of `2^log2p · z` with slack. Used directly by the estimation
/// builder, which carries raw `log2` sums.
pub(crate) fn scaled_floor_log2(log2p: f64, z: f64) -> u64 {
    if log2p == f64::NEG_INFINITY {
        return 0;
    }
    let scaled = log2p.exp2() * z;
    let floored = (scaled + CMP_SLACK).floor();
    if floored <= 0.0 {
        0
    } else {
        floored as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_and_zero() {
        assert_eq!(Prob::ONE.linear(), 1.0);
        assert!(Prob::ZERO.is_zero());
        assert_eq!(Prob::ZERO.mul(Prob::ONE).linear(), 0.0);
    }

    #[test]
    fn scaled_floor_boundaries() {
        // 0.5 * 4 = 2 exactly.
        assert_eq!(Prob::from_linear(0.5).scaled_floor(4.0), 2);
        // 0.6 * 4 = 2.4.
        assert_eq!(Prob::from_linear(0.6).scaled_floor(4.0), 2);
        // A product a hair under an integer still floors to it.
        assert_eq!(Prob::from_linear(0.499999999999).scaled_floor(4.0), 2);
        assert_eq!(Prob::from_linear(0.2).scaled_floor(4.0), 0);
        assert_eq!(Prob::ZERO.scaled_floor(4.0), 0);
    }

    #[test]
    fn meets_threshold() {
        assert!(Prob::from_linear(0.25).meets(4.0));
        assert!(!Prob::from_linear(0.2499999).meets(4.0));
        assert!(Prob::ONE.meets(1.0));
    }
}
