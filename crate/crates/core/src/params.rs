//! The problem triple (N, s, p) and its derived exponents.
//!
//! `s = 1` denotes the local case; every fractional-only routine checks
//! `s < 1` itself.

use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: u32,
    pub s: f64,
    pub p: f64,
}

impl Params {
    /// Validates `N ≥ 1`, `0 < s ≤ 1`, `1 ≤ p` and `sp < N`.
    pub fn new(n: u32, s: f64, p: f64) -> Result<Self> {
        if n < 1 {
            return Err(domain("N must be >= 1"));
        }
        if !(s > 0.0 && s <= 1.0) {
            return Err(domain(format!("s = {s} outside (0, 1]")));
        }
        if !(p >= 1.0) {
            return Err(domain(format!("p = {p} must be >= 1")));
        }
        if s * p >= n as f64 {
            return Err(domain(format!("need sp < N, got sp = {}", s * p)));
        }
        Ok(Self { n, s, p })
    }

    /// Critical Sobolev exponent p*_s = Np/(N - sp).
    pub fn p_star(&self) -> f64 {
        let nf = self.n as f64;
        nf * self.p / (nf - self.s * self.p)
    }

    /// q = 2N/(N - sp), the weak-space index of the p < 2 distance.
    pub fn q_exp(&self) -> f64 {
        let nf = self.n as f64;
        2.0 * nf / (nf - self.s * self.p)
    }

    /// Stability exponent max{4, 2p}: 2p in the p >= 2 regime, 4 below.
    pub fn alpha_exp(&self) -> f64 {
        (2.0 * self.p).max(4.0)
    }

    /// Decay exponent of the virtual extremizer: (N - sp)/p.
    pub fn extremizer_exponent(&self) -> f64 {
        (self.n as f64 - self.s * self.p) / self.p
    }

    pub fn is_local(&self) -> bool {
        self.s == 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_exponents() {
        let pr = Params::new(3, 0.5, 2.0).unwrap();
        assert_eq!(pr.p_star(), 3.0);
        assert_eq!(pr.q_exp(), 3.0);
        assert_eq!(pr.alpha_exp(), 4.0);
        assert_eq!(pr.extremizer_exponent(), 1.0);

        let pr = Params::new(4, 0.25, 3.0).unwrap();
        // q = 2 p*/p identically
        assert!((pr.q_exp() - 2.0 * pr.p_star() / pr.p).abs() < 1e-15);
        assert_eq!(pr.alpha_exp(), 6.0);
    }

    #[test]
    fn deterministic_from_equal_inputs() {
        let a = Params::new(5, 0.75, 2.5).unwrap();
        let b = Params::new(5, 0.75, 2.5).unwrap();
        assert_eq!(a.p_star().to_bits(), b.p_star().to_bits());
        assert_eq!(a.q_exp().to_bits(), b.q_exp().to_bits());
        assert_eq!(a.alpha_exp().to_bits(), b.alpha_exp().to_bits());
    }

    #[test]
    fn rejects_bad_triples() {
        assert!(Params::new(0, 0.5, 2.0).is_err());
        assert!(Params::new(3, 0.0, 2.0).is_err());
        assert!(Params::new(3, 1.1, 2.0).is_err());
        assert!(Params::new(3, 0.5, 0.5).is_err());
        assert!(Params::new(2, 1.0, 2.0).is_err()); // sp = N
    }
}
