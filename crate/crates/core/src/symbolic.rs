//! Recognition of times of the form `num * pi / (den * sqrt(rad))`.

use crate::arith::{rational_approx, square_free_decomposition};
use num_integer::Integer;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicTime {
    pub num: u64,
    pub den: u64,
    /// Square-free radicand; 1 means no square root.
    pub rad: u64,
}

impl SymbolicTime {
    pub fn new(num: u64, den: u64, rad: u64) -> Self {
        let (k, d) = square_free_decomposition(rad);
        let (num, den) = (num, den * k);
        let g = num.gcd(&den);
        SymbolicTime { num: num / g, den: den / g, rad: d }
    }

    pub fn value(&self) -> f64 {
        PI * self.num as f64 / (self.den as f64 * (self.rad as f64).sqrt())
    }

    /// Finds a representation matching `tau` to 1e-9 relative, with the
    /// square of `pi / tau` a fraction of denominator at most 10^4.
    pub fn recognize(tau: f64) -> Option<Self> {
        if !(tau > 0.0) || !tau.is_finite() {
            return None;
        }
        let s = (PI / tau).powi(2);
        let (p, q) = rational_approx(s, 1e-10 * s.max(1.0), 10_000)?;
        if p <= 0 {
            return None;
        }
        let pq = (p as u64).checked_mul(q as u64)?;
        let (k, d) = square_free_decomposition(pq);
        // pi / tau = k sqrt(d) / q
        let t = SymbolicTime::new(q as u64, k, d);
        ((t.value() - tau).abs() <= 1e-9 * tau).then_some(t)
    }
}

impl fmt::Display for SymbolicTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 1 {
            write!(f, "pi")?;
        } else {
            write!(f, "{}*pi", self.num)?;
        }
        match (self.den, self.rad) {
            (1, 1) => Ok(()),
            (d, 1) => write!(f, "/{d}"),
            (1, r) => write!(f, "/sqrt({r})"),
            (d, r) => write!(f, "/({d}*sqrt({r}))"),
        }
    }
}

/// Symbolic rendering of `tau` when one is recognized.
pub fn render_time(tau: f64) -> Option<String> {
    SymbolicTime::recognize(tau).map(|t| t.to_string())
}
