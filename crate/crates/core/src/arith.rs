//! Small exact-integer helpers: 2-adic valuation, checked lcm, continued
//! fraction reconstruction and square-free parts.

use crate::error::{PstError, Result};
use num_integer::Integer;
use std::cmp::Ordering;

/// 2-adic valuation with `nu2(0) = Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
        }
    }
}

pub fn nu2(k: i64) -> Valuation {
    if k == 0 {
        Valuation::Infinite
    } else {
        Valuation::Finite(k.trailing_zeros())
    }
}

pub fn checked_lcm(a: i64, b: i64) -> Result<i64> {
    let g = a.gcd(&b);
    if g == 0 {
        return Ok(0);
    }
    (a / g).checked_mul(b).map(i64::abs).ok_or_else(|| PstError::Overflow(format!("lcm({a}, {b}) exceeds 2^63")))
}

pub fn checked_lcm_all(values: impl IntoIterator<Item = i64>) -> Result<i64> {
    values.into_iter().try_fold(1i64, checked_lcm)
}

/// First continued-fraction convergent `p/q` of `x` with `|x - p/q| <= tol`
/// and `q <= q_max`. Convergents are always in lowest terms.
pub fn rational_approx(x: f64, tol: f64, q_max: i64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p_prev, mut q_prev) = (1i64, 0i64);
    let (mut p, mut q) = (x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    loop {
        if q > q_max {
            return None;
        }
        if (x - p as f64 / q as f64).abs() <= tol {
            return Some((p, q));
        }
        if frac < 1e-15 {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if a > q_max as f64 * 4.0 {
            // the next convergent already exceeds the cap
            return None;
        }
        let a = a as i64;
        frac = inv - inv.floor();
        let p_next = a.checked_mul(p)?.checked_add(p_prev)?;
        let q_next = a.checked_mul(q)?.checked_add(q_prev)?;
        p_prev = p;
        q_prev = q;
        p = p_next;
        q = q_next;
    }
}

/// Writes `n > 0` as `k^2 * d` with `d` square-free, by trial division.
pub fn square_free_decomposition(n: u64) -> (u64, u64) {
    let mut k = 1u64;
    let mut d = 1u64;
    let mut rest = n;
    let mut p = 2u64;
    while p * p <= rest && p <= 1_000_000 {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            k *= p;
        }
        if e % 2 == 1 {
            d *= p;
        }
        p += 1;
    }
    (k, d * rest)
}

pub fn is_square_free(n: u64) -> bool {
    n > 0 && square_free_decomposition(n).0 == 1
}

pub fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
