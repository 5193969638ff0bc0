//! Best-case exponent of the Hölder amplification with `k` factors:
//!
//! ```text
//! E(theta, k) = -1/2 - 3 theta/2 + 2 theta (1 - 1/k)
//!     + (1/k) [ (1 + theta)/2 + max(2 theta, 4 theta - (1 + theta))/2
//!               + max(k theta, 2 k theta - (1 + theta))/2 ]
//! ```
//!
//! `E` is piecewise linear in `theta`; the best exponent `theta_k` is the
//! largest `theta` with `E <= 0`.

use crate::error::{invalid, Result};
use crate::optimizer::{rat, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::max;

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(invalid("k", format!("must be at least 2, got {k}")));
    }
    Ok(())
}

pub fn holder_exponent(theta: &Rational, k: u32) -> Result<Rational> {
    check_k(k)?;
    if !theta.is_positive() || *theta >= Rational::one() {
        return Err(invalid("theta", format!("must lie in (0,1), got {theta}")));
    }
    Ok(exponent_unchecked(theta, k))
}

fn exponent_unchecked(t: &Rational, k: u32) -> Rational {
    let kk = int(k as i64);
    let one = Rational::one();
    let half = rat(1, 2);
    let s = &one + t;
    let bracket = &s * &half + &half * max(int(2) * t, int(4) * t - &s) + &half * max(&kk * t, int(2) * &kk * t - &s);
    -&half - rat(3, 2) * t + int(2) * t * (&one - &one / &kk) + bracket / kk
}

/// Largest `theta` in `(0, 1)` with `E(theta, k) <= 0`, solved exactly on
/// each linear piece.
pub fn holder_best_theta(k: u32) -> Result<Rational> {
    check_k(k)?;
    let mut cuts = vec![Rational::zero(), Rational::one()];
    let b = rat(1, k as i64 - 1);
    if b.is_positive() && b < Rational::one() {
        cuts.push(b);
    }
    cuts.sort();
    cuts.dedup();
    let mut best: Option<Rational> = None;
    for w in cuts.windows(2) {
        let (a, c) = (&w[0], &w[1]);
        let (ea, ec) = (exponent_unchecked(a, k), exponent_unchecked(c, k));
        let top = if !ec.is_positive() {
            Some(c.clone())
        } else if !ea.is_positive() {
            Some(a + (c - a) * (-&ea) / (&ec - &ea))
        } else {
            None
        };
        if let Some(t) = top {
            best = Some(best.map_or(t.clone(), |b| max(b, t)));
        }
    }
    best.filter(|t| t.is_positive() && *t < Rational::one())
        .ok_or_else(|| invalid("k", "E(theta, k) <= 0 has no solution in (0,1)"))
}
