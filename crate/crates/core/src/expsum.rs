//! Long exponential sums `sum e(alpha k y^theta)` and the two sides of the
//! Fourier reduction of the smoothed pair correlation
//!
//! ```text
//! (1/N) sum_{k in Z} sum_{i != j} f(N(x_i - x_j + k))
//!     = (2/N^2) sum_{k >= 1} fhat(k/N) |sum_y e(k x_y)|^2 - f(0) + fhat(0)
//! ```
//!
//! which holds exactly up to the tails of `f` at multiples of `N` and the
//! truncation of the `k` sum.

use crate::error::{invalid, Error, Result};
use crate::kernel::Kernel;
use crate::sequences::{frac_unchecked, generate_points, pow_theta, SequenceSpec, PHASE_GUARD};
use crate::summation::{pairwise_sum_by, pairwise_sum_complex_by};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Default `eps` in the cutoff `k <= N^{1+eps}`.
pub const DEFAULT_EPS: f64 = 0.1;
pub const MAX_FOURIER_N: u64 = 20_000;
pub const MAX_DIRECT_N: u64 = 10_000;

/// `e(x) = exp(2 pi i {x})`.
#[inline]
pub fn e(x: f64) -> Complex64 {
    let (s, c) = (TAU * frac_unchecked(x)).sin_cos();
    Complex64::new(c, s)
}

/// `sum_{A <= y < B} e(alpha k y^theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSumQuery {
    pub alpha: f64,
    pub theta: f64,
    pub k: u64,
    /// Inclusive start `A`.
    pub start: u64,
    /// Exclusive end `B`.
    pub end: u64,
}

impl ExpSumQuery {
    pub fn new(alpha: f64, theta: f64, k: u64, start: u64, end: u64) -> Self {
        Self { alpha, theta, k, start, end }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(invalid("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(invalid("theta", format!("must lie in (0,1), got {}", self.theta)));
        }
        if self.k == 0 {
            return Err(invalid("k", "must be positive"));
        }
        if self.start == 0 || self.start > self.end {
            return Err(invalid("range", format!("need 1 <= A <= B, got [{}, {})", self.start, self.end)));
        }
        let top = self.alpha * self.k as f64 * (self.end as f64).powf(self.theta);
        if top > PHASE_GUARD {
            return Err(Error::PhaseGuard(top));
        }
        Ok(())
    }
}

pub fn exp_sum(q: &ExpSumQuery) -> Result<Complex64> {
    q.validate()?;
    let ak = q.alpha * q.k as f64;
    let len = (q.end - q.start) as usize;
    Ok(pairwise_sum_complex_by(len, |i| e(ak * pow_theta((q.start + i as u64) as f64, q.theta))))
}

/// `sum_y e(k x_y)` over a table of base phases `x_y`.
fn phase_table_sum(phases: &[f64], k: u64) -> Complex64 {
    let k = k as f64;
    pairwise_sum_complex_by(phases.len(), |i| e(k * phases[i]))
}

/// `ceil(N^{1+eps})`.
pub fn k_cutoff(n: u64, eps: f64) -> u64 {
    (n as f64).powf(1.0 + eps).ceil() as u64
}

/// `(2/N^2) sum_{1 <= k <= ceil(N^{1+eps})} fhat(k/N) |sum_y e(k x_y)|^2` for
/// an arbitrary family of base phases (`N` = number of phases).
pub fn fourier_side_phases(phases: &[f64], eps: f64, kernel: &Kernel) -> Result<f64> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(invalid("eps", format!("must be nonnegative, got {eps}")));
    }
    let n = phases.len() as u64;
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let kmax = k_cutoff(n, eps);
    let nf = n as f64;
    let total = pairwise_sum_by(kmax as usize, |i| {
        let k = i as u64 + 1;
        kernel.eval_hat(k as f64 / nf) * phase_table_sum(phases, k).norm_sqr()
    });
    Ok(2.0 * total / (nf * nf))
}

fn sequence_phases(n: u64, alpha: f64, theta: f64) -> Result<Vec<f64>> {
    let spec = SequenceSpec::new(alpha, theta, n);
    Ok(generate_points(&spec)?.into_iter().map(|p| p.value()).collect())
}

/// Fourier side for `x_y = alpha y^theta`, `y = 1..=N`.
pub fn fourier_side(n: u64, eps: f64, kernel: &Kernel, alpha: f64, theta: f64) -> Result<f64> {
    if n > MAX_FOURIER_N {
        return Err(Error::TooLarge { what: "N", size: n, limit: MAX_FOURIER_N });
    }
    let kmax = k_cutoff(n.max(1), eps.max(0.0));
    // same guard as exp_sum at the largest k
    ExpSumQuery::new(alpha, theta, kmax, 1, n + 1).validate()?;
    fourier_side_phases(&sequence_phases(n, alpha, theta)?, eps, kernel)
}

/// `(1/N) sum_{k in Z} sum_{i != j} f(N(x_i - x_j + k))` for points of the
/// circle; `k` runs over every shift where the kernel is not truncated.
pub fn direct_side_points(points: &[f64], kernel: &Kernel) -> Result<f64> {
    let n = points.len();
    if n == 0 {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let nf = n as f64;
    let reach = kernel.support_radius() / nf;
    let total = pairwise_sum_by(n, |i| {
        let mut acc = 0.0;
        for (j, &xj) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let d = points[i] - xj;
            let lo = (-reach - d).ceil() as i64;
            let hi = (reach - d).floor() as i64;
            for k in lo..=hi {
                acc += kernel.eval(nf * (d + k as f64));
            }
        }
        acc
    });
    Ok(total / nf)
}

pub fn direct_side(n: u64, kernel: &Kernel, alpha: f64, theta: f64) -> Result<f64> {
    if n > MAX_DIRECT_N {
        return Err(Error::TooLarge { what: "N", size: n, limit: MAX_DIRECT_N });
    }
    direct_side_points(&sequence_phases(n, alpha, theta)?, kernel)
}

/// Both sides of the reduction identity and their mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedReport {
    pub n: u64,
    pub fourier_side: f64,
    pub direct_side: f64,
    /// `|direct - (fourier - f(0) + fhat(0))|`.
    pub identity_residual: f64,
    pub f_at_0: f64,
    pub fhat_at_0: f64,
}

pub fn smoothed_report_points(points: &[f64], eps: f64, kernel: &Kernel) -> Result<SmoothedReport> {
    let fourier = fourier_side_phases(points, eps, kernel)?;
    let direct = direct_side_points(points, kernel)?;
    Ok(SmoothedReport {
        n: points.len() as u64,
        fourier_side: fourier,
        direct_side: direct,
        identity_residual: (direct - (fourier - kernel.f_at_0 + kernel.fhat_at_0)).abs(),
        f_at_0: kernel.f_at_0,
        fhat_at_0: kernel.fhat_at_0,
    })
}

pub fn smoothed_report(n: u64, eps: f64, kernel: &Kernel, alpha: f64, theta: f64) -> Result<SmoothedReport> {
    if n > MAX_DIRECT_N {
        return Err(Error::TooLarge { what: "N", size: n, limit: MAX_DIRECT_N });
    }
    ExpSumQuery::new(alpha, theta, k_cutoff(n.max(1), eps.max(0.0)), 1, n + 1).validate()?;
    smoothed_report_points(&sequence_phases(n, alpha, theta)?, eps, kernel)
}

pub fn identity_residual(n: u64, eps: f64, kernel: &Kernel, alpha: f64, theta: f64) -> Result<f64> {
    Ok(smoothed_report(n, eps, kernel, alpha, theta)?.identity_residual)
}
