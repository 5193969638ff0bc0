//! Poisson-dual (stationary phase) transforms of the exponential sums and
//! the data attached to them: the constants `c1..c4`, eta-sets of pairs
//! `(m1, m2)`, the clamped `k`-windows with their dual `l`-ranges, and the
//! van der Corput difference phases.
//!
//! Integer windows are half-open `[lo, hi)` on the real endpoints, i.e.
//! `ceil(lo) ..= ceil(hi) - 1`.

use crate::error::{invalid, Error, Result};
use crate::expsum::{e, exp_sum, ExpSumQuery};
use crate::sequences::PHASE_GUARD;
use crate::summation::pairwise_sum_complex_by;
use num_complex::Complex64;
use rayon::prelude::*;
use std::ops::Range;

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(invalid("theta", format!("must lie in (0,1), got {theta}")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(invalid("alpha", format!("must be positive, got {alpha}")))
    }
}

/// Integers in the real half-open interval `[lo, hi)`, clipped below at 1.
pub fn integer_window(lo: f64, hi: f64) -> Range<u64> {
    let a = lo.ceil().max(1.0);
    let b = hi.ceil().max(1.0);
    if b <= a {
        return 1..1;
    }
    a as u64..b as u64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualConstants {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

pub fn dual_constants(alpha: f64, theta: f64) -> Result<DualConstants> {
    check_theta(theta)?;
    check_alpha(alpha)?;
    let at = alpha * theta;
    let c3 = at.powf(1.0 / (1.0 - theta)) * (1.0 / theta - 1.0);
    let c4 = (at * (1.0 - theta)).powf(-0.5) * at.powf((2.0 - theta) / (2.0 - 2.0 * theta));
    let ratio = (1.0 - theta) / c3;
    let c1 = (1.0 - theta) / (c3 * theta).sqrt() * ratio.powf(1.0 / (2.0 * theta) - 1.0);
    let c2 = -theta * ratio.powf(1.0 / theta - 1.0);
    Ok(DualConstants { c1, c2, c3, c4 })
}

/// Window size below which the dual `m`-sum has too few terms to be
/// meaningful.
pub const DUAL_WINDOW_THRESHOLD: f64 = 10.0;

/// `T_k(Y)`, the stationary-phase dual of `sum_{Y <= y < 2Y} e(alpha k y^theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualBlock {
    pub value: Complex64,
    pub m_window: Range<u64>,
    /// `alpha theta k Y^{theta-1}`, the upper end of the `m`-window.
    pub window_scale: f64,
    pub empty_window: bool,
    /// `window_scale` is below [`DUAL_WINDOW_THRESHOLD`].
    pub below_threshold: bool,
}

pub fn dual_block_sum(k: u64, y: u64, alpha: f64, theta: f64) -> Result<DualBlock> {
    let c = dual_constants(alpha, theta)?;
    if k == 0 || y == 0 {
        return Err(invalid("k, Y", "must be positive"));
    }
    let (kf, yf) = (k as f64, y as f64);
    let top = alpha * kf * (2.0 * yf).powf(theta);
    if top > PHASE_GUARD {
        return Err(Error::PhaseGuard(top));
    }
    let at = alpha * theta;
    let window_scale = at * kf * yf.powf(theta - 1.0);
    let window = integer_window(at * kf * (2.0 * yf).powf(theta - 1.0), window_scale);
    let amp_exp = (2.0 - theta) / (2.0 - 2.0 * theta);
    let phase_coeff = c.c3 * kf.powf(1.0 / (1.0 - theta));
    let beta = theta / (1.0 - theta);
    let amp = c.c4 / kf.sqrt();
    let start = window.start;
    let value = pairwise_sum_complex_by((window.end - window.start) as usize, |i| {
        let m = (start + i as u64) as f64;
        amp * (kf / m).powf(amp_exp) * e(phase_coeff * m.powf(-beta) - 0.125)
    });
    Ok(DualBlock {
        value,
        empty_window: window.is_empty(),
        m_window: window,
        window_scale,
        below_threshold: window_scale < DUAL_WINDOW_THRESHOLD,
    })
}

/// Direct block sum against its dual, with the error scale
/// `Y^{1-theta/2}/sqrt(k) + max(1, log(k Y^{theta-1}))`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCheck {
    pub k: u64,
    pub y: u64,
    pub direct: Complex64,
    pub dual: DualBlock,
    pub residual: f64,
    pub bound: f64,
    /// `residual / bound`.
    pub ratio: f64,
}

pub fn block_error_scale(k: u64, y: u64, theta: f64) -> f64 {
    let (kf, yf) = (k as f64, y as f64);
    yf.powf(1.0 - theta / 2.0) / kf.sqrt() + (kf * yf.powf(theta - 1.0)).ln().max(1.0)
}

pub fn check_dual_block(k: u64, y: u64, alpha: f64, theta: f64) -> Result<BlockCheck> {
    let dual = dual_block_sum(k, y, alpha, theta)?;
    let direct = exp_sum(&ExpSumQuery::new(alpha, theta, k, y, 2 * y))?;
    let residual = (direct - dual.value).norm();
    let bound = block_error_scale(k, y, theta);
    Ok(BlockCheck { k, y, direct, dual, residual, bound, ratio: residual / bound })
}

/// `eta = m1^{-theta/(1-theta)} - m2^{-theta/(1-theta)}` with `m1 < m2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaElement {
    pub m1: u64,
    pub m2: u64,
    pub eta: f64,
}

/// `m1^{-b} - m2^{-b}` without cancellation for nearby `m1, m2`.
pub fn eta_value(m1: u64, m2: u64, theta: f64) -> f64 {
    let b = theta / (1.0 - theta);
    let (a, c) = (m1 as f64, m2 as f64);
    -a.powf(-b) * (-b * ((c - a) / a).ln_1p()).exp_m1()
}

/// The two `m`-windows `[alpha theta K (2 Y_i)^{theta-1}, 2 alpha theta K Y_i^{theta-1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaWindows {
    pub m1: Range<u64>,
    pub m2: Range<u64>,
}

impl EtaWindows {
    pub fn new(k: f64, y1: f64, y2: f64, alpha: f64, theta: f64) -> Result<Self> {
        check_theta(theta)?;
        check_alpha(alpha)?;
        if !(k > 0.0 && y1 > 0.0 && y2 > 0.0) {
            return Err(invalid("K, Y1, Y2", "must be positive"));
        }
        let at = alpha * theta;
        let w = |y: f64| integer_window(at * k * (2.0 * y).powf(theta - 1.0), 2.0 * at * k * y.powf(theta - 1.0));
        Ok(Self { m1: w(y1), m2: w(y2) })
    }
}

/// Every `(m1, m2)` with `m1 < m2` from the windows, ordered by `(m1, m2)`;
/// with `r_window = Some([R, 2R))` only pairs with `m2 - m1` in it.
pub fn eta_set_in_windows(windows: &EtaWindows, theta: f64, r_window: Option<(u64, u64)>) -> Vec<EtaElement> {
    let m2s = windows.m2.clone();
    let rows: Vec<Vec<EtaElement>> = windows
        .m1
        .clone()
        .into_par_iter()
        .map(|m1| {
            let mut lo = m2s.start.max(m1 + 1);
            let mut hi = m2s.end;
            if let Some((r_lo, r_hi)) = r_window {
                lo = lo.max(m1 + r_lo);
                hi = hi.min(m1 + r_hi);
            }
            (lo..hi.max(lo)).map(|m2| EtaElement { m1, m2, eta: eta_value(m1, m2, theta) }).collect()
        })
        .collect();
    rows.concat()
}

pub fn eta_set(
    k: f64,
    y1: f64,
    y2: f64,
    alpha: f64,
    theta: f64,
    r_window: Option<(u64, u64)>,
) -> Result<Vec<EtaElement>> {
    let windows = EtaWindows::new(k, y1, y2, alpha, theta)?;
    Ok(eta_set_in_windows(&windows, theta, r_window))
}

/// Typical size `Z` of the eta values for the given dyadic parameters:
/// `Y1^theta K^{-theta/(1-theta)}` when `Y1 > 2 Y2`, otherwise
/// `R Y2 K^{-1/(1-theta)}` (with `R = K Y2^{theta-1}` when not given).
pub fn eta_scale(k: f64, y1: f64, y2: f64, theta: f64, r: Option<f64>) -> f64 {
    if y1 > 2.0 * y2 {
        y1.powf(theta) * k.powf(-theta / (1.0 - theta))
    } else {
        let r = r.unwrap_or(k * y2.powf(theta - 1.0));
        r * y2 * k.powf(-1.0 / (1.0 - theta))
    }
}

/// Clamped `k`-window `[K1, K2]` for one eta and its dual `l`-range `[L, L~)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllRange {
    pub k1: f64,
    pub k2: f64,
    pub l: f64,
    pub l_tilde: f64,
    pub empty: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn ell_range(eta: &EtaElement, k: f64, k_tilde: f64, y1: f64, y2: f64, alpha: f64, theta: f64) -> Result<EllRange> {
    let c = dual_constants(alpha, theta)?;
    let at = alpha * theta;
    let (m1, m2) = (eta.m1 as f64, eta.m2 as f64);
    let k1 = k.max(m1 / (2.0 * at * y1.powf(theta - 1.0))).max(m2 / (2.0 * at * y2.powf(theta - 1.0)));
    let k2 = k_tilde.min(m1 / (at * (2.0 * y1).powf(theta - 1.0))).min(m2 / (at * (2.0 * y2).powf(theta - 1.0)));
    let scale = c.c3 * eta.eta / (1.0 - theta);
    let b = theta / (1.0 - theta);
    Ok(EllRange { k1, k2, l: scale * k1.powf(b), l_tilde: scale * k2.powf(b), empty: k1 > k2 })
}

/// `sum_{K1 <= k <= K2} e(c3 k^{1/(1-theta)} eta)` against its dual
/// `sum_{L <= l < L~} (c1/sqrt(eta)) (l/eta)^{1/(2 theta) - 1} e(c2 l^{1/theta} eta^{1-1/theta} + 1/8)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualSumCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
    /// Smallest second derivative of the `k`-phase on `[K1, K2]`.
    pub lambda: f64,
    /// `lambda^{-1/2} + log(L~ - L + 2)`.
    pub bound: f64,
    pub k_terms: u64,
    pub l_terms: u64,
}

impl DualSumCheck {
    /// Empty or single-term windows, where the transform says nothing.
    pub fn degenerate(&self) -> bool {
        self.k_terms <= 1 || self.l_terms == 0
    }
}

pub fn k_sum_dual_check(eta: f64, k1: f64, k2: f64, alpha: f64, theta: f64) -> Result<DualSumCheck> {
    let c = dual_constants(alpha, theta)?;
    if !(eta.is_finite() && eta > 0.0) {
        return Err(invalid("eta", format!("must be positive, got {eta}")));
    }
    let p = 1.0 / (1.0 - theta);
    let k_range = if k1 <= k2 {
        let a = k1.ceil().max(1.0) as u64;
        let b = k2.floor() as u64;
        if b >= a {
            a..b + 1
        } else {
            1..1
        }
    } else {
        1..1
    };
    let top = c.c3 * k2.max(0.0).powf(p) * eta;
    if top > PHASE_GUARD {
        return Err(Error::PhaseGuard(top));
    }
    let scale = c.c3 * eta * p;
    let b = theta / (1.0 - theta);
    let l_range = if k_range.is_empty() { 1..1 } else { integer_window(scale * k1.powf(b), scale * k2.powf(b)) };
    let ks = k_range.start;
    let lhs = pairwise_sum_complex_by((k_range.end - k_range.start) as usize, |i| {
        e(c.c3 * ((ks + i as u64) as f64).powf(p) * eta)
    });
    let amp = c.c1 / eta.sqrt();
    let amp_exp = 1.0 / (2.0 * theta) - 1.0;
    let phase = c.c2 * eta.powf(1.0 - 1.0 / theta);
    let ls = l_range.start;
    let rhs = pairwise_sum_complex_by((l_range.end - l_range.start) as usize, |i| {
        let l = (ls + i as u64) as f64;
        amp * (l / eta).powf(amp_exp) * e(phase * l.powf(1.0 / theta) + 0.125)
    });
    // g''(k) = c3 eta p b k^{b-1}; monotone, so the minimum sits at an end
    let g2 = |k: f64| c.c3 * eta * p * b * k.powf(b - 1.0);
    let lambda = if k1 > 0.0 && k2 >= k1 { g2(k1).min(g2(k2)) } else { f64::NAN };
    let bound = lambda.powf(-0.5) + ((scale * k2.powf(b) - scale * k1.powf(b)).max(0.0) + 2.0).ln();
    Ok(DualSumCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        lambda,
        bound,
        k_terms: k_range.end - k_range.start,
        l_terms: l_range.end - l_range.start,
    })
}

/// `S~(K, K~, Y1, Y2)`: the eta-weighted dual `l`-sums, without the unit
/// factor `e(1/8)`.
pub fn s_tilde(k: f64, k_tilde: f64, y1: f64, y2: f64, alpha: f64, theta: f64) -> Result<Complex64> {
    let c = dual_constants(alpha, theta)?;
    let w_exp = (2.0 - theta) / (2.0 - 2.0 * theta);
    let amp_exp = 1.0 / (2.0 * theta) - 1.0;
    let mut total = Complex64::new(0.0, 0.0);
    for el in eta_set(k, y1, y2, alpha, theta, None)? {
        let r = ell_range(&el, k, k_tilde, y1, y2, alpha, theta)?;
        if r.empty {
            continue;
        }
        let weight = (1.0 / (el.m1 as f64 * el.m2 as f64)).powf(w_exp);
        let ls = integer_window(r.l, r.l_tilde);
        let phase = c.c2 * el.eta.powf(1.0 - 1.0 / theta);
        let start = ls.start;
        let inner = pairwise_sum_complex_by((ls.end - ls.start) as usize, |i| {
            let l = (start + i as u64) as f64;
            c.c1 / el.eta.sqrt() * (l / el.eta).powf(amp_exp) * e(phase * l.powf(1.0 / theta))
        });
        total += weight * inner;
    }
    Ok(total)
}

/// Second difference `((x+h1+h2)^p - (x+h2)^p) - ((x+h1)^p - x^p)`.
///
/// Symmetric in `h1, h2`; the shifts are put in a canonical order first so
/// swapped arguments give bit-identical results.
pub fn second_difference(x: f64, h1: f64, h2: f64, p: f64) -> Result<f64> {
    let (a, b) = if h1 <= h2 { (h1, h2) } else { (h2, h1) };
    for base in [x, x + a, x + b, x + a + b] {
        if base.is_nan() || base <= 0.0 {
            return Err(invalid("base", format!("{base} is not positive")));
        }
    }
    if a == 0.0 || b == 0.0 {
        return Ok(0.0);
    }
    Ok(((x + a + b).powf(p) - (x + b).powf(p)) - ((x + a).powf(p) - x.powf(p)))
}

/// `t(l, h1) = (l + h1)^{1/theta} - l^{1/theta}`.
pub fn vdc_phase1(ell: f64, h1: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(ell > 0.0 && ell + h1 > 0.0) {
        return Err(invalid("ell", "l and l + h1 must be positive"));
    }
    if h1 == 0.0 {
        return Ok(0.0);
    }
    let p = 1.0 / theta;
    Ok((ell + h1).powf(p) - ell.powf(p))
}

/// `t(l, h1, h2) = ((l+h2+h1)^{1/theta} - (l+h2)^{1/theta}) - ((l+h1)^{1/theta} - l^{1/theta})`.
pub fn vdc_phase2(ell: f64, h1: f64, h2: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    second_difference(ell, h1, h2, 1.0 / theta)
}

/// Van der Corput weight `1 - |h2|/H2`.
pub fn vdc_weight(h2: i64, big_h2: u64) -> f64 {
    1.0 - h2.unsigned_abs() as f64 / big_h2 as f64
}
