//! Spacing counters behind the double large sieve: near-coincident pair sums
//! `m1^a + m2^a ~ m3^a + m4^a`, near-coincident second differences
//! `t(m, h1, h2)`, and close pairs among the powers `eta^Theta` of an eta-set.
//!
//! Every counter tabulates the values, sorts them, and counts ordered pairs
//! `(p, q)` with `|v_p - v_q| <= threshold` by a two-pointer sweep, so the
//! result is exactly the brute-force count of the same comparison.

use crate::dual::{eta_scale, eta_set, second_difference};
use crate::error::{invalid, Error, Result};
use rayon::prelude::*;

/// Relative slack added to every threshold so that algebraically equal
/// values computed through different roundings still compare equal.
pub const TIE_SLACK: f64 = 1e-12;
pub const MAX_QUADRUPLE_RANGE: u64 = 10_000;
pub const MAX_SEXTUPLE_CELLS: u64 = 10_000_000;
pub const MAX_ETA_SET: usize = 100_000;

/// Ordered pairs `(p, q)` of a sorted slice with `v_q - v_p <= thr` in
/// absolute value, including `p = q`.
pub fn count_close_pairs(sorted: &[f64], thr: f64) -> u64 {
    let n = sorted.len();
    let mut off_diagonal = 0u64;
    let mut hi = 0usize;
    for p in 0..n {
        if hi < p + 1 {
            hi = p + 1;
        }
        while hi < n && sorted[hi] - sorted[p] <= thr {
            hi += 1;
        }
        off_diagonal += (hi - p - 1) as u64;
    }
    n as u64 + 2 * off_diagonal
}

fn sort_values(mut v: Vec<f64>) -> Result<Vec<f64>> {
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::NonFinite(*bad));
    }
    v.par_sort_unstable_by(f64::total_cmp);
    Ok(v)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Ordered quadruples `(m1, m2, m3, m4)` in `[m_lo, m_hi)^4` with
/// `|(m1^a + m2^a) - (m3^a + m4^a)| <= delta M^a`, `M = m_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupleQuery {
    pub m_lo: u64,
    pub m_hi: u64,
    pub exponent: f64,
    pub delta: f64,
}

impl QuadrupleQuery {
    pub fn new(m_lo: u64, m_hi: u64, exponent: f64, delta: f64) -> Self {
        Self { m_lo, m_hi, exponent, delta }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m_lo == 0 || self.m_lo >= self.m_hi {
            return Err(invalid("range", format!("need 1 <= m_lo < m_hi, got [{}, {})", self.m_lo, self.m_hi)));
        }
        if !self.exponent.is_finite() || self.exponent == 0.0 || self.exponent == 1.0 {
            return Err(invalid("exponent", format!("must be finite and not 0 or 1, got {}", self.exponent)));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(invalid("delta", format!("must be nonnegative, got {}", self.delta)));
        }
        let size = self.m_hi - self.m_lo;
        if size > MAX_QUADRUPLE_RANGE {
            return Err(Error::TooLarge { what: "quadruple range", size, limit: MAX_QUADRUPLE_RANGE });
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        self.m_hi as f64
    }

    pub fn powers(&self) -> Vec<f64> {
        (self.m_lo..self.m_hi).map(|m| (m as f64).powf(self.exponent)).collect()
    }

    /// `delta M^a` plus the tie slack.
    pub fn threshold(&self) -> f64 {
        let slack = TIE_SLACK * 2.0 * max_abs(&self.powers());
        self.delta * self.scale().powf(self.exponent) + slack
    }
}

pub fn count_quadruples(q: &QuadrupleQuery) -> Result<u64> {
    q.validate()?;
    let v = q.powers();
    let n = v.len();
    let sums: Vec<f64> = (0..n * n).into_par_iter().map(|i| v[i / n] + v[i % n]).collect();
    Ok(count_close_pairs(&sort_values(sums)?, q.threshold()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsReport {
    pub count: u64,
    /// `M^2 + delta M^4`.
    pub bound: f64,
    pub ratio: f64,
}

pub fn rs_bound_ratio(q: &QuadrupleQuery) -> Result<RsReport> {
    let count = count_quadruples(q)?;
    let m = q.scale();
    let bound = m * m + q.delta * m.powi(4);
    Ok(RsReport { count, bound, ratio: count as f64 / bound })
}

/// Ordered sextuples: pairs of cells `(m, h1, h2)`, `m` in `[M, 2M)`,
/// `h_i` in `[H_i, 2H_i)` (or `+-[H_i, 2H_i)` when mirrored), whose second
/// differences `t` of `x^a` differ by at most `Delta T`, `T = M^{a-2} H1 H2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SextupleQuery {
    pub m: u64,
    pub h1: u64,
    pub h2: u64,
    pub exponent: f64,
    pub big_delta: f64,
    pub mirror: bool,
}

impl SextupleQuery {
    pub fn new(m: u64, h1: u64, h2: u64, exponent: f64, big_delta: f64) -> Self {
        Self { m, h1, h2, exponent, big_delta, mirror: false }
    }

    pub fn mirrored(self) -> Self {
        Self { mirror: true, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.h1 == 0 || self.h2 == 0 {
            return Err(invalid("M, H1, H2", "must be positive"));
        }
        if !self.exponent.is_finite() || self.exponent == 0.0 || self.exponent == 1.0 {
            return Err(invalid("exponent", format!("must be finite and not 0 or 1, got {}", self.exponent)));
        }
        if !(self.big_delta >= 0.0 && self.big_delta.is_finite()) {
            return Err(invalid("Delta", format!("must be nonnegative, got {}", self.big_delta)));
        }
        let cells = self.cells();
        if cells > MAX_SEXTUPLE_CELLS {
            return Err(Error::TooLarge { what: "M*H1*H2 cells", size: cells, limit: MAX_SEXTUPLE_CELLS });
        }
        if self.mirror && self.m <= 2 * (self.h1 + self.h2) {
            return Err(invalid("M", "mirrored shifts need M > 2(H1 + H2)"));
        }
        Ok(())
    }

    pub fn cells(&self) -> u64 {
        let k = if self.mirror { 4 } else { 1 };
        self.m.saturating_mul(self.h1).saturating_mul(self.h2).saturating_mul(k)
    }

    /// `T = M^{a-2} H1 H2`.
    pub fn t_scale(&self) -> f64 {
        (self.m as f64).powf(self.exponent - 2.0) * self.h1 as f64 * self.h2 as f64
    }

    fn shifts(h: u64, mirror: bool) -> Vec<f64> {
        let mut out: Vec<f64> = (h..2 * h).map(|x| x as f64).collect();
        if mirror {
            let neg: Vec<f64> = (h..2 * h).rev().map(|x| -(x as f64)).collect();
            out = neg.into_iter().chain(out).collect();
        }
        out
    }

    /// Every `t(m, h1, h2)`, ordered by `(m, h1, h2)`.
    pub fn phases(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let w1 = Self::shifts(self.h1, self.mirror);
        let w2 = Self::shifts(self.h2, self.mirror);
        let rows: Vec<Result<Vec<f64>>> = (self.m..2 * self.m)
            .into_par_iter()
            .map(|m| {
                let mut row = Vec::with_capacity(w1.len() * w2.len());
                for &a in &w1 {
                    for &b in &w2 {
                        row.push(second_difference(m as f64, a, b, self.exponent)?);
                    }
                }
                Ok(row)
            })
            .collect();
        let mut out = Vec::with_capacity(self.cells() as usize);
        for r in rows {
            out.extend(r?);
        }
        Ok(out)
    }

    /// `Delta T` plus the tie slack for the tabulated values.
    pub fn threshold(&self, phases: &[f64]) -> f64 {
        self.big_delta * self.t_scale() + TIE_SLACK * max_abs(phases)
    }
}

pub fn count_sextuples(q: &SextupleQuery) -> Result<u64> {
    let t = q.phases()?;
    let thr = q.threshold(&t);
    Ok(count_close_pairs(&sort_values(t)?, thr))
}

/// Region parameters for the two sextuple bounds. `eps` enters the guards
/// only; `separation` multiplies the required gap `H1 M^eps < H2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CzRegion {
    pub eps: f64,
    pub separation: f64,
}

impl Default for CzRegion {
    fn default() -> Self {
        Self { eps: 0.0, separation: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CzReport {
    pub count: u64,
    pub bound1: Option<f64>,
    pub ratio1: Option<f64>,
    pub bound2: Option<f64>,
    pub ratio2: Option<f64>,
    /// Guards that failed, one line each.
    pub violations: Vec<String>,
}

pub fn cz_bound1(m: f64, h1: f64, h2: f64, d: f64) -> f64 {
    let mhh = m * h1 * h2;
    mhh + d * mhh * mhh + h1 * h1 * h2.powi(6) / (m * m) + h1 * h1 * h2.powf(8.0 / 3.0)
}

pub fn cz_bound2(m: f64, h1: f64, h2: f64, d: f64) -> f64 {
    let mhh = m * h1 * h2;
    mhh + d * mhh * mhh
        + (m * h1.powi(7) * h2.powi(9)).powf(0.25)
        + h1.powi(4) * h2.powi(4) / (m * m)
        + (d * m.powi(4) * h1.powi(15) * h2.powi(17)).powf(0.125)
        + (d * m.powi(4) * h1.powi(3) * h2).sqrt()
        + (h1.powi(13) * h2.powi(15)).powf(1.0 / 6.0)
        + (d * m * m * h1.powi(8) * h2.powi(10)).powf(0.25)
        + (h1.powi(5) * h2.powi(6) / m).sqrt()
}

fn region_violations(q: &SextupleQuery, r: &CzRegion) -> (Vec<String>, Vec<String>) {
    let (m, h1, h2) = (q.m as f64, q.h1 as f64, q.h2 as f64);
    let mut v1 = Vec::new();
    if h1 > h2 {
        v1.push("bound 1: H1 <= H2 fails".to_string());
    }
    if h2 > m.powf(2.0 / 3.0 - r.eps) {
        v1.push("bound 1: H2 <= M^(2/3-eps) fails".to_string());
    }
    let mut v2 = Vec::new();
    if h1 * m.powf(r.eps) * r.separation >= h2 {
        v2.push("bound 2: H1 M^eps < H2 fails".to_string());
    }
    if h2 > m.powf(1.0 - r.eps) {
        v2.push("bound 2: H2 <= M^(1-eps) fails".to_string());
    }
    if h1 * h2 > m.powf(1.5 - r.eps) {
        v2.push("bound 2: H1 H2 <= M^(3/2-eps) fails".to_string());
    }
    (v1, v2)
}

pub fn cz_bound_ratio(q: &SextupleQuery, region: &CzRegion) -> Result<CzReport> {
    if [0.0, 1.0, 2.0, 3.0].contains(&q.exponent) {
        return Err(invalid("exponent", "the sextuple bounds exclude 0, 1, 2, 3"));
    }
    let (v1, v2) = region_violations(q, region);
    if !v1.is_empty() && !v2.is_empty() {
        return Err(Error::RegionViolation([v1, v2].concat().join("; ")));
    }
    let count = count_sextuples(q)?;
    let (m, h1, h2, d) = (q.m as f64, q.h1 as f64, q.h2 as f64, q.big_delta);
    let bound1 = v1.is_empty().then(|| cz_bound1(m, h1, h2, d));
    let bound2 = v2.is_empty().then(|| cz_bound2(m, h1, h2, d));
    Ok(CzReport {
        count,
        bound1,
        ratio1: bound1.map(|b| count as f64 / b),
        bound2,
        ratio2: bound2.map(|b| count as f64 / b),
        violations: [v1, v2].concat(),
    })
}

/// Ordered pairs `(eta1, eta2)` of an eta-set with
/// `|eta1^Theta - eta2^Theta| <= Z^Theta / X`, `Theta = 1 - 1/theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaSpacingQuery {
    pub k: f64,
    pub y1: f64,
    pub y2: f64,
    pub alpha: f64,
    pub theta: f64,
    pub x: f64,
    /// Scale of the eta values; [`eta_scale`] when `None`.
    pub z: Option<f64>,
    pub r_window: Option<(u64, u64)>,
}

impl EtaSpacingQuery {
    pub fn new(k: f64, y1: f64, y2: f64, alpha: f64, theta: f64, x: f64) -> Self {
        Self { k, y1, y2, alpha, theta, x, z: None, r_window: None }
    }

    pub fn big_theta(&self) -> f64 {
        1.0 - 1.0 / self.theta
    }

    pub fn z(&self) -> f64 {
        let r = self.r_window.map(|(lo, _)| lo as f64);
        self.z.unwrap_or_else(|| eta_scale(self.k, self.y1, self.y2, self.theta, r))
    }

    /// `eta^Theta` over the eta-set, in `(m1, m2)` order.
    pub fn powers(&self) -> Result<Vec<f64>> {
        if self.x.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(invalid("X", format!("must be positive, got {}", self.x)));
        }
        let set = eta_set(self.k, self.y1, self.y2, self.alpha, self.theta, self.r_window)?;
        if set.len() > MAX_ETA_SET {
            return Err(Error::TooLarge { what: "eta-set", size: set.len() as u64, limit: MAX_ETA_SET as u64 });
        }
        let th = self.big_theta();
        Ok(set.iter().map(|e| e.eta.powf(th)).collect())
    }

    pub fn threshold(&self, powers: &[f64]) -> f64 {
        self.z().powf(self.big_theta()) / self.x + TIE_SLACK * max_abs(powers)
    }
}

pub fn count_eta_spacings(q: &EtaSpacingQuery) -> Result<u64> {
    let v = q.powers()?;
    let thr = q.threshold(&v);
    Ok(count_close_pairs(&sort_values(v)?, thr))
}

/// `B1` against `M^2 + M^{4 + theta/(1-theta)} Z / X`, `M` the top of the
/// `m2`-window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct B1Report {
    pub count: u64,
    pub set_size: u64,
    pub z: f64,
    pub threshold: f64,
    pub m_scale: f64,
    pub bound: f64,
    pub ratio: f64,
}

pub fn b1_bound_ratio(q: &EtaSpacingQuery) -> Result<B1Report> {
    let v = q.powers()?;
    let threshold = q.threshold(&v);
    let set_size = v.len() as u64;
    let count = count_close_pairs(&sort_values(v)?, threshold);
    let m = 2.0 * q.alpha * q.theta * q.k * q.y2.powf(q.theta - 1.0);
    let z = q.z();
    let bound = m * m + m.powf(4.0 + q.theta / (1.0 - q.theta)) * z / q.x;
    Ok(B1Report { count, set_size, z, threshold, m_scale: m, bound, ratio: count as f64 / bound })
}

/// Quadratic reference count for [`count_close_pairs`] on unsorted data.
pub fn brute_close_pairs(values: &[f64], thr: f64) -> u64 {
    values.par_iter().map(|a| values.iter().filter(|b| (a - *b).abs() <= thr).count() as u64).sum()
}

/// Quartic reference count for [`count_quadruples`].
pub fn brute_quadruples(q: &QuadrupleQuery) -> Result<u64> {
    q.validate()?;
    let v = q.powers();
    let thr = q.threshold();
    Ok(v.par_iter()
        .map(|a| {
            let mut n = 0u64;
            for b in &v {
                for c in &v {
                    for d in &v {
                        n += u64::from(((a + b) - (c + d)).abs() <= thr);
                    }
                }
            }
            n
        })
        .sum())
}
