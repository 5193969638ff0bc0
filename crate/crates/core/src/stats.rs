//! Pair correlation and gap statistics of sorted circle points.
//!
//! All distances are measured with [`scaled_pair_distance`], which is
//! symmetric in its arguments bit for bit. The circular sweep below evaluates
//! exactly the same predicate as a brute-force scan over all ordered pairs,
//! so the two agree exactly, not just approximately.

use crate::error::{invalid, Error, Result};
use crate::sequences::SortedPoints;
use rayon::prelude::*;

/// Number of points processed per sweep task.
const SWEEP_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Counts divided by the number of points (pair statistics).
    PerPoint,
    /// Counts divided by the number of samples (gap statistics).
    Probability,
}

/// Fixed-width histogram on `[0, t_max)` with bins `[i*w, (i+1)*w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub t_max: f64,
    pub masses: Vec<f64>,
    pub sample_count: u64,
    pub normalization: Normalization,
    /// Mass at or beyond the last bin edge, dropped from `masses`.
    pub overflow: f64,
}

impl Histogram {
    pub fn bin_count(bin_width: f64, t_max: f64) -> Result<usize> {
        if !(bin_width.is_finite() && bin_width > 0.0) {
            return Err(invalid("bin_width", format!("must be positive, got {bin_width}")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(invalid("t_max", format!("must be positive, got {t_max}")));
        }
        let ratio = t_max / bin_width;
        // 5.0 / 0.1 = 50.000000000000004 must give 50 bins
        let nearest = ratio.round();
        let bins = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) { nearest } else { ratio.ceil() };
        Ok(bins.max(1.0) as usize)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn bin_lo(&self, i: usize) -> f64 {
        i as f64 * self.bin_width
    }

    pub fn bin_hi(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.bin_width
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    fn same_binning(&self, other: &Histogram) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
        self.masses.len() == other.masses.len()
            && close(self.bin_width, other.bin_width)
            && close(self.t_max, other.t_max)
    }
}

/// Bin of `t`. Values a hair below an edge (`49/50 * 50`) count as on it.
#[inline]
pub fn bin_index(t: f64, bin_width: f64) -> usize {
    let r = t / bin_width;
    let up = r.ceil();
    if up - r <= 1e-9 * up.max(1.0) {
        up as usize
    } else {
        r as usize
    }
}

/// `N * ||a - b||` for two points of `[0,1)`.
#[inline]
pub fn scaled_pair_distance(a: f64, b: f64, n: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d) * n
}

fn check_window(s: f64, n: usize) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid("s", format!("must be positive, got {s}")));
    }
    let half = n as f64 / 2.0;
    if s >= half {
        return Err(Error::WindowWraps { s, half });
    }
    Ok(())
}

/// For each `i`, the neighbours `j > i` within scaled distance `s` form a
/// prefix `(i, near_end)` (forward gap small) and a suffix `[wrap_start, n)`
/// (gap through 0 small). Both ends are nondecreasing in `i`.
struct Sweep<'a> {
    y: &'a [f64],
    n: f64,
    s: f64,
}

impl Sweep<'_> {
    #[inline]
    fn near(&self, i: usize, j: usize) -> bool {
        (self.y[j] - self.y[i]) * self.n <= self.s
    }

    #[inline]
    fn wraps(&self, i: usize, j: usize) -> bool {
        (1.0 - (self.y[j] - self.y[i])) * self.n <= self.s
    }

    fn initial(&self, i: usize) -> (usize, usize) {
        let len = self.y.len();
        let near_end = first_failing(i + 1, len, |j| self.near(i, j));
        let wrap_start = first_failing(i + 1, len, |j| !self.wraps(i, j));
        (near_end, wrap_start)
    }

    /// Visit every unordered close pair `(i, j)`, `i < j`, for `i` in
    /// `lo..hi`, advancing both pointers monotonically.
    fn for_each_pair(&self, lo: usize, hi: usize, mut visit: impl FnMut(usize, usize)) {
        if lo >= hi {
            return;
        }
        let len = self.y.len();
        let (mut near_end, mut wrap_start) = self.initial(lo);
        for i in lo..hi {
            near_end = near_end.max(i + 1);
            while near_end < len && self.near(i, near_end) {
                near_end += 1;
            }
            wrap_start = wrap_start.max(i + 1);
            while wrap_start < len && !self.wraps(i, wrap_start) {
                wrap_start += 1;
            }
            for j in i + 1..near_end {
                visit(i, j);
            }
            for j in wrap_start.max(near_end)..len {
                visit(i, j);
            }
        }
    }

    fn count_pairs(&self, lo: usize, hi: usize) -> u64 {
        if lo >= hi {
            return 0;
        }
        let len = self.y.len();
        let (mut near_end, mut wrap_start) = self.initial(lo);
        let mut count = 0u64;
        for i in lo..hi {
            near_end = near_end.max(i + 1);
            while near_end < len && self.near(i, near_end) {
                near_end += 1;
            }
            wrap_start = wrap_start.max(i + 1);
            while wrap_start < len && !self.wraps(i, wrap_start) {
                wrap_start += 1;
            }
            count += (near_end - i - 1) as u64 + (len - wrap_start.max(near_end)) as u64;
        }
        count
    }
}

/// First index in `lo..hi` where a true-then-false predicate turns false.
fn first_failing(mut lo: usize, mut hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn chunk_bounds(len: usize) -> Vec<(usize, usize)> {
    (0..len.div_ceil(SWEEP_CHUNK)).map(|c| (c * SWEEP_CHUNK, ((c + 1) * SWEEP_CHUNK).min(len))).collect()
}

/// Number of ordered pairs `i != j` with `N * ||y_i - y_j|| <= s`.
pub fn pair_count(points: &SortedPoints, s: f64) -> Result<u64> {
    let y = points.as_slice();
    check_window(s, y.len())?;
    let sweep = Sweep { y, n: y.len() as f64, s };
    let unordered: u64 = chunk_bounds(y.len()).into_par_iter().map(|(lo, hi)| sweep.count_pairs(lo, hi)).sum();
    Ok(2 * unordered)
}

/// `R_2([-s, s]) = (1/N) #{i != j : N ||y_i - y_j|| <= s}`.
pub fn pair_correlation(points: &SortedPoints, s: f64) -> Result<f64> {
    let count = pair_count(points, s)?;
    Ok(count as f64 / points.len() as f64)
}

/// Histogram of scaled pair distances below `t_max`, normalized per point.
/// A Poissonian sequence has mass `2 * bin_width` in every bin.
pub fn pair_correlation_histogram(points: &SortedPoints, bin_width: f64, t_max: f64) -> Result<Histogram> {
    let bins = Histogram::bin_count(bin_width, t_max)?;
    let y = points.as_slice();
    check_window(t_max, y.len())?;
    let n = y.len() as f64;
    let sweep = Sweep { y, n, s: t_max };
    let counts = chunk_bounds(y.len())
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut local = vec![0u64; bins];
            sweep.for_each_pair(lo, hi, |i, j| {
                let t = scaled_pair_distance(y[i], y[j], n);
                let b = bin_index(t, bin_width);
                if b < bins {
                    local[b] += 2;
                }
            });
            local
        })
        .reduce(|| vec![0u64; bins], merge_counts);
    let counted: u64 = counts.iter().sum();
    let total_pairs = (y.len() as u64) * (y.len() as u64).saturating_sub(1);
    Ok(Histogram {
        bin_width,
        t_max,
        masses: counts.iter().map(|&c| c as f64 / n).collect(),
        sample_count: counted,
        normalization: Normalization::PerPoint,
        overflow: (total_pairs - counted) as f64 / n,
    })
}

fn merge_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// The `N` circular gaps scaled by `N`: successor differences plus the
/// wrap-around gap `y_1 + 1 - y_N`. They sum to `N` up to roundoff.
pub fn scaled_gaps(points: &SortedPoints) -> Result<Vec<f64>> {
    let y = points.as_slice();
    if y.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: y.len() });
    }
    let n = y.len() as f64;
    let mut gaps: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) * n).collect();
    gaps.push((y[0] + 1.0 - y[y.len() - 1]) * n);
    Ok(gaps)
}

/// Probability histogram of the scaled circular gaps.
pub fn gap_histogram(points: &SortedPoints, bin_width: f64, t_max: f64) -> Result<Histogram> {
    let bins = Histogram::bin_count(bin_width, t_max)?;
    let gaps = scaled_gaps(points)?;
    let mut counts = vec![0u64; bins];
    let mut beyond = 0u64;
    for g in &gaps {
        let b = bin_index(*g, bin_width);
        if b < bins {
            counts[b] += 1;
        } else {
            beyond += 1;
        }
    }
    let n = gaps.len() as f64;
    Ok(Histogram {
        bin_width,
        t_max,
        masses: counts.iter().map(|&c| c as f64 / n).collect(),
        sample_count: gaps.len() as u64,
        normalization: Normalization::Probability,
        overflow: beyond as f64 / n,
    })
}

/// Exponential gap law: bin `i` carries `e^{-i w} - e^{-(i+1) w}`.
pub fn poisson_reference(bin_width: f64, t_max: f64) -> Result<Histogram> {
    let bins = Histogram::bin_count(bin_width, t_max)?;
    let masses = (0..bins).map(|i| -(-(i as f64) * bin_width).exp() * (-bin_width).exp_m1()).collect();
    Ok(Histogram {
        bin_width,
        t_max,
        masses,
        sample_count: 0,
        normalization: Normalization::Probability,
        overflow: (-(bins as f64) * bin_width).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Sup,
    ChiSquared,
}

/// Floor for the reference mass in the chi-squared denominator.
pub const CHI2_FLOOR: f64 = 1e-12;

pub fn histogram_distance(a: &Histogram, b: &Histogram, metric: Metric) -> Result<f64> {
    if !a.same_binning(b) {
        return Err(Error::BinningMismatch);
    }
    let pairs = a.masses.iter().zip(&b.masses);
    Ok(match metric {
        Metric::Sup => pairs.map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
        Metric::ChiSquared => pairs.map(|(x, y)| (x - y).powi(2) / y.max(CHI2_FLOOR)).sum(),
    })
}
