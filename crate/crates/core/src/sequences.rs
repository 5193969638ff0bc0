//! The points `{alpha * n^theta}` on the circle `R/Z`.

use crate::error::{invalid, Error, Result};
use num_integer::Roots;
use rayon::prelude::*;

/// Largest phase magnitude accepted anywhere in the crate. With 53-bit
/// doubles this leaves ~13 bits below the binary point.
pub const PHASE_GUARD: f64 = (1u64 << 40) as f64;

/// Fractional part `x - floor(x)`, always in `[0, 1)`.
pub fn frac(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite(x));
    }
    Ok(frac_unchecked(x))
}

#[inline]
pub(crate) fn frac_unchecked(x: f64) -> f64 {
    let f = x - x.floor();
    // -1e-20 - floor(-1e-20) rounds to exactly 1.0
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance `||x||` from `x` to the nearest integer, in `[0, 1/2]`.
pub fn circle_dist(x: f64) -> Result<f64> {
    let f = frac(x)?;
    Ok(f.min(1.0 - f))
}

/// A point of `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&value) {
            return Err(invalid("value", format!("{value} is not in [0,1)")));
        }
        Ok(Self(value))
    }

    pub fn from_real(x: f64) -> Result<Self> {
        frac(x).map(Self)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Parameters of the sequence `alpha * n^theta`, `n = 1..=n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceSpec {
    pub alpha: f64,
    pub theta: f64,
    pub n: u64,
    /// Drop the indices that are perfect squares.
    pub exclude_squares: bool,
}

pub const MAX_TERMS: u64 = 100_000_000;

impl SequenceSpec {
    pub fn new(alpha: f64, theta: f64, n: u64) -> Self {
        Self { alpha, theta, n, exclude_squares: false }
    }

    pub fn excluding_squares(mut self) -> Self {
        self.exclude_squares = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(invalid("alpha", format!("must be positive, got {}", self.alpha)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(invalid("theta", format!("must lie in (0,1), got {}", self.theta)));
        }
        if self.n == 0 || self.n > MAX_TERMS {
            return Err(invalid("n", format!("must lie in [1, {MAX_TERMS}], got {}", self.n)));
        }
        let magnitude = self.alpha * (self.n as f64).powf(self.theta);
        if magnitude > PHASE_GUARD {
            return Err(Error::PrecisionGuard { magnitude, max_safe_n: max_safe_n(self.alpha, self.theta) });
        }
        Ok(())
    }

    /// Number of admissible indices.
    pub fn len(&self) -> u64 {
        if self.exclude_squares {
            self.n - self.n.sqrt()
        } else {
            self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The admissible indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        (1..=self.n).filter(move |&m| !(self.exclude_squares && is_square(m)))
    }
}

/// Largest `n` with `alpha * n^theta <= 2^40`.
pub fn max_safe_n(alpha: f64, theta: f64) -> u64 {
    let mut n = (PHASE_GUARD / alpha).powf(1.0 / theta).floor().min(u64::MAX as f64) as u64;
    while n > 0 && alpha * (n as f64).powf(theta) > PHASE_GUARD {
        n -= 1;
    }
    n
}

#[inline]
pub fn is_square(m: u64) -> bool {
    let r = m.sqrt();
    r * r == m
}

/// `n^theta` as `exp(theta * ln n)`.
#[inline]
pub(crate) fn pow_theta(n: f64, theta: f64) -> f64 {
    (theta * n.ln()).exp()
}

/// `{alpha * m^theta}` for the admissible indices `m`, in index order.
pub fn generate_points(spec: &SequenceSpec) -> Result<Vec<CirclePoint>> {
    spec.validate()?;
    let (alpha, theta) = (spec.alpha, spec.theta);
    let point = |m: u64| CirclePoint(frac_unchecked(alpha * pow_theta(m as f64, theta)));
    let points = if spec.exclude_squares {
        (1..=spec.n).into_par_iter().filter(|&m| !is_square(m)).map(point).collect()
    } else {
        (1..=spec.n).into_par_iter().map(point).collect()
    };
    Ok(points)
}

/// Points of `[0,1)` in ascending order.
///
/// Ties keep their original relative order, so downstream histograms are
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedPoints(Vec<f64>);

impl SortedPoints {
    /// Sort arbitrary values of `[0, 1)`.
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(invalid("points", format!("{bad} is not in [0,1)")));
        }
        values.par_sort_by(|a, b| a.total_cmp(b));
        Ok(Self(values))
    }

    pub fn from_points(points: &[CirclePoint]) -> Self {
        let mut values: Vec<f64> = points.iter().map(|p| p.0).collect();
        values.par_sort_by(|a, b| a.total_cmp(b));
        Self(values)
    }

    /// `n` equally spaced points `i/n`.
    pub fn equally_spaced(n: usize) -> Self {
        Self((0..n).map(|i| i as f64 / n as f64).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Stable ascending sort of [`generate_points`].
pub fn sorted_points(spec: &SequenceSpec) -> Result<SortedPoints> {
    Ok(SortedPoints::from_points(&generate_points(spec)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frac_examples() {
        assert_eq!(frac(3.25).unwrap(), 0.25);
        assert_eq!(frac(-0.25).unwrap(), 0.75);
        assert_eq!(frac(7.0).unwrap(), 0.0);
        assert_eq!(frac(-1e-20).unwrap(), 0.0);
        assert!(frac(f64::NAN).is_err());
        assert!(frac(f64::INFINITY).is_err());
    }

    #[test]
    fn circle_dist_examples() {
        assert_eq!(circle_dist(0.5).unwrap(), 0.5);
        assert!((circle_dist(1.2).unwrap() - 0.2).abs() < 1e-15);
        assert!((circle_dist(-0.9).unwrap() - 0.1).abs() < 1e-15);
        assert!(circle_dist(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn cube_roots_of_one_to_eight() {
        let pts = generate_points(&SequenceSpec::new(1.0, 1.0 / 3.0, 8)).unwrap();
        assert_eq!(pts.len(), 8);
        for (i, p) in pts.iter().enumerate() {
            let direct = ((i + 1) as f64).cbrt();
            let d = (p.value() - (direct - direct.floor())).abs();
            assert!(d.min(1.0 - d) < 1e-14, "n={} {}", i + 1, p.value());
        }
    }

    #[test]
    fn square_exclusion() {
        let spec = SequenceSpec::new(1.0, 0.5, 9).excluding_squares();
        let pts = generate_points(&spec).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(spec.len(), 6);
        let idx: Vec<u64> = spec.indices().collect();
        assert_eq!(idx, vec![2, 3, 5, 6, 7, 8]);
        for (p, m) in pts.iter().zip(idx) {
            assert!((p.value() - (m as f64).sqrt().fract()).abs() < 1e-14);
        }
    }

    #[test]
    fn empty_after_exclusion() {
        let spec = SequenceSpec::new(1.0, 0.5, 1).excluding_squares();
        assert!(sorted_points(&spec).unwrap().is_empty());
    }

    #[test]
    fn three_sorted_points() {
        let s = sorted_points(&SequenceSpec::new(1.0, 1.0 / 3.0, 3)).unwrap();
        let v = s.as_slice();
        assert_eq!(v[0], 0.0);
        assert!((v[1] - (2f64.cbrt() - 1.0)).abs() < 1e-14);
        assert!((v[2] - (3f64.cbrt() - 1.0)).abs() < 1e-14);
        assert!((v[1] - 0.259_921_049_894_873).abs() < 1e-12);
        assert!((v[2] - 0.442_249_570_307_408).abs() < 1e-12);
    }

    #[test]
    fn guard_names_max_safe_n() {
        let spec = SequenceSpec::new(1e6, 0.9, 100_000_000);
        match spec.validate() {
            Err(Error::PrecisionGuard { max_safe_n, .. }) => {
                assert!(1e6 * (max_safe_n as f64).powf(0.9) <= PHASE_GUARD);
                assert!(1e6 * ((max_safe_n + 1) as f64).powf(0.9) > PHASE_GUARD);
            }
            other => panic!("expected guard error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(SequenceSpec::new(0.0, 0.5, 10).validate().is_err());
        assert!(SequenceSpec::new(1.0, 1.0, 10).validate().is_err());
        assert!(SequenceSpec::new(1.0, 0.0, 10).validate().is_err());
        assert!(SequenceSpec::new(1.0, 0.5, 0).validate().is_err());
    }

    proptest! {
        #[test]
        fn frac_is_idempotent(x in -1e6f64..1e6) {
            let f = frac(x).unwrap();
            prop_assert!((0.0..1.0).contains(&f));
            prop_assert_eq!(frac(f).unwrap(), f);
        }

        #[test]
        fn circle_dist_symmetries(x in -1e3f64..1e3) {
            let d = circle_dist(x).unwrap();
            prop_assert!((0.0..=0.5).contains(&d));
            prop_assert!((d - circle_dist(-x).unwrap()).abs() < 1e-12);
            prop_assert!((d - circle_dist(x + 1.0).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn sorting_is_a_permutation(n in 1u64..500, theta in 0.05f64..0.95, alpha in 0.1f64..10.0) {
            let spec = SequenceSpec::new(alpha, theta, n);
            let raw = generate_points(&spec).unwrap();
            let sorted = sorted_points(&spec).unwrap();
            let mut a: Vec<f64> = raw.iter().map(|p| p.value()).collect();
            a.sort_by(f64::total_cmp);
            prop_assert_eq!(&a[..], sorted.as_slice());
            let again = SortedPoints::from_values(sorted.clone().into_inner()).unwrap();
            prop_assert_eq!(again, sorted);
        }
    }
}
