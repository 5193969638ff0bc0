//! Exact maximization of `min_c p_c / (q0_c + q1_c k1 + q2_c k2)` over the
//! shift exponents `(k1, k2)`.
//!
//! Every constraint `theta < p / D(k)` with `D` affine is the half-plane
//! `theta D(k) <= p` for fixed `theta`, so the optimum sits at a vertex where
//! three tight conditions (constraints or box edges) meet. The search is a
//! rational grid, a few zoomed regrids, then polishing by solving the
//! vertices of the near-active constraints exactly.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::fmt;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    Global,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::Global => "global",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Some(Family::A),
            "b" => Some(Family::B),
            "c" => Some(Family::C),
            "d" => Some(Family::D),
            "g" | "global" => Some(Family::Global),
            _ => None,
        }
    }
}

/// `theta < p / (q0 + q1 k1 + q2 k2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalConstraint {
    pub id: String,
    pub family: Family,
    pub p: Rational,
    pub q0: Rational,
    pub q1: Rational,
    pub q2: Rational,
}

impl FractionalConstraint {
    pub fn new(id: &str, family: Family, p: i64, q0: i64, q1: i64, q2: i64) -> Self {
        Self { id: id.to_string(), family, p: int(p), q0: int(q0), q1: int(q1), q2: int(q2) }
    }

    pub fn denominator(&self, k1: &Rational, k2: &Rational) -> Rational {
        &self.q0 + &self.q1 * k1 + &self.q2 * k2
    }

    /// `p / D(k)`, or `None` when the denominator is not positive.
    pub fn value(&self, k1: &Rational, k2: &Rational) -> Option<Rational> {
        let d = self.denominator(k1, k2);
        d.is_positive().then(|| &self.p / d)
    }
}

impl fmt::Display for FractionalConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/({}", self.p, self.q0)?;
        for (c, v) in [(&self.q1, "k1"), (&self.q2, "k2")] {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { '-' } else { '+' };
            let a = c.abs();
            if a.is_one() {
                write!(f, " {sign} {v}")?;
            } else {
                write!(f, " {sign} {a}{v}")?;
            }
        }
        write!(f, ")")
    }
}

const TABLE: [(&str, Family, [i64; 4]); 27] = [
    ("A1", Family::A, [1, 3, -1, 0]),
    ("A2", Family::A, [2, 6, 0, -1]),
    ("A3", Family::A, [12, 29, 3, 5]),
    ("A4", Family::A, [3, 5, 3, 3]),
    ("A5", Family::A, [25, 61, 6, 8]),
    ("A6", Family::A, [7, 19, 0, -2]),
    ("A7", Family::A, [18, 42, 7, 9]),
    ("A8", Family::A, [13, 31, 3, 5]),
    ("A9", Family::A, [6, 13, 3, 4]),
    ("B1", Family::B, [2, 6, -1, -1]),
    ("B2", Family::B, [3, 8, -1, -1]),
    ("B3", Family::B, [8, 21, -1, 1]),
    ("B4", Family::B, [2, 3, 2, 2]),
    ("B5", Family::B, [17, 45, -16, 0]),
    ("B6", Family::B, [5, 15, -2, -4]),
    ("B7", Family::B, [12, 30, 1, 3]),
    ("B8", Family::B, [9, 23, -1, 1]),
    ("B9", Family::B, [4, 9, 1, 2]),
    ("C1", Family::C, [3, 8, 2, -2]),
    ("C2", Family::C, [2, 5, 1, -1]),
    ("C3", Family::C, [3, 5, 8, -2]),
    ("C4", Family::C, [9, 21, 14, -6]),
    ("D1", Family::D, [1, 3, 0, -1]),
    ("D2", Family::D, [3, 8, 0, -2]),
    ("D3", Family::D, [2, 3, 6, -2]),
    ("D4", Family::D, [6, 15, 8, -6]),
    ("G", Family::Global, [3, 8, 0, 0]),
];

/// The 27 built-in constraints: families A, B (9 each), C, D (4 each) and
/// the global bound `3/8`.
pub fn builtin_constraints() -> Vec<FractionalConstraint> {
    TABLE.iter().map(|(id, fam, [p, a, b, c])| FractionalConstraint::new(id, *fam, *p, *a, *b, *c)).collect()
}

/// Side condition `(k1 + k2) theta >= 3 theta - 1`.
pub fn side_condition(k1: &Rational, k2: &Rational, theta: &Rational) -> bool {
    (k1 + k2) * theta >= int(3) * theta - int(1)
}

/// A point of the closed box `[0,1]^2` with `k1 + k2 <= 3/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KappaPoint {
    pub kappa1: Rational,
    pub kappa2: Rational,
}

impl KappaPoint {
    pub fn new(kappa1: Rational, kappa2: Rational) -> Result<Self> {
        let p = Self { kappa1, kappa2 };
        if !p.is_feasible() {
            return Err(Error::Infeasible(format!(
                "({}, {}) is outside [0,1]^2 or has k1 + k2 > 3/2",
                p.kappa1, p.kappa2
            )));
        }
        Ok(p)
    }

    pub fn is_feasible(&self) -> bool {
        let unit = |x: &Rational| !x.is_negative() && *x <= int(1);
        unit(&self.kappa1) && unit(&self.kappa2) && &self.kappa1 + &self.kappa2 <= rat(3, 2)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaLimit {
    pub theta_star: Rational,
    pub active_ids: Vec<String>,
    /// Side condition evaluated at `theta_star`.
    pub side_ok: bool,
}

pub fn theta_limit_with(kp: &KappaPoint, constraints: &[FractionalConstraint]) -> Result<ThetaLimit> {
    if !kp.is_feasible() {
        return Err(Error::Infeasible(format!("({}, {})", kp.kappa1, kp.kappa2)));
    }
    if constraints.is_empty() {
        return Err(Error::Infeasible("no constraints".into()));
    }
    let mut values = Vec::with_capacity(constraints.len());
    for c in constraints {
        match c.value(&kp.kappa1, &kp.kappa2) {
            Some(v) => values.push(v),
            None => {
                return Err(Error::Infeasible(format!(
                    "denominator of {} is not positive at ({}, {})",
                    c.id, kp.kappa1, kp.kappa2
                )))
            }
        }
    }
    let theta_star = values.iter().min().cloned().expect("nonempty");
    let active_ids =
        constraints.iter().zip(&values).filter(|(_, v)| **v == theta_star).map(|(c, _)| c.id.clone()).collect();
    let side_ok = side_condition(&kp.kappa1, &kp.kappa2, &theta_star);
    Ok(ThetaLimit { theta_star, active_ids, side_ok })
}

pub fn theta_limit(kp: &KappaPoint) -> Result<ThetaLimit> {
    theta_limit_with(kp, &builtin_constraints())
}

/// Common value of three constraints at the point where they agree.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub kappa1: Rational,
    pub kappa2: Rational,
    pub value: Rational,
}

/// `a1 x + b1 y = c1`, `a2 x + b2 y = c2`.
fn solve2(r1: [Rational; 3], r2: [Rational; 3]) -> Option<(Rational, Rational)> {
    let [a1, b1, c1] = r1;
    let [a2, b2, c2] = r2;
    let det = &a1 * &b2 - &a2 * &b1;
    if det.is_zero() {
        return None;
    }
    let x = (&c1 * &b2 - &c2 * &b1) / &det;
    let y = (&a1 * &c2 - &a2 * &c1) / &det;
    Some((x, y))
}

/// `p_i D_j = p_j D_i` as a row `[a, b, c]` of `a k1 + b k2 = c`.
fn equalize(ci: &FractionalConstraint, cj: &FractionalConstraint) -> [Rational; 3] {
    [&ci.p * &cj.q1 - &cj.p * &ci.q1, &ci.p * &cj.q2 - &cj.p * &ci.q2, &cj.p * &ci.q0 - &ci.p * &cj.q0]
}

fn vertex_at(ci: &FractionalConstraint, k1: Rational, k2: Rational) -> Option<Vertex> {
    let value = ci.value(&k1, &k2)?;
    Some(Vertex { kappa1: k1, kappa2: k2, value })
}

/// The point where `c_i = c_j = c_k`, if the linear system is nonsingular.
/// No feasibility check is made.
pub fn solve_vertex(ci: &FractionalConstraint, cj: &FractionalConstraint, ck: &FractionalConstraint) -> Option<Vertex> {
    let (k1, k2) = solve2(equalize(ci, cj), equalize(ci, ck))?;
    vertex_at(ci, k1, k2)
}

/// Edges of the feasible region as rows `a k1 + b k2 = c`.
fn edges() -> Vec<[Rational; 3]> {
    vec![
        [int(1), int(0), int(0)],
        [int(1), int(0), int(1)],
        [int(0), int(1), int(0)],
        [int(0), int(1), int(1)],
        [int(1), int(1), rat(3, 2)],
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub kappa: KappaPoint,
    pub theta_star: Rational,
    pub active_ids: Vec<String>,
    pub side_ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    pub grid_n: u32,
    pub refine_rounds: u32,
    /// Restrict to these families; all when empty.
    pub families: Vec<Family>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { grid_n: 128, refine_rounds: 3, families: Vec::new() }
    }
}

struct Candidate {
    kappa: KappaPoint,
    limit: ThetaLimit,
}

/// Admissible candidates only: feasible, positive denominators, side
/// condition holding.
fn evaluate(cs: &[FractionalConstraint], k1: Rational, k2: Rational) -> Option<Candidate> {
    let kappa = KappaPoint { kappa1: k1, kappa2: k2 };
    let limit = theta_limit_with(&kappa, cs).ok()?;
    limit.side_ok.then_some(Candidate { kappa, limit })
}

/// Highest value; ties go to the lexicographically smallest point so the
/// result does not depend on evaluation order.
fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.limit.theta_star.cmp(&b.limit.theta_star) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => (&a.kappa.kappa1, &a.kappa.kappa2) < (&b.kappa.kappa1, &b.kappa.kappa2),
    }
}

fn best_of(cs: &[FractionalConstraint], points: Vec<(Rational, Rational)>) -> Option<Candidate> {
    points
        .into_par_iter()
        .filter_map(|(a, b)| evaluate(cs, a, b))
        .reduce_with(|x, y| if better(&y, &x) { y } else { x })
}

fn grid(center: (&Rational, &Rational), half: &Rational, n: u32) -> Vec<(Rational, Rational)> {
    let step = half * int(2) / int(n as i64);
    let axis = |c: &Rational| -> Vec<Rational> {
        (0..=n).map(|i| c - half + &step * int(i as i64)).filter(|x| !x.is_negative() && *x <= int(1)).collect()
    };
    let (xs, ys) = (axis(center.0), axis(center.1));
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in &xs {
        for y in &ys {
            out.push((x.clone(), y.clone()));
        }
    }
    out
}

/// Constraints ranked by value at the point, smallest first.
fn ranked<'a>(cs: &'a [FractionalConstraint], kp: &KappaPoint) -> Vec<&'a FractionalConstraint> {
    let mut v: Vec<(Rational, &FractionalConstraint)> =
        cs.iter().filter_map(|c| c.value(&kp.kappa1, &kp.kappa2).map(|v| (v, c))).collect();
    v.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.id.cmp(&b.1.id)));
    v.into_iter().map(|(_, c)| c).collect()
}

const POLISH_WIDTH: usize = 8;

/// Vertices among the `POLISH_WIDTH` lowest constraints at the incumbent
/// and the region edges.
fn polish_points(cs: &[FractionalConstraint], kp: &KappaPoint) -> Vec<(Rational, Rational)> {
    let near: Vec<&FractionalConstraint> = ranked(cs, kp).into_iter().take(POLISH_WIDTH).collect();
    let edges = edges();
    let mut pts = Vec::new();
    for i in 0..near.len() {
        for j in i + 1..near.len() {
            for k in j + 1..near.len() {
                if let Some(v) = solve_vertex(near[i], near[j], near[k]) {
                    pts.push((v.kappa1, v.kappa2));
                }
            }
            for e in &edges {
                if let Some(p) = solve2(equalize(near[i], near[j]), e.clone()) {
                    pts.push(p);
                }
            }
        }
    }
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            if let Some(p) = solve2(edges[i].clone(), edges[j].clone()) {
                pts.push(p);
            }
        }
    }
    pts
}

pub fn optimize(opts: &OptimizeOptions) -> Result<Optimum> {
    if opts.grid_n < 64 {
        return Err(crate::error::invalid("grid_n", format!("must be at least 64, got {}", opts.grid_n)));
    }
    let cs: Vec<FractionalConstraint> = builtin_constraints()
        .into_iter()
        .filter(|c| opts.families.is_empty() || opts.families.contains(&c.family))
        .collect();
    if cs.is_empty() {
        return Err(Error::Infeasible("no constraints selected".into()));
    }
    let n = opts.grid_n;
    let half = rat(1, 2);
    let mut best = best_of(&cs, grid((&half, &half), &half, n))
        .ok_or_else(|| Error::Infeasible("no admissible grid point".into()))?;
    let mut width = int(2) / int(n as i64);
    for _ in 0..opts.refine_rounds {
        let center = (best.kappa.kappa1.clone(), best.kappa.kappa2.clone());
        if let Some(c) = best_of(&cs, grid((&center.0, &center.1), &width, n.min(32))) {
            if better(&c, &best) {
                best = c;
            }
        }
        width /= int(4);
    }
    loop {
        let pts = polish_points(&cs, &best.kappa);
        match best_of(&cs, pts) {
            Some(c) if better(&c, &best) && c.limit.theta_star > best.limit.theta_star => best = c,
            _ => break,
        }
    }
    Ok(Optimum {
        kappa: best.kappa,
        theta_star: best.limit.theta_star,
        active_ids: best.limit.active_ids,
        side_ok: best.limit.side_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_id(id: &str) -> FractionalConstraint {
        builtin_constraints().into_iter().find(|c| c.id == id).unwrap()
    }

    #[test]
    fn table_shape() {
        let cs = builtin_constraints();
        assert_eq!(cs.len(), 27);
        for (f, n) in [(Family::A, 9), (Family::B, 9), (Family::C, 4), (Family::D, 4), (Family::Global, 1)] {
            assert_eq!(cs.iter().filter(|c| c.family == f).count(), n);
        }
        let a1 = by_id("A1");
        assert_eq!((a1.p.clone(), a1.q0.clone(), a1.q1.clone(), a1.q2.clone()), (int(1), int(3), int(-1), int(0)));
        let b5 = by_id("B5");
        assert_eq!((b5.p.clone(), b5.q0.clone(), b5.q1.clone(), b5.q2.clone()), (int(17), int(45), int(-16), int(0)));
        assert_eq!(by_id("A1").to_string(), "1/(3 - k1)");
        assert_eq!(by_id("A7").to_string(), "18/(42 + 7k1 + 9k2)");
        assert_eq!(by_id("G").to_string(), "3/(8)");
    }

    #[test]
    fn optimum_point() {
        let kp = KappaPoint::new(rat(12, 43), rat(24, 43)).unwrap();
        let t = theta_limit(&kp).unwrap();
        assert_eq!(t.theta_star, rat(43, 117));
        assert_eq!(t.active_ids, vec!["A1", "A2", "A7"]);
        assert!(t.side_ok);
    }

    #[test]
    fn origin() {
        let kp = KappaPoint::new(int(0), int(0)).unwrap();
        let t = theta_limit(&kp).unwrap();
        assert_eq!(t.theta_star, rat(1, 3));
        assert_eq!(t.active_ids, vec!["A1", "A2", "B1", "B6", "D1"]);
    }

    #[test]
    fn infeasible_points() {
        assert!(matches!(KappaPoint::new(rat(4, 5), rat(4, 5)), Err(Error::Infeasible(_))));
        assert!(KappaPoint::new(rat(-1, 5), rat(1, 5)).is_err());
        let raw = KappaPoint { kappa1: rat(9, 10), kappa2: rat(9, 10) };
        assert!(theta_limit(&raw).is_err());
    }

    #[test]
    fn vertices() {
        let v = solve_vertex(&by_id("A1"), &by_id("A2"), &by_id("A7")).unwrap();
        assert_eq!((v.kappa1, v.kappa2, v.value), (rat(12, 43), rat(24, 43), rat(43, 117)));
        assert!(solve_vertex(&by_id("A1"), &by_id("A1"), &by_id("A2")).is_none());
        let v = solve_vertex(&by_id("A1"), &by_id("A2"), &by_id("G")).unwrap();
        assert_eq!((v.kappa1.clone(), v.kappa2.clone(), v.value.clone()), (rat(1, 3), rat(2, 3), rat(3, 8)));
        let kp = KappaPoint::new(v.kappa1, v.kappa2).unwrap();
        assert!(side_condition(&kp.kappa1, &kp.kappa2, &v.value));
        // the other constraints cut below 3/8 there
        assert!(theta_limit(&kp).unwrap().theta_star < rat(3, 8));
    }

    #[test]
    fn optimizer_default() {
        let o = optimize(&OptimizeOptions::default()).unwrap();
        assert_eq!(o.theta_star, rat(43, 117));
        assert_eq!((o.kappa.kappa1, o.kappa.kappa2), (rat(12, 43), rat(24, 43)));
        assert_eq!(o.active_ids, vec!["A1", "A2", "A7"]);
    }

    #[test]
    fn family_a_alone_reaches_the_same_optimum() {
        let opts = OptimizeOptions { families: vec![Family::A, Family::Global], ..Default::default() };
        let o = optimize(&opts).unwrap();
        assert_eq!(o.theta_star, rat(43, 117));
    }

    #[test]
    fn small_grid_rejected() {
        let opts = OptimizeOptions { grid_n: 32, ..Default::default() };
        assert!(optimize(&opts).is_err());
    }
}
