use crate::args::*;
use crate::report::{num, Csv, Report};
use crate::svg::BarPlot;
use anyhow::{bail, Result};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use paircorr_core::counting::{self, CzRegion, EtaSpacingQuery, QuadrupleQuery, SextupleQuery};
use paircorr_core::dual::check_dual_block;
use paircorr_core::expsum::smoothed_report;
use paircorr_core::holder::holder_best_theta;
use paircorr_core::kernel::{Kernel, KernelKind};
use paircorr_core::optimizer::{builtin_constraints, optimize, Family, OptimizeOptions, Rational};
use paircorr_core::sequences::{sorted_points, SequenceSpec, SortedPoints};
use paircorr_core::stats::{
    gap_histogram, histogram_distance, pair_correlation, pair_correlation_histogram, poisson_reference, Metric,
};
use serde_json::{json, Value};

/// Dual-check residual constants: at most one point per run above
/// `SOFT * bound`, none above `HARD * bound`.
pub const SOFT: f64 = 5.0;
pub const HARD: f64 = 20.0;
/// Bound ratio allowed for the quadruple and sextuple counts.
pub const COUNT_RATIO_LIMIT: f64 = 100.0;
/// Largest brute-force cross-check run alongside a count, in comparisons.
pub const BRUTE_BUDGET: u64 = 10_000_000;

pub fn run(cmd: &Command) -> Result<Report> {
    match cmd {
        Command::Gaps(a) => gaps(a),
        Command::Paircorr(a) => paircorr(a),
        Command::Smoothed(a) => smoothed(a),
        Command::DualCheck(a) => dual_check(a),
        Command::Count(a) => count(a),
        Command::Optimize(a) => optimize_cmd(a),
        Command::Holder(a) => holder(a),
    }
}

/// Bin edges printed without the `i * w` roundoff tail (`0.30000000000000004`).
fn edge(x: f64) -> String {
    num(format!("{x:.12}").parse().expect("decimal"))
}

fn seq_params(s: &SeqArgs) -> Value {
    json!({
        "alpha": s.alpha,
        "theta": s.theta,
        "n": s.n,
        "exclude_squares": s.exclude_squares,
        "synthetic_uniform": s.synthetic_uniform,
    })
}

fn points(s: &SeqArgs) -> Result<SortedPoints> {
    if s.synthetic_uniform {
        if s.n == 0 {
            bail!("n must be positive");
        }
        return Ok(SortedPoints::equally_spaced(s.n as usize));
    }
    let mut spec = SequenceSpec::new(s.alpha, s.theta, s.n);
    if s.exclude_squares {
        spec = spec.excluding_squares();
    }
    Ok(sorted_points(&spec)?)
}

fn gaps(a: &GapsArgs) -> Result<Report> {
    // validate the binning before generating anything
    poisson_reference(a.bin, a.t_max)?;
    let pts = points(&a.seq)?;
    let h = gap_histogram(&pts, a.bin, a.t_max)?;
    let r = poisson_reference(a.bin, a.t_max)?;
    let mut rep = Report::new("gaps");
    let mut params = seq_params(&a.seq);
    params["bin"] = a.bin.into();
    params["t_max"] = a.t_max.into();
    rep.set("params", params);
    rep.set("n_points", pts.len() as u64);
    rep.set("sup_distance", histogram_distance(&h, &r, Metric::Sup)?);
    rep.set("chi2_distance", histogram_distance(&h, &r, Metric::ChiSquared)?);
    rep.set("empirical_overflow", h.overflow);
    rep.set("poisson_overflow", r.overflow);
    let mut csv = Csv::new("bin_lo,bin_hi,empirical_mass,poisson_mass");
    for i in 0..h.len() {
        csv.push(&[edge(h.bin_lo(i)), edge(h.bin_hi(i)), num(h.masses[i]), num(r.masses[i])]);
    }
    rep.csv = Some(csv);
    let heights: Vec<f64> = h.masses.iter().map(|m| m / a.bin).collect();
    let title = format!("scaled gaps, theta = {}, N = {}", a.seq.theta, pts.len());
    rep.svg = Some(
        BarPlot { title: &title, x_max: a.t_max, bin_width: a.bin, heights: &heights, overlay: &|t| (-t).exp() }
            .render(),
    );
    Ok(rep)
}

fn paircorr(a: &PaircorrArgs) -> Result<Report> {
    let mut rep = Report::new("paircorr");
    let mut params = seq_params(&a.seq);
    if let Some(bin) = a.bin {
        pair_hist_params(&mut params, bin, a.t_max);
        rep.set("params", params);
        let pts = points(&a.seq)?;
        let h = pair_correlation_histogram(&pts, bin, a.t_max)?;
        let flat = 2.0 * bin;
        let mut csv = Csv::new("bin_lo,bin_hi,mass,poisson_mass");
        let mut dev = 0.0f64;
        for i in 0..h.len() {
            let width = (h.bin_hi(i).min(a.t_max) - h.bin_lo(i)).max(0.0);
            dev = dev.max((h.masses[i] - 2.0 * width).abs());
            csv.push(&[edge(h.bin_lo(i)), edge(h.bin_hi(i)), num(h.masses[i]), num(2.0 * width)]);
        }
        rep.set("n_points", pts.len() as u64);
        rep.set("max_bin_deviation", dev);
        rep.set("overflow", h.overflow);
        rep.csv = Some(csv);
        let heights: Vec<f64> = h.masses.iter().map(|m| m / bin).collect();
        let title = format!("pair distances, theta = {}, N = {}", a.seq.theta, pts.len());
        rep.svg = Some(
            BarPlot { title: &title, x_max: a.t_max, bin_width: bin, heights: &heights, overlay: &|_| flat / bin }
                .render(),
        );
        return Ok(rep);
    }
    if a.s.is_empty() {
        bail!("need at least one s");
    }
    params["s"] = a.s.clone().into();
    rep.set("params", params);
    let pts = points(&a.seq)?;
    let mut csv = Csv::new("s,r2,poisson");
    let mut values = Vec::new();
    let mut dev = 0.0f64;
    for &s in &a.s {
        let r2 = pair_correlation(&pts, s)?;
        dev = dev.max((r2 - 2.0 * s).abs());
        values.push(json!({ "s": s, "r2": r2, "poisson": 2.0 * s }));
        csv.push(&[num(s), num(r2), num(2.0 * s)]);
    }
    rep.set("n_points", pts.len() as u64);
    rep.set("values", values);
    rep.set("max_abs_deviation", dev);
    rep.csv = Some(csv);
    Ok(rep)
}

fn pair_hist_params(params: &mut Value, bin: f64, t_max: f64) {
    params["bin"] = bin.into();
    params["t_max"] = t_max.into();
}

fn smoothed(a: &SmoothedArgs) -> Result<Report> {
    let kind = match a.kernel {
        KernelArg::Triangle => KernelKind::Triangle,
        KernelArg::Triangle2 => KernelKind::Triangle2,
        KernelArg::Gaussian => KernelKind::Gaussian,
    };
    let kernel = Kernel::new(kind, a.scale)?;
    if a.n.is_empty() {
        bail!("need at least one N");
    }
    let mut rep = Report::new("smoothed");
    rep.set(
        "params",
        json!({ "alpha": a.alpha, "theta": a.theta, "n": a.n, "eps": a.eps, "kernel": kernel.name(), "scale": a.scale }),
    );
    let mut csv = Csv::new("N,fourier_side,direct_side,identity_residual,f0");
    let mut rows = Vec::new();
    for &n in &a.n {
        let r = smoothed_report(n, a.eps, &kernel, a.alpha, a.theta)?;
        csv.push(&[n.to_string(), num(r.fourier_side), num(r.direct_side), num(r.identity_residual), num(r.f_at_0)]);
        rows.push(json!({
            "N": n,
            "fourier_side": r.fourier_side,
            "direct_side": r.direct_side,
            "identity_residual": r.identity_residual,
            "f0": r.f_at_0,
            "fhat0": r.fhat_at_0,
        }));
    }
    rep.set("rows", rows);
    rep.csv = Some(csv);
    Ok(rep)
}

fn dual_check(a: &DualCheckArgs) -> Result<Report> {
    if a.k.is_empty() || a.y.is_empty() {
        bail!("need at least one k and one Y");
    }
    let mut rep = Report::new("dual-check");
    rep.set("params", json!({ "alpha": a.alpha, "theta": a.theta, "k": a.k, "y": a.y }));
    let mut csv = Csv::new("k,Y,direct_abs,dual_abs,residual,bound,ratio");
    let mut max_ratio = 0.0f64;
    let mut soft_misses = Vec::new();
    let mut empty = Vec::new();
    let mut below = Vec::new();
    for &k in &a.k {
        for &y in &a.y {
            let c = check_dual_block(k, y, a.alpha, a.theta)?;
            csv.push(&[
                k.to_string(),
                y.to_string(),
                num(c.direct.norm()),
                num(c.dual.value.norm()),
                num(c.residual),
                num(c.bound),
                num(c.ratio),
            ]);
            let point = json!([k, y]);
            if c.dual.below_threshold {
                below.push(point.clone());
            }
            if c.dual.empty_window {
                empty.push(point.clone());
            }
            max_ratio = max_ratio.max(c.ratio);
            if c.ratio > HARD {
                rep.violations.push(format!("k={k} Y={y}: ratio {} exceeds {HARD}", c.ratio));
            }
            if c.ratio > SOFT {
                soft_misses.push(point);
            }
        }
    }
    if soft_misses.len() > 1 {
        rep.violations.push(format!("{} points exceed ratio {SOFT}", soft_misses.len()));
    }
    rep.set("soft_constant", SOFT);
    rep.set("hard_constant", HARD);
    rep.set("max_ratio", max_ratio);
    rep.set("soft_misses", soft_misses);
    rep.set("empty_dual_windows", empty);
    rep.set("below_window_threshold", below);
    rep.csv = Some(csv);
    Ok(rep)
}

fn count(a: &CountArgs) -> Result<Report> {
    let mut rep = Report::new("count");
    match a.kind {
        CountKind::Rs => {
            let exponent = a.exponent.unwrap_or(-0.5);
            let q = QuadrupleQuery::new(a.m_lo.unwrap_or(a.m_hi / 2), a.m_hi, exponent, a.delta);
            q.validate()?;
            rep.set("kind", "rs");
            rep.set("params", json!({ "m_lo": q.m_lo, "m_hi": q.m_hi, "exponent": exponent, "delta": a.delta }));
            let r = counting::rs_bound_ratio(&q)?;
            rep.set("count", r.count);
            let size = q.m_hi - q.m_lo;
            if size.saturating_pow(4) <= BRUTE_BUDGET {
                let b = counting::brute_quadruples(&q)?;
                rep.set("brute_force_count", b);
                if b != r.count {
                    rep.violations.push(format!("fast count {} differs from brute force {b}", r.count));
                }
            }
            rep.set("bound", r.bound);
            rep.set("ratio", r.ratio);
            rep.set("guards", Vec::<String>::new());
            if r.ratio > COUNT_RATIO_LIMIT {
                rep.violations.push(format!("ratio {} exceeds {COUNT_RATIO_LIMIT}", r.ratio));
            }
        }
        CountKind::Cz => {
            let exponent = a.exponent.unwrap_or(117.0 / 43.0);
            let mut q = SextupleQuery::new(a.m, a.h1, a.h2, exponent, a.delta);
            if a.mirror {
                q = q.mirrored();
            }
            q.validate()?;
            let region = CzRegion { eps: a.eps, separation: a.separation };
            rep.set("kind", "cz");
            rep.set(
                "params",
                json!({
                    "m": a.m, "h1": a.h1, "h2": a.h2, "exponent": exponent, "delta": a.delta,
                    "mirror": a.mirror, "eps": a.eps, "separation": a.separation,
                }),
            );
            let r = counting::cz_bound_ratio(&q, &region)?;
            rep.set("count", r.count);
            if q.cells().saturating_pow(2) <= BRUTE_BUDGET {
                let t = q.phases()?;
                let b = counting::brute_close_pairs(&t, q.threshold(&t));
                rep.set("brute_force_count", b);
                if b != r.count {
                    rep.violations.push(format!("fast count {} differs from brute force {b}", r.count));
                }
            }
            rep.set("bound", json!({ "bound1": r.bound1, "bound2": r.bound2 }));
            rep.set("ratio", json!({ "ratio1": r.ratio1, "ratio2": r.ratio2 }));
            rep.set("guards", r.violations.clone());
            for ratio in [r.ratio1, r.ratio2].into_iter().flatten() {
                if ratio > COUNT_RATIO_LIMIT {
                    rep.violations.push(format!("ratio {ratio} exceeds {COUNT_RATIO_LIMIT}"));
                }
            }
        }
        CountKind::B1 => {
            let x = a.x.unwrap_or(64.0 * a.k * a.y1.powf(-a.theta));
            let mut q = EtaSpacingQuery::new(a.k, a.y1, a.y2, a.alpha, a.theta, x);
            q.z = a.z;
            q.r_window = a.r.map(|r| (r, 2 * r));
            rep.set("kind", "b1");
            rep.set(
                "params",
                json!({
                    "k": a.k, "y1": a.y1, "y2": a.y2, "alpha": a.alpha, "theta": a.theta,
                    "x": x, "z": q.z(), "r": a.r,
                }),
            );
            let r = counting::b1_bound_ratio(&q)?;
            rep.set("count", r.count);
            rep.set("set_size", r.set_size);
            if r.set_size.saturating_pow(2) <= BRUTE_BUDGET {
                let v = q.powers()?;
                let b = counting::brute_close_pairs(&v, q.threshold(&v));
                rep.set("brute_force_count", b);
                if b != r.count {
                    rep.violations.push(format!("fast count {} differs from brute force {b}", r.count));
                }
            }
            rep.set("threshold", r.threshold);
            rep.set("bound", r.bound);
            rep.set("ratio", r.ratio);
            rep.set("guards", Vec::<String>::new());
        }
    }
    Ok(rep)
}

fn optimize_cmd(a: &OptimizeArgs) -> Result<Report> {
    let mut families = Vec::new();
    for f in &a.families {
        match Family::parse(f) {
            Some(x) => families.push(x),
            None => bail!("unknown family {f:?} (expected a, b, c, d or global)"),
        }
    }
    families.sort();
    families.dedup();
    let opts = OptimizeOptions { grid_n: a.grid_n, refine_rounds: a.refine, families: families.clone() };
    let o = optimize(&opts)?;
    let used: Vec<&str> = if families.is_empty() {
        vec!["A", "B", "C", "D", "global"]
    } else {
        families.iter().map(|f| f.name()).collect()
    };
    let formulas: Vec<Value> = builtin_constraints()
        .into_iter()
        .filter(|c| o.active_ids.contains(&c.id))
        .map(|c| json!({ "id": c.id, "bound": c.to_string() }))
        .collect();
    let mut rep = Report::new("optimize");
    rep.set("params", json!({ "grid_n": a.grid_n, "refine": a.refine }));
    rep.set("theta_star", o.theta_star.to_string());
    rep.set("kappa", vec![o.kappa.kappa1.to_string(), o.kappa.kappa2.to_string()]);
    rep.set("active", o.active_ids.clone());
    rep.set("active_constraints", formulas);
    rep.set("families_used", used);
    rep.set("side_condition_ok", o.side_ok);
    Ok(rep)
}

/// `x` rounded half away from zero to `places` decimals, using integers only.
pub fn decimal(x: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let (n, d) = (x.numer().abs() * &scale, x.denom().clone());
    let q: BigInt = (n * 2 + &d) / (d * 2);
    let int_part = &q / &scale;
    let frac_part = (&q % &scale).to_string();
    let sign = if x.is_negative() && !q.is_zero() { "-" } else { "" };
    format!("{sign}{int_part}.{}{frac_part}", "0".repeat(places as usize - frac_part.len()))
}

fn holder(a: &HolderArgs) -> Result<Report> {
    if a.k.is_empty() {
        bail!("need at least one k");
    }
    let mut rep = Report::new("holder");
    rep.set("params", json!({ "k": a.k }));
    let mut csv = Csv::new("k,theta_k,decimal");
    let mut rows = Vec::new();
    for &k in &a.k {
        let t = holder_best_theta(k)?;
        let d = decimal(&t, 12);
        csv.push(&[k.to_string(), t.to_string(), d.clone()]);
        rows.push(json!({ "k": k, "theta_k": t.to_string(), "decimal": d }));
    }
    rep.set("rows", rows);
    rep.csv = Some(csv);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use paircorr_core::optimizer::rat;

    #[test]
    fn exact_decimals() {
        assert_eq!(decimal(&rat(1, 3), 12), "0.333333333333");
        assert_eq!(decimal(&rat(2, 3), 4), "0.6667");
        assert_eq!(decimal(&rat(7, 19), 6), "0.368421");
        assert_eq!(decimal(&rat(-1, 8), 2), "-0.13");
        assert_eq!(decimal(&rat(5, 1), 3), "5.000");
    }
}
