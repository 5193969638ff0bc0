use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

/// Pair correlation, gaps, Poisson-dual sums and spacing counts for
/// `alpha n^theta mod 1`.
#[derive(Debug, Parser)]
#[command(name = "paircorr", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Histogram of scaled nearest-neighbour gaps against e^{-t}.
    Gaps(GapsArgs),
    /// R2(s) at a list of s, or the pair-distance histogram.
    Paircorr(PaircorrArgs),
    /// Both sides of the smoothed pair-correlation identity.
    Smoothed(SmoothedArgs),
    /// Block exponential sums against their stationary-phase duals.
    DualCheck(DualCheckArgs),
    /// Spacing counts behind the double large sieve.
    Count(CountArgs),
    /// Exact maximization of the exponent constraints.
    Optimize(OptimizeArgs),
    /// Best-case Hölder exponents theta_k.
    Holder(HolderArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write PREFIX.json, PREFIX.csv and PREFIX.svg.
    #[arg(long, value_name = "PREFIX")]
    pub out: Option<PathBuf>,
}

/// Accepts `0.25`, `1/3`, `-1/2`, `1e-3`.
pub fn real(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            a / b
        }
        None => s.trim().parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

/// Accepts `1000`, `1e6`, `10^6`.
pub fn count(s: &str) -> Result<u64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let v = match t.split_once('^') {
        Some((b, e)) => {
            let b: f64 = b.parse().map_err(|e| format!("{s}: {e}"))?;
            let e: f64 = e.parse().map_err(|e| format!("{s}: {e}"))?;
            b.powf(e)
        }
        None => t.parse::<f64>().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) {
        Ok(v as u64)
    } else {
        Err(format!("{s} is not a nonnegative integer"))
    }
}

#[derive(Debug, Args)]
pub struct SeqArgs {
    #[arg(long, default_value = "1", value_parser = real)]
    pub alpha: f64,
    #[arg(long, default_value = "1/3", value_parser = real)]
    pub theta: f64,
    #[arg(long, default_value = "1000000", value_parser = count)]
    pub n: u64,
    /// Skip indices that are perfect squares.
    #[arg(long)]
    pub exclude_squares: bool,
    /// Use the points i/n instead of the sequence.
    #[arg(long)]
    pub synthetic_uniform: bool,
}

#[derive(Debug, Args)]
pub struct GapsArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long, default_value = "0.1", value_parser = real)]
    pub bin: f64,
    #[arg(long, default_value = "5", value_parser = real)]
    pub t_max: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct PaircorrArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2", value_parser = real)]
    pub s: Vec<f64>,
    /// Emit the pair-distance histogram with this bin width instead.
    #[arg(long, value_parser = real)]
    pub bin: Option<f64>,
    #[arg(long, default_value = "2", value_parser = real)]
    pub t_max: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Triangle,
    Triangle2,
    Gaussian,
}

#[derive(Debug, Args)]
pub struct SmoothedArgs {
    #[arg(long, default_value = "1", value_parser = real)]
    pub alpha: f64,
    #[arg(long, default_value = "1/3", value_parser = real)]
    pub theta: f64,
    #[arg(long, value_delimiter = ',', default_value = "500,1000,2000", value_parser = count)]
    pub n: Vec<u64>,
    #[arg(long, default_value = "0.1", value_parser = real)]
    pub eps: f64,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub kernel: KernelArg,
    #[arg(long, default_value = "1", value_parser = real)]
    pub scale: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DualCheckArgs {
    #[arg(long, default_value = "1", value_parser = real)]
    pub alpha: f64,
    #[arg(long, default_value = "0.3", value_parser = real)]
    pub theta: f64,
    #[arg(long, value_delimiter = ',', default_value = "100,316,1000,3162,10000", value_parser = count)]
    pub k: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "1000,3162,10000,31623,100000", value_parser = count)]
    pub y: Vec<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountKind {
    /// Quadruples m1^a + m2^a ~ m3^a + m4^a.
    Rs,
    /// Sextuples with close second differences.
    Cz,
    /// Close pairs in an eta-set.
    B1,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(value_enum)]
    pub kind: CountKind,
    /// rs: range start (default m_hi/2).
    #[arg(long, value_parser = count)]
    pub m_lo: Option<u64>,
    /// rs: range end, also the scale M.
    #[arg(long, default_value = "128", value_parser = count)]
    pub m_hi: u64,
    /// rs/cz exponent (default -1/2 for rs, 117/43 for cz).
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    pub exponent: Option<f64>,
    /// rs: delta; cz: Delta.
    #[arg(long, default_value = "0", value_parser = real)]
    pub delta: f64,
    /// cz: m in [M, 2M).
    #[arg(long, default_value = "512", value_parser = count)]
    pub m: u64,
    #[arg(long, default_value = "4", value_parser = count)]
    pub h1: u64,
    #[arg(long, default_value = "16", value_parser = count)]
    pub h2: u64,
    /// cz: also use negative shifts.
    #[arg(long)]
    pub mirror: bool,
    /// cz: eps in the region guards.
    #[arg(long, default_value = "0", value_parser = real)]
    pub eps: f64,
    /// cz: extra separation factor between H1 and H2.
    #[arg(long, default_value = "1", value_parser = real)]
    pub separation: f64,
    /// b1: K.
    #[arg(long, default_value = "1000", value_parser = real)]
    pub k: f64,
    #[arg(long, default_value = "10000", value_parser = real)]
    pub y1: f64,
    #[arg(long, default_value = "10000", value_parser = real)]
    pub y2: f64,
    #[arg(long, default_value = "100", value_parser = real)]
    pub alpha: f64,
    #[arg(long, default_value = "0.3", value_parser = real)]
    pub theta: f64,
    /// b1: X (default 64 K Y1^-theta).
    #[arg(long, value_parser = real)]
    pub x: Option<f64>,
    /// b1: eta scale Z (default from K, Y1, Y2).
    #[arg(long, value_parser = real)]
    pub z: Option<f64>,
    /// b1: restrict m2 - m1 to [R, 2R).
    #[arg(long, value_parser = count)]
    pub r: Option<u64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, default_value = "128")]
    pub grid_n: u32,
    #[arg(long, default_value = "3")]
    pub refine: u32,
    /// Subset of a,b,c,d,global (default: all).
    #[arg(long, value_delimiter = ',')]
    pub families: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HolderArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7")]
    pub k: Vec<u32>,
    #[command(flatten)]
    pub common: Common,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Gaps(a) => &a.common,
            Command::Paircorr(a) => &a.common,
            Command::Smoothed(a) => &a.common,
            Command::DualCheck(a) => &a.common,
            Command::Count(a) => &a.common,
            Command::Optimize(a) => &a.common,
            Command::Holder(a) => &a.common,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_numbers() {
        assert_eq!(real("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(real("-1/2").unwrap(), -0.5);
        assert_eq!(real("0.25").unwrap(), 0.25);
        assert!(real("1/0").is_err());
        assert_eq!(count("10^6").unwrap(), 1_000_000);
        assert_eq!(count("1e7").unwrap(), 10_000_000);
        assert!(count("2.5").is_err());
    }
}
