//! Finite computations around Poissonian pair correlation of `alpha n^theta mod 1`.
//!
//! * [`sequences`]: generating the points and circle arithmetic.
//! * [`stats`]: pair correlation, gap histograms, distances to the Poisson law.
//! * [`expsum`] and [`kernel`]: exponential sums and the smoothed statistic.
//! * [`dual`]: Poisson-dual transforms, eta-sets and van der Corput phases.
//! * [`counting`]: spacing counters for the double large sieve.
//! * [`optimizer`] and [`holder`]: exact rational exponent bookkeeping.

pub mod counting;
pub mod dual;
pub mod error;
pub mod expsum;
pub mod holder;
pub mod kernel;
pub mod optimizer;
pub mod sequences;
pub mod stats;
pub mod summation;

pub use error::{Error, Result};
