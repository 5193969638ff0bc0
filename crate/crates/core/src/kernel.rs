//! Even test functions with closed-form Fourier transforms.
//!
//! Convention: `fhat(xi) = integral f(x) e(-x xi) dx`.

use crate::error::{invalid, Result};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    /// `max(0, 1 - |x|/s)`; transform decays like `xi^-2`.
    Triangle,
    /// Triangle convolved with itself, normalized to 1 at 0; decays like `xi^-4`.
    Triangle2,
    /// `exp(-pi x^2 / s^2)`; not compactly supported, truncated at 12 standard widths.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    pub kind: KernelKind,
    pub scale: f64,
    pub f_at_0: f64,
    pub fhat_at_0: f64,
}

/// Normalized sinc, `sin(pi x) / (pi x)`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let px = PI * x;
        px.sin() / px
    }
}

/// Centered cubic B-spline supported on `[-2, 2]`.
fn cubic_bspline(u: f64) -> f64 {
    let a = u.abs();
    if a < 1.0 {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    } else if a < 2.0 {
        let t = 2.0 - a;
        t * t * t / 6.0
    } else {
        0.0
    }
}

impl Kernel {
    pub fn new(kind: KernelKind, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid("scale", format!("must be positive, got {scale}")));
        }
        let fhat_at_0 = match kind {
            KernelKind::Triangle => scale,
            KernelKind::Triangle2 => 1.5 * scale,
            KernelKind::Gaussian => scale,
        };
        Ok(Self { kind, scale, f_at_0: 1.0, fhat_at_0 })
    }

    pub fn triangle(scale: f64) -> Result<Self> {
        Self::new(KernelKind::Triangle, scale)
    }

    pub fn triangle2(scale: f64) -> Result<Self> {
        Self::new(KernelKind::Triangle2, scale)
    }

    pub fn gaussian(scale: f64) -> Result<Self> {
        Self::new(KernelKind::Gaussian, scale)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = self.scale;
        match self.kind {
            KernelKind::Triangle => (1.0 - x.abs() / s).max(0.0),
            KernelKind::Triangle2 => 1.5 * cubic_bspline(x / s),
            KernelKind::Gaussian => (-PI * (x / s).powi(2)).exp(),
        }
    }

    pub fn eval_hat(&self, xi: f64) -> f64 {
        let s = self.scale;
        match self.kind {
            KernelKind::Triangle => s * sinc(s * xi).powi(2),
            KernelKind::Triangle2 => 1.5 * s * sinc(s * xi).powi(4),
            KernelKind::Gaussian => s * (-PI * (s * xi).powi(2)).exp(),
        }
    }

    /// Radius beyond which `eval` is treated as zero.
    pub fn support_radius(&self) -> f64 {
        match self.kind {
            KernelKind::Triangle => self.scale,
            KernelKind::Triangle2 => 2.0 * self.scale,
            KernelKind::Gaussian => 12.0 * self.standard_width(),
        }
    }

    /// Standard deviation of the Gaussian profile, `s / sqrt(2 pi)`.
    pub fn standard_width(&self) -> f64 {
        self.scale / (2.0 * PI).sqrt()
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            KernelKind::Triangle => "triangle",
            KernelKind::Triangle2 => "triangle2",
            KernelKind::Gaussian => "gaussian",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(a + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for k in [Kernel::triangle(1.5).unwrap(), Kernel::triangle2(0.7).unwrap(), Kernel::gaussian(1.0).unwrap()] {
            assert_eq!(k.eval(0.0), k.f_at_0);
            assert!((k.eval_hat(0.0) - k.fhat_at_0).abs() < 1e-14);
            let r = k.support_radius();
            for xi in [0.0, 0.3, 1.0, 2.25] {
                // f is even, so the transform is a cosine integral
                let q = simpson(|x| k.eval(x) * (2.0 * PI * x * xi).cos(), -r, r, 20_000);
                assert!((q - k.eval_hat(xi)).abs() < 1e-9, "{} xi={xi}: {q} vs {}", k.name(), k.eval_hat(xi));
            }
        }
    }

    #[test]
    fn kernels_are_even() {
        for k in [Kernel::triangle(2.0).unwrap(), Kernel::triangle2(1.0).unwrap(), Kernel::gaussian(0.5).unwrap()] {
            for x in [0.1, 0.77, 1.9, 3.3] {
                assert_eq!(k.eval(x), k.eval(-x));
                assert_eq!(k.eval_hat(x), k.eval_hat(-x));
            }
        }
    }

    #[test]
    fn gaussian_tail_beyond_radius_is_negligible() {
        let k = Kernel::gaussian(1.0).unwrap();
        assert!(k.eval(k.support_radius()) < 1e-30);
        assert!(Kernel::gaussian(0.0).is_err());
    }
}
