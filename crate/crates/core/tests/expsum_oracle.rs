use num_bigint::BigUint;
use num_complex::Complex64;
use paircorr_core::expsum::{exp_sum, fourier_side, ExpSumQuery};
use paircorr_core::kernel::Kernel;
use proptest::prelude::*;
use std::f64::consts::TAU;

/// `frac((c y)^{1/3})` to 30 decimal places through an integer cube root.
fn frac_cbrt(c: u64, y: u64) -> f64 {
    let scale = BigUint::from(10u32).pow(30);
    let x = BigUint::from(c) * BigUint::from(y) * scale.pow(3);
    let r = x.cbrt() % &scale;
    // 30 digits -> keep the leading 17 for f64
    let lead: u64 = (r / BigUint::from(10u32).pow(13)).try_into().unwrap();
    lead as f64 / 1e17
}

#[test]
fn cube_root_sum_against_exact_phases() {
    // 50 y^{1/3} = (125000 y)^{1/3}
    let mut oracle = Complex64::new(0.0, 0.0);
    for y in 1..10_000u64 {
        let (s, c) = (TAU * frac_cbrt(125_000, y)).sin_cos();
        oracle += Complex64::new(c, s);
    }
    let got = exp_sum(&ExpSumQuery::new(1.0, 1.0 / 3.0, 50, 1, 10_000)).unwrap();
    assert!((got - oracle).norm() < 1e-6, "{got} vs {oracle}");
}

#[test]
fn large_k_sum_against_exact_phases() {
    // 1000 y^{1/3} = (10^9 y)^{1/3}; phases up to 1000 * 46
    let mut oracle = Complex64::new(0.0, 0.0);
    for y in 50_000..100_000u64 {
        let (s, c) = (TAU * frac_cbrt(1_000_000_000, y)).sin_cos();
        oracle += Complex64::new(c, s);
    }
    let got = exp_sum(&ExpSumQuery::new(1.0, 1.0 / 3.0, 1000, 50_000, 100_000)).unwrap();
    assert!((got - oracle).norm() < 1e-6, "{got} vs {oracle}");
}

#[test]
fn fourier_side_is_thread_count_invariant() {
    let k = Kernel::gaussian(1.0).unwrap();
    let run = |t: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .unwrap()
            .install(|| fourier_side(700, 0.1, &k, 1.0, 1.0 / 3.0).unwrap())
    };
    assert_eq!(run(1).to_bits(), run(5).to_bits());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bounded_by_term_count(alpha in 0.1f64..5.0, theta in 0.05f64..0.95, k in 1u64..200, a in 1u64..500, len in 0u64..3000) {
        let z = exp_sum(&ExpSumQuery::new(alpha, theta, k, a, a + len)).unwrap();
        prop_assert!(z.norm() <= len as f64 + 1e-9);
    }

    #[test]
    fn additive_over_ranges(alpha in 0.1f64..5.0, theta in 0.05f64..0.95, k in 1u64..200, a in 1u64..500, l1 in 0u64..2000, l2 in 0u64..2000) {
        let q = |s, e| exp_sum(&ExpSumQuery::new(alpha, theta, k, s, e)).unwrap();
        let (b, c) = (a + l1, a + l1 + l2);
        prop_assert!((q(a, b) + q(b, c) - q(a, c)).norm() < 1e-10);
    }
}
