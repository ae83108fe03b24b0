mod common;

use common::{phi2_oracle, phi_oracle};
use proptest::prelude::*;
use xccy_eps::numerics::*;

#[test]
fn phi_matches_quadrature() {
    let mut x = -8.0;
    while x <= 8.0 {
        let d = (std_normal_cdf(x) - phi_oracle(x)).abs();
        assert!(d <= 1e-14, "x={x} diff={d:e}");
        x += 0.125;
    }
    assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
}

#[test]
fn phi_reflection() {
    for i in -160..=160 {
        let x = i as f64 * 0.05;
        assert!((std_normal_cdf(x) + std_normal_cdf(-x) - 1.0).abs() <= 1e-14);
    }
}

#[test]
fn phi2_matches_quadrature() {
    let pts = [-2.5, -1.0, -0.3, 0.0, 0.4, 1.2, 2.8];
    let rhos = [
        -0.99, -0.93, -0.7, -0.3, -0.05, 0.05, 0.25, 0.6, 0.8, 0.93, 0.99,
    ];
    for &a in &pts {
        for &b in &pts {
            for &r in &rhos {
                let got = bivariate_normal_cdf(a, b, r).unwrap();
                let want = phi2_oracle(a, b, r);
                assert!(
                    (got - want).abs() <= 1e-10,
                    "a={a} b={b} r={r} got={got} want={want}"
                );
            }
        }
    }
}

#[test]
fn phi2_known_values() {
    assert_eq!(bivariate_normal_cdf(0.0, 0.0, 0.0).unwrap(), 0.25);
    let want = 0.25 + 0.5f64.asin() / (2.0 * std::f64::consts::PI);
    assert!((bivariate_normal_cdf(0.0, 0.0, 0.5).unwrap() - want).abs() < 1e-14);
    assert!((want - 0.3333333).abs() < 1e-7);
    for a in [-1.0, 0.0, 1.0] {
        for r in [-0.6, 0.0, 0.95] {
            assert_eq!(
                bivariate_normal_cdf(a, f64::INFINITY, r).unwrap(),
                std_normal_cdf(a)
            );
        }
    }
}

#[test]
fn phi2_grid_identities() {
    for i in -6..=6 {
        for j in -6..=6 {
            let (a, b) = (i as f64 * 0.5, j as f64 * 0.5);
            let ind = bivariate_normal_cdf(a, b, 0.0).unwrap();
            assert!((ind - std_normal_cdf(a) * std_normal_cdf(b)).abs() <= 1e-10);
            for k in -9..=9 {
                let r = k as f64 * 0.1 + if k == 0 { 0.03 } else { 0.0 };
                let r = r.clamp(-0.99, 0.99);
                let s = bivariate_normal_cdf(a, b, r).unwrap()
                    + bivariate_normal_cdf(-a, b, -r).unwrap();
                assert!((s - std_normal_cdf(b)).abs() <= 1e-9, "a={a} b={b} r={r}");
            }
            let up = bivariate_normal_cdf(a, b, 1.0).unwrap();
            assert!((up - std_normal_cdf(a.min(b))).abs() <= 1e-10);
            let dn = bivariate_normal_cdf(a, b, -1.0).unwrap();
            assert!((dn - (std_normal_cdf(a) + std_normal_cdf(b) - 1.0).max(0.0)).abs() <= 1e-10);
        }
    }
}

#[test]
fn gaussian_law_of_large_numbers() {
    let n = 1_000_000;
    let xs = gaussian_samples(GaussianStream::new(1, 0), n);
    let m = xs.iter().sum::<f64>() / n as f64;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n as f64 - 1.0);
    assert!(m.abs() < 4.0 / (n as f64).sqrt(), "mean {m}");
    assert!((v - 1.0).abs() < 0.01, "var {v}");
}

#[test]
fn distinct_streams_are_uncorrelated() {
    let n = 200_000;
    let a = gaussian_samples(GaussianStream::new(5, 0), n);
    let b = gaussian_samples(GaussianStream::new(5, 1), n);
    let c = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() / n as f64;
    assert!(c.abs() < 4.0 / (n as f64).sqrt());
}

proptest! {
    #[test]
    fn phi_monotone(x in -10.0f64..10.0, dx in 0.0f64..1.0) {
        prop_assert!(std_normal_cdf(x) <= std_normal_cdf(x + dx));
    }

    #[test]
    fn phi2_symmetric_and_bounded(a in -5.0f64..5.0, b in -5.0f64..5.0, r in -1.0f64..=1.0) {
        let p = bivariate_normal_cdf(a, b, r).unwrap();
        let q = bivariate_normal_cdf(b, a, r).unwrap();
        prop_assert!((p - q).abs() <= 1e-14);
        prop_assert!((0.0..=1.0).contains(&p));
        prop_assert!(p <= std_normal_cdf(a).min(std_normal_cdf(b)) + 1e-12);
    }

    #[test]
    fn phi2_reflection(a in -4.0f64..4.0, b in -4.0f64..4.0, r in -0.999f64..0.999) {
        let s = bivariate_normal_cdf(a, b, r).unwrap() + bivariate_normal_cdf(-a, b, -r).unwrap();
        prop_assert!((s - std_normal_cdf(b)).abs() <= 1e-9);
    }

    #[test]
    fn stream_prefix_stable(seed in any::<u64>(), idx in 0u64..1000, n in 0usize..50) {
        let long = gaussian_samples(GaussianStream::new(seed, idx), n + 5);
        prop_assert_eq!(&long[..n], &gaussian_samples(GaussianStream::new(seed, idx), n)[..]);
    }
}
