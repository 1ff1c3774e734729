//! Closed forms and library routines checked against independent
//! integral representations.

use gsek::bessel::bessel_k;
use gsek::kernels::{drifted_kernel, gauss_parts, resolvent_kernel};
use gsek::potential::{f_antiderivative, f_profile};
use gsek::quadrature::{grid_oracle_integrate, integrate_1d, integrate_space, Domain, Tol};
use gsek::quantities::{s_value, sup_s, SupOptions};
use gsek::{parse, QuadConfig, SpacePoint};
use proptest::prelude::*;

/// `K_nu(z) = int_0^inf exp(-z cosh u) cosh(nu u) du`.
fn bessel_integral(nu: f64, z: f64) -> f64 {
    // the integrand is below e^{-z cosh u} < 1e-300 beyond this
    let top = (700.0 / z).max(2.0).acosh() + 1.0;
    integrate_1d(|u| (-z * u.cosh()).exp() * (nu * u).cosh(), 0.0, top, Tol::new(1e-300, 1e-13)).value
}

#[test]
fn bessel_matches_integral_representation() {
    for nu in [0.0, 0.5, 1.0, 1.5, 2.3] {
        for z in [0.05, 0.7, 1.0, 3.0, 20.0] {
            let a = bessel_k(nu, z).unwrap();
            let b = bessel_integral(nu, z);
            assert!(((a - b) / b).abs() < 1e-9, "nu {nu} z {z}: {a} vs {b}");
        }
    }
}

/// `int_0^inf e^{-lambda s} p_alpha(s, x, z) ds` by quadrature in `s`.
fn resolvent_integral(lambda: f64, alpha: &SpacePoint, x: &SpacePoint, z: &SpacePoint) -> f64 {
    let tol = Tol::new(1e-14, 1e-11);
    let f = |s: f64| if s <= 0.0 { 0.0 } else { (-lambda * s).exp() * drifted_kernel(alpha, s, x, z).unwrap() };
    let mut total = 0.0;
    let edges = [0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0];
    for w in edges.windows(2) {
        total += integrate_1d(f, w[0], w[1], tol).value;
    }
    total
}

#[test]
fn resolvent_kernel_matches_time_integral() {
    for d in 1..=3 {
        let alpha = SpacePoint::new((0..d).map(|i| 0.4 - 0.3 * i as f64).collect()).unwrap();
        let x = SpacePoint::origin(d);
        let z = SpacePoint::new((0..d).map(|i| 0.7 + 0.2 * i as f64).collect()).unwrap();
        for lambda in [0.5, 2.0] {
            let a = resolvent_kernel(lambda, &alpha, &x, &z).unwrap();
            let b = resolvent_integral(lambda, &alpha, &x, &z);
            assert!(((a - b) / b).abs() < 1e-7, "d {d} lambda {lambda}: {a} vs {b}");
        }
    }
}

#[test]
fn gaussian_mass_of_disk_matches_grid() {
    let cfg = QuadConfig::with_tol(1e-11, 1e-9);
    let t = 0.3;
    let x = [0.4, -0.2];
    let r2 = |z: &[f64]| (z[0] - x[0]).powi(2) + (z[1] - x[1]).powi(2);
    let adaptive = integrate_space(2, |z| gauss_parts(t, 2, r2(z)), &Domain::ball(vec![0.0, 0.0], 1.0), &cfg).unwrap();
    let grid = grid_oracle_integrate(
        |z| if z[0].hypot(z[1]) <= 1.0 { gauss_parts(t, 2, r2(z)) } else { 0.0 },
        &[-1.0, -1.0],
        &[1.0, 1.0],
        800,
    );
    assert!((adaptive.value - grid.value).abs() < 2e-4, "{adaptive:?} {grid:?}");
}

/// `S(V, t, x, y)` in d = 1 by a two-dimensional grid over `(s, z)`.
fn s_grid(t: f64, x: f64, y: f64) -> f64 {
    let g = |s: f64, a: f64, b: f64| gauss_parts(s, 1, (a - b) * (a - b));
    let gt = g(t, x, y);
    grid_oracle_integrate(|p| g(p[0], x, p[1]) * g(t - p[0], p[1], y) / gt, &[0.0, -1.0], &[t, 1.0], 1200).value
}

#[test]
fn occupation_functional_matches_grid() {
    let cfg = QuadConfig::with_tol(1e-10, 1e-8);
    let v = parse("ball:1,1", 1).unwrap();
    for (t, x, y) in [(1.0, 0.0, 0.0), (0.5, 0.3, -0.8), (2.0, 1.5, 1.5)] {
        let a = s_value(&v, t, &SpacePoint::on_axis(1, x), &SpacePoint::on_axis(1, y), &cfg).unwrap();
        let b = s_grid(t, x, y);
        assert!((a.value - b).abs() < 2e-3 * b.max(0.1), "t {t} x {x} y {y}: {a:?} vs {b}");
    }
}

#[test]
fn f_antiderivative_matches_quadrature() {
    for n in [10.0, 100.0, 1000.0] {
        let lo = 1.0 / (25.0 * n);
        let q = integrate_1d(|r| f_profile(r).unwrap(), lo, 1.0 / 25.0, Tol::new(1e-13, 1e-11));
        let exact = f_antiderivative(1.0 / 25.0).unwrap() - f_antiderivative(lo).unwrap();
        assert!((q.value - exact).abs() < 1e-9, "n {n}: {q:?} vs {exact}");
    }
}

#[test]
fn constant_sup_is_time() {
    let cfg = QuadConfig::with_tol(1e-10, 1e-8);
    for d in 1..=3 {
        let v = parse("const:1", d).unwrap();
        let r = sup_s(&v, 0.7, &cfg, &SupOptions::default()).unwrap();
        assert!((r.value - 0.7).abs() < 1e-8, "d {d}: {r:?}");
    }
    // the free kernel has unit mass, so S of a scaled constant is linear
    let v = parse("scale:2.5(const:1)", 2).unwrap();
    let x = SpacePoint::on_axis(2, 0.3);
    let e = s_value(&v, 0.4, &x, &x, &cfg).unwrap();
    assert!((e.value - 1.0).abs() < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn occupation_is_symmetric(t in 0.1f64..3.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let cfg = QuadConfig::with_tol(1e-10, 1e-8);
        let v = parse("ball:1,1", 1).unwrap();
        let (px, py) = (SpacePoint::on_axis(1, x), SpacePoint::on_axis(1, y));
        let a = s_value(&v, t, &px, &py, &cfg).unwrap();
        let b = s_value(&v, t, &py, &px, &cfg).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-7 + a.err_bound + b.err_bound);
        prop_assert!(a.value >= -1e-12 && a.value <= t + 1e-9);
    }

    #[test]
    fn occupation_is_translation_covariant(t in 0.1f64..2.0, x in -1.0f64..1.0, h in -2.0f64..2.0) {
        let cfg = QuadConfig::with_tol(1e-10, 1e-8);
        let v = parse("ball:0.5,1", 2).unwrap();
        let w = parse(&format!("ball:0.5,1,{h},0"), 2).unwrap();
        let p = SpacePoint::new(vec![x, 0.2]).unwrap();
        let q = SpacePoint::new(vec![x + h, 0.2]).unwrap();
        let a = s_value(&v, t, &p, &p, &cfg).unwrap();
        let b = s_value(&w, t, &q, &q, &cfg).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-7 + a.err_bound + b.err_bound);
    }

    #[test]
    fn chapman_kolmogorov_on_the_line(s in 0.05f64..1.0, u in 0.05f64..1.0, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let t = s + u;
        let g = |tt: f64, a: f64, b: f64| gauss_parts(tt, 1, (a - b) * (a - b));
        let e = integrate_1d(|z| g(s, x, z) * g(u, z, y), -30.0, 30.0, Tol::new(1e-14, 1e-11));
        prop_assert!((e.value - g(t, x, y)).abs() < 1e-9 * g(t, x, y).max(1.0));
    }
}
