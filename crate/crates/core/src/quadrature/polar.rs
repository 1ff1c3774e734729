//! Integration in polar coordinates about a chosen origin: an adaptive rule
//! over directions wrapped around a per-direction radial integral.
//!
//! When the integration region sits inside a ball that excludes the origin,
//! only a cone of directions matters. That cone is
//! parametrised by `sin(psi) = sin(beta) sin(omega)`, which turns the
//! square-root edge of the chord length at tangency into a smooth function.

use std::f64::consts::PI;

use super::adaptive::{adaptive_1d, adaptive_cube, integrate_1d, Tol};
use super::Estimate;
use crate::point::{dist, norm};
use crate::region::{Intervals, Region};

/// `|S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)`.
pub(crate) fn sphere_area(dim: usize) -> f64 {
    let d = dim as f64;
    2.0 * PI.powf(0.5 * d) / libm::tgamma(0.5 * d)
}

#[derive(Debug, Clone)]
pub(crate) enum Directions {
    Full,
    /// Directions within angle `beta` of the unit vector `axis`.
    Cone { axis: Vec<f64>, sin_beta: f64 },
}

impl Directions {
    /// The cone of directions from `origin` that can meet the ball `(c, r)`,
    /// or the full sphere when the origin is inside it.
    pub(crate) fn towards_ball(origin: &[f64], c: &[f64], r: f64) -> Directions {
        let dim = origin.len();
        let d = dist(origin, c);
        if dim < 2 || d <= r * (1.0 + 1e-9) {
            return Directions::Full;
        }
        let axis: Vec<f64> = c.iter().zip(origin).map(|(a, b)| (a - b) / d).collect();
        Directions::Cone { axis, sin_beta: r / d }
    }
}

fn orthonormal_pair(a: &[f64]) -> ([f64; 3], [f64; 3]) {
    let pick = if a[0].abs() <= a[1].abs() && a[0].abs() <= a[2].abs() {
        [1.0, 0.0, 0.0]
    } else if a[1].abs() <= a[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let cross = |u: &[f64], v: &[f64; 3]| {
        [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
    };
    let mut e1 = cross(a, &pick);
    let n1 = norm(&e1);
    e1.iter_mut().for_each(|v| *v /= n1);
    let e2 = cross(a, &e1);
    (e1, e2)
}

/// `int_{S^{d-1}} radial(omega) d omega` over the given directions.
pub(crate) fn integrate_directions<F: FnMut(&[f64]) -> (f64, f64)>(
    dim: usize,
    dirs: &Directions,
    mut radial: F,
    tol: Tol,
) -> Estimate {
    match (dim, dirs) {
        (1, _) => {
            let (a, ea) = radial(&[1.0]);
            let (b, eb) = radial(&[-1.0]);
            let err = ea + eb;
            Estimate { value: a + b, err_bound: err, evals: 2, converged: err <= tol.abs.max(tol.rel * (a + b).abs()) }
        }
        (2, Directions::Full) => {
            let mut w = [0.0; 2];
            let breaks: Vec<f64> = (0..=8).map(|i| 2.0 * PI * i as f64 / 8.0).collect();
            adaptive_1d(
                |phi| {
                    w[0] = phi.cos();
                    w[1] = phi.sin();
                    radial(&w)
                },
                &breaks,
                tol,
            )
        }
        (2, Directions::Cone { axis, sin_beta }) => {
            let phi_a = axis[1].atan2(axis[0]);
            let sb = *sin_beta;
            let mut w = [0.0; 2];
            let breaks: Vec<f64> = (0..=4).map(|i| -0.5 * PI + PI * i as f64 / 4.0).collect();
            adaptive_1d(
                |om| {
                    let s = sb * om.sin();
                    let psi = s.asin();
                    let jac = sb * om.cos() / (1.0 - s * s).sqrt();
                    w[0] = (phi_a + psi).cos();
                    w[1] = (phi_a + psi).sin();
                    let (v, e) = radial(&w);
                    (v * jac, e * jac)
                },
                &breaks,
                tol,
            )
        }
        (3, Directions::Full) => {
            let mut w = [0.0; 3];
            adaptive_cube(
                |p| {
                    let (u, phi) = (p[0], p[1]);
                    let s = (1.0 - u * u).max(0.0).sqrt();
                    w[0] = s * phi.cos();
                    w[1] = s * phi.sin();
                    w[2] = u;
                    radial(&w)
                },
                &[-1.0, 0.0],
                &[1.0, 2.0 * PI],
                &[2, 4],
                tol,
            )
        }
        (3, Directions::Cone { axis, sin_beta }) => {
            let (e1, e2) = orthonormal_pair(axis);
            let sb = *sin_beta;
            let mut w = [0.0; 3];
            adaptive_cube(
                |p| {
                    let (om, phi) = (p[0], p[1]);
                    let s = sb * om.sin();
                    let c = (1.0 - s * s).sqrt();
                    let jac = s * sb * om.cos() / c;
                    let (cp, sp) = (phi.cos(), phi.sin());
                    for k in 0..3 {
                        w[k] = c * axis[k] + s * (cp * e1[k] + sp * e2[k]);
                    }
                    let (v, e) = radial(&w);
                    (v * jac, e * jac)
                },
                &[0.0, 0.0],
                &[0.5 * PI, 2.0 * PI],
                &[2, 4],
                tol,
            )
        }
        (_, Directions::Full) => {
            let m = dim - 1;
            let (lo, hi) = sphere_box(m);
            let mut w = vec![0.0; dim];
            adaptive_cube(
                |p| {
                    let jac = hyperspherical(p, &mut w);
                    let (v, e) = radial(&w);
                    (v * jac, e * jac)
                },
                &lo,
                &hi,
                &vec![2; m],
                tol,
            )
        }
        (_, Directions::Cone { axis, sin_beta }) => {
            // w = cos(psi) axis + sin(psi) u, u on the unit sphere of the
            // complement, with sin(psi) = sin(beta) sin(omega)
            let basis = complement_basis(axis);
            let m = dim - 2;
            let (slo, shi) = sphere_box(m);
            let mut lo = vec![0.0];
            lo.extend(slo);
            let mut hi = vec![0.5 * PI];
            hi.extend(shi);
            let sb = *sin_beta;
            let mut u = vec![0.0; dim - 1];
            let mut w = vec![0.0; dim];
            adaptive_cube(
                |p| {
                    let om = p[0];
                    let s = sb * om.sin();
                    let c = (1.0 - s * s).sqrt();
                    let jac = hyperspherical(&p[1..], &mut u) * s.powi(m as i32) * sb * om.cos() / c;
                    for k in 0..dim {
                        w[k] = c * axis[k];
                    }
                    for (j, b) in basis.iter().enumerate() {
                        for k in 0..dim {
                            w[k] += s * u[j] * b[k];
                        }
                    }
                    let (v, e) = radial(&w);
                    (v * jac, e * jac)
                },
                &lo,
                &hi,
                &vec![2; m + 1],
                tol,
            )
        }
    }
}

/// Parameter box of hyperspherical angles on `S^m`: `m - 1` polar angles in
/// `[0, pi]` and one azimuth in `[0, 2 pi]`.
fn sphere_box(m: usize) -> (Vec<f64>, Vec<f64>) {
    let lo = vec![0.0; m];
    let mut hi = vec![PI; m];
    hi[m - 1] = 2.0 * PI;
    (lo, hi)
}

/// Writes the point of `S^m` with angles `p` into `w` (length `m + 1`) and
/// returns the surface Jacobian.
fn hyperspherical(p: &[f64], w: &mut [f64]) -> f64 {
    let m = p.len();
    let mut jac = 1.0;
    let mut sprod = 1.0;
    for i in 0..(m - 1) {
        w[i] = sprod * p[i].cos();
        jac *= p[i].sin().powi((m - 1 - i) as i32);
        sprod *= p[i].sin();
    }
    w[m - 1] = sprod * p[m - 1].cos();
    w[m] = sprod * p[m - 1].sin();
    jac
}

/// Orthonormal basis of the complement of the unit vector `a`.
fn complement_basis(a: &[f64]) -> Vec<Vec<f64>> {
    let d = a.len();
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()));
    for &k in &order {
        if out.len() == d - 1 {
            break;
        }
        let mut v = vec![0.0; d];
        v[k] = 1.0;
        let pa: f64 = v.iter().zip(a).map(|(x, y)| x * y).sum();
        v.iter_mut().zip(a).for_each(|(x, y)| *x -= pa * y);
        for b in &out {
            let pb: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= pb * y);
        }
        let n = norm(&v);
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            out.push(v);
        }
    }
    out
}

/// `int g(r) r^{d-1} dr` over `iv`, numerically.
pub(crate) fn radial_numeric<G: FnMut(f64) -> f64>(
    mut g: G,
    dim: usize,
    iv: &Intervals,
    tol: Tol,
) -> (f64, f64, u64) {
    let (mut v, mut e, mut n) = (0.0, 0.0, 0);
    let p = (dim - 1) as i32;
    for &(a, b) in iv.as_slice() {
        debug_assert!(b.is_finite());
        let est = integrate_1d(|r| g(r) * r.powi(p), a, b, tol);
        v += est.value;
        e += est.err_bound;
        n += est.evals;
    }
    (v, e, n)
}

/// `int_{region} f(z) dz` in polar coordinates about `origin`, radius capped
/// at `r_cap`. `f` may have an integrable singularity at the origin.
pub(crate) fn integrate_region_polar<F: FnMut(&[f64]) -> f64>(
    origin: &[f64],
    region: &Region,
    r_cap: f64,
    mut f: F,
    tol: Tol,
) -> Estimate {
    let dim = origin.len();
    let dirs = match region.bounding_ball() {
        Some((c, r)) => Directions::towards_ball(origin, &c, r),
        None => Directions::Full,
    };
    let inner = Tol { abs: 0.1 * tol.abs / sphere_area(dim), rel: 0.1 * tol.rel, max_evals: tol.max_evals };
    let mut z = vec![0.0; dim];
    let mut inner_evals = 0;
    let mut est = integrate_directions(
        dim,
        &dirs,
        |w| {
            let iv = region.ray(origin, w).clip(r_cap);
            let (v, e, n) = radial_numeric(
                |r| {
                    for k in 0..dim {
                        z[k] = origin[k] + r * w[k];
                    }
                    f(&z)
                },
                dim,
                &iv,
                inner,
            );
            inner_evals += n;
            (v, e)
        },
        tol,
    );
    est.evals = inner_evals;
    est
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn ball_volumes_full_and_cone() {
        let tol = Tol::new(1e-12, 1e-11);
        for dim in 1..=4 {
            let vol = sphere_area(dim) / dim as f64;
            let inside = Region::ball(vec![0.1; dim], 1.0);
            let e = integrate_region_polar(&vec![0.0; dim], &inside, 10.0, |_| 1.0, tol);
            assert!((e.value - vol).abs() < 1e-9, "dim {dim}: {:?}", e);
            let mut c = vec![0.0; dim];
            c[0] = 3.0;
            let far = Region::ball(c, 1.0);
            let e = integrate_region_polar(&vec![0.0; dim], &far, 10.0, |_| 1.0, tol);
            assert!((e.value - vol).abs() < 1e-9, "dim {dim}: {:?}", e);
        }
    }

    #[test]
    fn coulomb_ball() {
        // int_{B(0,1)} 1/|z| dz = 2 pi in d = 3
        let e = integrate_region_polar(
            &[0.0; 3],
            &Region::ball(vec![0.0; 3], 1.0),
            10.0,
            |z| 1.0 / norm(z),
            Tol::new(1e-12, 1e-12),
        );
        assert!((e.value - 2.0 * PI).abs() < 1e-10);
    }
}
