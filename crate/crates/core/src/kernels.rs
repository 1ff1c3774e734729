//! Closed-form kernels: the Gauss-Weierstrass heat kernel, its drifted
//! version, the three-regime comparison kernel `K(t, x, y)`, the resolvent
//! kernel of `lambda - Delta + 2 alpha . grad`, and the Newtonian kernel.
//!
//! Every public function checks its arguments and returns a [`Result`]. The
//! `*_parts` helpers skip the checks and take precomputed norms; integrands
//! call those in their inner loops.
//!
//! Exponents below [`UNDERFLOW_EXP`] give exactly 0.

use std::f64::consts::PI;

use crate::bessel;
use crate::error::{check_dim, domain, Error, Result};
use crate::point::{dist_sq, dot, norm, SpacePoint};

/// `exp(x)` for `x` below this is returned as exactly zero.
pub const UNDERFLOW_EXP: f64 = -745.0;

#[inline]
pub(crate) fn exp_or_zero(x: f64) -> f64 {
    if x < UNDERFLOW_EXP {
        0.0
    } else {
        x.exp()
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("time must be finite and positive, got {t}")))
    }
}

/// `g(t, x, y) = (4 pi t)^{-d/2} exp(-|y - x|^2 / (4t))`.
pub fn gauss_weierstrass(t: f64, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    check_time(t)?;
    check_dim(x.dim(), y.dim())?;
    Ok(gauss_parts(t, x.dim(), dist_sq(x.coords(), y.coords())))
}

/// Heat kernel from the squared distance.
#[inline]
pub fn gauss_parts(t: f64, dim: usize, r2: f64) -> f64 {
    let e = -r2 / (4.0 * t);
    if e < UNDERFLOW_EXP {
        return 0.0;
    }
    (4.0 * PI * t).powf(-0.5 * dim as f64) * e.exp()
}

/// `p_alpha(s, x, z) = g(s, x - 2 alpha s, z)`, the fundamental solution of
/// `d/dt = Delta - 2 alpha . grad`.
pub fn drifted_kernel(alpha: &SpacePoint, s: f64, x: &SpacePoint, z: &SpacePoint) -> Result<f64> {
    check_time(s)?;
    check_dim(x.dim(), alpha.dim())?;
    check_dim(x.dim(), z.dim())?;
    let r2: f64 = (0..x.dim())
        .map(|i| {
            let c = x[i] - 2.0 * alpha[i] * s - z[i];
            c * c
        })
        .sum();
    Ok(gauss_parts(s, x.dim(), r2))
}

/// The comparison kernel `K(t, x, y)`.
///
/// All three regimes share the factor `exp(-(|x||y| - <x, y>)/2)` and the
/// cutoff `|x| <= t|y|`; the remaining factor is
/// `|x|^{2-d} (1 + |x||y|)^{(d-3)/2}` for `d >= 3`,
/// `log(1 + (|x||y|)^{-1/2})` for `d = 2` and `sqrt(t) (1 + t|y|^2)^{-1/2}`
/// for `d = 1`. At `x = 0` with `d >= 2` the kernel is infinite and
/// [`Error::SingularPoint`] is returned.
pub fn sharp_kernel(t: f64, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    check_time(t)?;
    check_dim(x.dim(), y.dim())?;
    let xn = x.norm();
    let yn = y.norm();
    if xn > t * yn {
        return Ok(0.0);
    }
    if xn == 0.0 && x.dim() >= 2 {
        return Err(Error::SingularPoint);
    }
    Ok(sharp_parts(t, x.dim(), xn, yn, dot(x.coords(), y.coords())))
}

/// `K(t, x, y)` from `|x|`, `|y|` and `<x, y>`. Requires `|x| > 0` for `d >= 2`.
#[inline]
pub fn sharp_parts(t: f64, dim: usize, xn: f64, yn: f64, xy: f64) -> f64 {
    if xn > t * yn {
        return 0.0;
    }
    let prod = xn * yn;
    let e = -0.5 * (prod - xy).max(0.0);
    let common = exp_or_zero(e);
    if common == 0.0 {
        return 0.0;
    }
    let factor = match dim {
        1 => t.sqrt() / (1.0 + t * yn * yn).sqrt(),
        2 => (1.0 / prod.sqrt()).ln_1p(),
        d => xn.powi(2 - d as i32) * (1.0 + prod).powf(0.5 * (d as f64 - 3.0)),
    };
    common * factor
}

/// Kernel of `(lambda - Delta + 2 alpha . grad)^{-1}`,
/// `int_0^inf e^{-lambda s} p_alpha(s, x, z) ds`, in closed form through
/// `K_{d/2-1}`.
///
/// `lambda = 0` is accepted as a limit when `alpha != 0` or `d >= 3`; with
/// `lambda = 0`, `alpha = 0` and `d <= 2` the integral diverges.
pub fn resolvent_kernel(
    lambda: f64,
    alpha: &SpacePoint,
    x: &SpacePoint,
    z: &SpacePoint,
) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    check_dim(x.dim(), alpha.dim())?;
    check_dim(x.dim(), z.dim())?;
    let d = x.dim();
    let an = alpha.norm();
    if lambda == 0.0 && an == 0.0 && d <= 2 {
        return Err(Error::Divergent(format!(
            "int_0^inf g(s, x, z) ds is infinite for d = {d}"
        )));
    }
    let diff: Vec<f64> = (0..d).map(|i| z[i] - x[i]).collect();
    let r = norm(&diff);
    if r == 0.0 && d >= 2 {
        return Err(Error::SingularPoint);
    }
    let kappa = (lambda + an * an).sqrt();
    Ok(resolvent_parts(d, kappa, r, dot(&diff, alpha.coords())))
}

/// Resolvent kernel from `kappa = sqrt(lambda + |alpha|^2)`, `r = |z - x|` and
/// `<z - x, alpha>`.
#[inline]
pub fn resolvent_parts(dim: usize, kappa: f64, r: f64, diff_dot_alpha: f64) -> f64 {
    if kappa == 0.0 {
        return newtonian_parts(dim, r);
    }
    let e = -diff_dot_alpha - r * kappa;
    if e < UNDERFLOW_EXP {
        return 0.0;
    }
    let pre = e.exp();
    match dim {
        1 => pre / (2.0 * kappa),
        3 => pre / (4.0 * PI * r),
        d => {
            let nu = 0.5 * d as f64 - 1.0;
            let ks = bessel::k_scaled_unchecked(nu.abs(), r * kappa);
            (2.0 * PI).powf(-0.5 * d as f64) * (kappa / r).powf(nu) * ks * pre
        }
    }
}

/// Kernel of `int_0^inf g(s, x, z) ds`,
/// `Gamma(d/2 - 1) / (4 pi^{d/2}) |x - z|^{2-d}`, defined for `d >= 3`.
pub fn newtonian_kernel(x: &SpacePoint, z: &SpacePoint) -> Result<f64> {
    check_dim(x.dim(), z.dim())?;
    let d = x.dim();
    if d <= 2 {
        return Err(Error::Divergent(format!(
            "int_0^inf g(s, x, z) ds is infinite for d = {d}"
        )));
    }
    let r = dist_sq(x.coords(), z.coords()).sqrt();
    if r == 0.0 {
        return Err(Error::SingularPoint);
    }
    Ok(newtonian_parts(d, r))
}

#[inline]
pub fn newtonian_parts(dim: usize, r: f64) -> f64 {
    newtonian_constant(dim) * r.powi(2 - dim as i32)
}

pub fn newtonian_constant(dim: usize) -> f64 {
    let d = dim as f64;
    libm::tgamma(0.5 * d - 1.0) / (4.0 * PI.powf(0.5 * d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> SpacePoint {
        SpacePoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn heat_kernel_values() {
        let g0 = gauss_weierstrass(1.0, &p(&[0.0]), &p(&[0.0])).unwrap();
        assert_relative_eq!(g0, 0.282_094_791_773_878_1, max_relative = 1e-14);
        let g2 = gauss_weierstrass(1.0, &p(&[0.0]), &p(&[2.0])).unwrap();
        assert_relative_eq!(g2, 0.282_094_791_773_878_1 * (-1.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn heat_kernel_errors() {
        assert!(matches!(gauss_weierstrass(0.0, &p(&[0.0]), &p(&[0.0])), Err(Error::Domain(_))));
        assert!(matches!(
            gauss_weierstrass(1.0, &p(&[0.0]), &p(&[0.0, 1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn heat_kernel_underflow_is_zero() {
        assert_eq!(gauss_weierstrass(1e-3, &p(&[0.0]), &p(&[10.0])).unwrap(), 0.0);
    }

    #[test]
    fn drift_values() {
        let a = p(&[1.0]);
        let v = drifted_kernel(&a, 1.0, &p(&[0.0]), &p(&[2.0])).unwrap();
        assert_relative_eq!(v, 0.282_094_791_773_878_1 * (-4.0f64).exp(), max_relative = 1e-14);
        let zero = p(&[0.0, 0.0]);
        let (x, z) = (p(&[0.3, -1.0]), p(&[1.0, 2.0]));
        assert_eq!(
            drifted_kernel(&zero, 0.7, &x, &z).unwrap(),
            gauss_weierstrass(0.7, &x, &z).unwrap()
        );
    }

    #[test]
    fn sharp_kernel_values() {
        let v = sharp_kernel(1.0, &p(&[1.0, 0.0, 0.0]), &p(&[2.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-15);
        let v = sharp_kernel(1.0, &p(&[0.0, 1.0, 0.0]), &p(&[2.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(v, (-1.0f64).exp(), max_relative = 1e-15);
        let v = sharp_kernel(1.0, &p(&[0.5, 0.0]), &p(&[2.0, 0.0])).unwrap();
        assert_relative_eq!(v, 2.0f64.ln(), max_relative = 1e-15);
        let v = sharp_kernel(1.0, &p(&[0.5]), &p(&[2.0])).unwrap();
        assert_relative_eq!(v, 1.0 / 5.0f64.sqrt(), max_relative = 1e-15);
        assert_eq!(sharp_kernel(1.0, &p(&[3.0, 0.0]), &p(&[2.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn sharp_kernel_singular_origin() {
        assert_eq!(sharp_kernel(1.0, &p(&[0.0, 0.0]), &p(&[1.0, 0.0])), Err(Error::SingularPoint));
        assert_eq!(
            sharp_kernel(1.0, &p(&[0.0, 0.0, 0.0]), &p(&[1.0, 0.0, 0.0])),
            Err(Error::SingularPoint)
        );
        // d = 1 is finite at the origin
        assert!(sharp_kernel(1.0, &p(&[0.0]), &p(&[1.0])).unwrap() > 0.0);
    }

    #[test]
    fn resolvent_closed_forms() {
        let v = resolvent_kernel(1.0, &p(&[0.0; 3]), &p(&[0.0; 3]), &p(&[1.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(v, (-1.0f64).exp() / (4.0 * PI), max_relative = 1e-14);
        let v = resolvent_kernel(2.0, &p(&[0.0]), &p(&[0.0]), &p(&[1.0])).unwrap();
        let k = 2.0f64.sqrt();
        assert_relative_eq!(v, (-k).exp() / (2.0 * k), max_relative = 1e-14);
    }

    #[test]
    fn resolvent_divergence_and_singularity() {
        let o2 = p(&[0.0, 0.0]);
        assert!(matches!(
            resolvent_kernel(0.0, &o2, &o2, &p(&[1.0, 0.0])),
            Err(Error::Divergent(_))
        ));
        assert_eq!(resolvent_kernel(1.0, &o2, &o2, &o2), Err(Error::SingularPoint));
        // lambda = 0 with drift is a finite limit
        assert!(resolvent_kernel(0.0, &p(&[1.0, 0.0]), &o2, &p(&[1.0, 0.0])).unwrap() > 0.0);
    }

    #[test]
    fn resolvent_lambda_zero_three_d_is_newtonian() {
        let o = p(&[0.0; 3]);
        let z = p(&[0.0, 2.0, 0.0]);
        assert_relative_eq!(
            resolvent_kernel(0.0, &o, &o, &z).unwrap(),
            newtonian_kernel(&o, &z).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn newtonian_values() {
        let v = newtonian_kernel(&p(&[0.0; 3]), &p(&[2.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(v, 1.0 / (8.0 * PI), max_relative = 1e-14);
        let v = newtonian_kernel(&p(&[0.0; 4]), &p(&[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_relative_eq!(v, 1.0 / (4.0 * PI * PI), max_relative = 1e-14);
        assert!(matches!(newtonian_kernel(&p(&[0.0; 2]), &p(&[1.0, 0.0])), Err(Error::Divergent(_))));
        assert_eq!(newtonian_kernel(&p(&[0.0; 3]), &p(&[0.0; 3])), Err(Error::SingularPoint));
    }

    #[test]
    fn exponent_identity() {
        // <z, a> + |z| sqrt(l + |a|^2) = <z, a> + |z||a| + |z| l / (sqrt(l + |a|^2) + |a|)
        let cases = [([0.3, -1.2, 2.0], [1.5, 0.2, -0.7], 0.8), ([4.0, 0.0, 1.0], [-2.0, 3.0, 0.5], 3.1)];
        for (z, a, l) in cases {
            let zn = norm(&z);
            let an = norm(&a);
            let za = dot(&z, &a);
            let lhs = za + zn * (l + an * an).sqrt();
            let rhs = za + zn * an + zn * l / ((l + an * an).sqrt() + an);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
        }
    }
}
