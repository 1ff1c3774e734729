//! Pointwise values of the heat-kernel functionals.
//!
//! S, N, A, r_* and the time form of the resolvent are one-dimensional time
//! integrals of the Gaussian mass of `|V|` along a straight path. K, the
//! resolvent, the Newtonian potential and the Kato brackets are spatial
//! integrals of a kernel singular at `x`, done in polar coordinates about `x`.

use std::f64::consts::PI;

use crate::error::{check_dim, domain, Error, Result};
use crate::kernels::{newtonian_parts, resolvent_parts, sharp_parts};
use crate::point::{dist, dot, norm, SpacePoint};
use crate::potential::{integration_pieces, Piece, Potential};
use crate::quadrature::gaussian::GaussMass;
use crate::quadrature::polar::{integrate_directions, radial_numeric, sphere_area, Directions};
use crate::quadrature::{adaptive_1d, graded_mesh, Estimate, QuadConfig, Tol};

use super::layout::{symmetry, Symmetry};

/// Above this many pieces, time breakpoints come from one enclosing ball.
const MAX_BREAK_PIECES: usize = 64;

/// `exp(-RESOLVENT_CUTOFF)` is the relative size of the neglected tail of
/// the resolvent kernel.
const RESOLVENT_CUTOFF: f64 = 40.0;

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("time must be finite and positive, got {t}")))
    }
}

/// A potential with its piece decomposition, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub dim: usize,
    pub pieces: Vec<Piece>,
    /// Coordinate axis every piece is rotationally symmetric about (d = 3).
    axis: Option<usize>,
}

impl Prepared {
    pub fn new(v: &Potential) -> Self {
        let axis = match symmetry(v) {
            Symmetry::Axial(k) if v.dim() == 3 => Some(k),
            _ => None,
        };
        Self { dim: v.dim(), pieces: integration_pieces(v), axis }
    }

    fn check(&self, p: &[f64]) -> Result<()> {
        check_dim(self.dim, p.len())
    }
}

/// Times where the path `p + s v` enters, leaves or comes closest to the
/// bounding balls.
fn crossing_times(p: &[f64], v: &[f64], bounds: &[(Vec<f64>, f64)], t0: f64, t1: f64) -> Vec<f64> {
    let vv = dot(v, v);
    if vv == 0.0 {
        return Vec::new();
    }
    let merged;
    let bounds = if bounds.len() > MAX_BREAK_PIECES {
        let d = p.len();
        let mut c = vec![0.0; d];
        for (b, _) in bounds {
            for k in 0..d {
                c[k] += b[k] / bounds.len() as f64;
            }
        }
        let r = bounds.iter().map(|(b, r)| dist(b, &c) + r).fold(0.0, f64::max);
        merged = [(c, r)];
        &merged[..]
    } else {
        bounds
    };
    let mut out = Vec::new();
    for (b, r) in bounds {
        let q: Vec<f64> = p.iter().zip(b).map(|(a, c)| a - c).collect();
        let qv = dot(&q, v);
        out.push(-qv / vv);
        let disc = qv * qv - vv * (dot(&q, &q) - r * r);
        if disc > 0.0 {
            let sd = disc.sqrt();
            out.push((-qv - sd) / vv);
            out.push((-qv + sd) / vv);
        }
    }
    out.retain(|s| *s > t0 && *s < t1);
    out
}

fn merge_breaks(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    a.extend(b);
    a.sort_by(f64::total_cmp);
    let span = a.last().copied().unwrap_or(0.0) - a.first().copied().unwrap_or(0.0);
    a.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * span);
    a
}

/// `int_{t0}^{t1} weight(s) Phi(p + s v, sigma(s)) ds` over `base` breaks.
#[allow(clippy::too_many_arguments)]
fn path_mass<S, W>(
    pre: &Prepared,
    cfg: &QuadConfig,
    p: &[f64],
    v: &[f64],
    t0: f64,
    t1: f64,
    base: Vec<f64>,
    sigma: S,
    weight: W,
) -> Estimate
where
    S: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    let len = t1 - t0;
    let inner = Tol { abs: 0.1 * cfg.abs_tol / len, rel: 0.1 * cfg.rel_tol, max_evals: cfg.max_evals };
    let gm = GaussMass::new(&pre.pieces, pre.dim, cfg, inner);
    if gm.is_empty() {
        return Estimate::zero();
    }
    let breaks = match gm.bounds() {
        Some(b) => merge_breaks(base, crossing_times(p, v, &b, t0, t1)),
        None => base,
    };
    let mut c = vec![0.0; pre.dim];
    adaptive_1d(
        |s| {
            for k in 0..c.len() {
                c[k] = p[k] + s * v[k];
            }
            let w = weight(s);
            if w == 0.0 {
                return (0.0, 0.0);
            }
            let (m, e) = gm.eval(&c, sigma(s));
            (w * m, w * e)
        },
        &breaks,
        cfg.tol(),
    )
}

/// `S(V, t, x, y)`: the bridge occupation integral of `|V|`,
/// `int_0^t int g(s,x,z) g(t-s,z,y) / g(t,x,y) |V(z)| dz ds`.
pub fn s_value(v: &Potential, t: f64, x: &SpacePoint, y: &SpacePoint, cfg: &QuadConfig) -> Result<Estimate> {
    check_time(t)?;
    cfg.validate()?;
    let pre = Prepared::new(v);
    pre.check(x.coords())?;
    pre.check(y.coords())?;
    Ok(s_raw(&pre, t, x.coords(), y.coords(), cfg))
}

pub(crate) fn s_raw(pre: &Prepared, t: f64, x: &[f64], y: &[f64], cfg: &QuadConfig) -> Estimate {
    let vel: Vec<f64> = x.iter().zip(y).map(|(a, b)| (b - a) / t).collect();
    path_mass(pre, cfg, x, &vel, 0.0, t, graded_mesh(t), |s| (2.0 * s * (t - s) / t).max(0.0).sqrt(), |_| 1.0)
}

/// `N(V, t, x, y)`, the two-piece tilted Gaussian functional.
pub fn n_value(v: &Potential, t: f64, x: &SpacePoint, y: &SpacePoint, cfg: &QuadConfig) -> Result<Estimate> {
    check_time(t)?;
    cfg.validate()?;
    let pre = Prepared::new(v);
    pre.check(x.coords())?;
    pre.check(y.coords())?;
    Ok(n_raw(&pre, t, x.coords(), y.coords(), cfg))
}

pub(crate) fn n_raw(pre: &Prepared, t: f64, x: &[f64], y: &[f64], cfg: &QuadConfig) -> Estimate {
    // centre y + (tau/t)(x - y), variance 2 tau on (0, t/2) and 2 (t - tau) on (t/2, t)
    let vel: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - b) / t).collect();
    let h = 0.5 * t;
    let half_cfg = QuadConfig { abs_tol: 0.5 * cfg.abs_tol, ..*cfg };
    let mesh = |a: f64| graded_mesh(h).into_iter().map(|s| a + s).collect::<Vec<_>>();
    let first = path_mass(pre, &half_cfg, y, &vel, 0.0, h, mesh(0.0), |s| (2.0 * s).sqrt(), |_| 1.0);
    let second = path_mass(pre, &half_cfg, y, &vel, h, t, mesh(h), |s| (2.0 * (t - s)).max(0.0).sqrt(), |_| 1.0);
    first.plus(second).scaled((4.0 * PI).powf(0.5 * pre.dim as f64))
}

/// `int_0^t int g(s, x, z) |V(z)| dz ds`, the integrand of `A(t)`.
pub fn a_point(v: &Potential, t: f64, x: &SpacePoint, cfg: &QuadConfig) -> Result<Estimate> {
    check_time(t)?;
    cfg.validate()?;
    let pre = Prepared::new(v);
    pre.check(x.coords())?;
    Ok(r_raw(&pre, t, &vec![0.0; pre.dim], x.coords(), cfg))
}

/// `int_0^t int p_alpha(s, x, z) |V(z)| dz ds`, the integrand of `r_*`.
pub fn r_point(v: &Potential, t: f64, alpha: &SpacePoint, x: &SpacePoint, cfg: &QuadConfig) -> Result<Estimate> {
    check_time(t)?;
    cfg.validate()?;
    let pre = Prepared::new(v);
    pre.check(x.coords())?;
    pre.check(alpha.coords())?;
    Ok(r_raw(&pre, t, alpha.coords(), x.coords(), cfg))
}

pub(crate) fn r_raw(pre: &Prepared, t: f64, alpha: &[f64], x: &[f64], cfg: &QuadConfig) -> Estimate {
    let vel: Vec<f64> = alpha.iter().map(|a| -2.0 * a).collect();
    path_mass(pre, cfg, x, &vel, 0.0, t, graded_mesh(t), |s| (2.0 * s).sqrt(), |_| 1.0)
}

/// `int_0^inf e^{-lambda s} int p_alpha(s, x, z) |V(z)| dz ds`: the resolvent
/// applied to `|V|` at `x`, in time form. Used to drive searches and as a
/// cross-check of [`resolvent_point`].
pub(crate) fn resolvent_time_raw(pre: &Prepared, lambda: f64, alpha: &[f64], x: &[f64], cfg: &QuadConfig) -> Estimate {
    let s_max = RESOLVENT_CUTOFF / lambda;
    let vel: Vec<f64> = alpha.iter().map(|a| -2.0 * a).collect();
    let mut base = vec![0.0];
    let mut s = s_max;
    while s > 1e-9 * s_max {
        base.push(s);
        s *= 0.25;
    }
    let base = merge_breaks(base, graded_mesh(1.0 / lambda));
    let base: Vec<f64> = base.into_iter().filter(|s| *s <= s_max).collect();
    let c = QuadConfig { abs_tol: cfg.abs_tol, ..*cfg };
    path_mass(pre, &c, x, &vel, 0.0, s_max, base, |s| (2.0 * s).sqrt(), |s| (-lambda * s).exp())
}

/// `int k(|z - x|, direction) amp(z) dz` over the pieces, in polar
/// coordinates about `x` with a direction-dependent radial cap.
///
/// `about` is a direction the kernel and cap are invariant around (`None`
/// for isotropic kernels). When it and `x` lie on the symmetry axis of the
/// pieces, only the polar angle from that axis is integrated.
fn kernel_integral<K, C>(
    pre: &Prepared,
    x: &[f64],
    about: Option<&[f64]>,
    kernel: K,
    cap: C,
    max_cap: f64,
    signed: bool,
    cfg: &QuadConfig,
) -> Result<Estimate>
where
    K: Fn(f64, &[f64]) -> f64,
    C: Fn(&[f64]) -> f64,
{
    let dim = pre.dim;
    let area = sphere_area(dim);
    let live: Vec<&Piece> = pre
        .pieces
        .iter()
        .filter(|p| match p.bounding_ball() {
            Some((b, r)) => dist(x, &b) - r < max_cap,
            None => true,
        })
        .collect();
    if live.is_empty() {
        return Ok(Estimate::zero());
    }
    let share = 1.0 / live.len() as f64;
    let tol = Tol { abs: cfg.abs_tol * share, rel: cfg.rel_tol, max_evals: cfg.max_evals };
    let inner = Tol { abs: 0.1 * tol.abs / area, rel: 0.1 * tol.rel, max_evals: cfg.max_evals };
    let on_axis = |u: &[f64], k: usize| u.iter().enumerate().all(|(i, c)| i == k || *c == 0.0);
    let axis = pre.axis.filter(|&k| on_axis(x, k) && about.is_none_or(|u| on_axis(u, k)));
    let mut total = Estimate::zero();
    let mut z = vec![0.0; dim];
    for piece in live {
        let bound = piece.bounding_ball();
        if bound.is_none() && !max_cap.is_finite() {
            return Err(Error::Divergent("kernel integral over an unbounded region".into()));
        }
        let mut evals = 0;
        let ray = |w: &[f64], z: &mut [f64], evals: &mut u64| {
            let iv = piece.region.ray(x, w).clip(cap(w));
            let (v, e, n) = radial_numeric(
                |r| {
                    for k in 0..dim {
                        z[k] = x[k] + r * w[k];
                    }
                    let a = piece.amp.value(z);
                    let a = if signed { a } else { a.abs() };
                    a * kernel(r, w)
                },
                dim,
                &iv,
                inner,
            );
            *evals += n;
            (v, e)
        };
        if let Some(k) = axis {
            // polar angle theta from +e_k; the azimuth contributes 2 pi
            let j = (k + 1) % 3;
            let (lo, hi) = match &bound {
                Some((b, r)) if dist(x, b) > *r => {
                    let beta = (r / dist(x, b)).asin();
                    if b[k] >= x[k] { (0.0, beta) } else { (PI - beta, PI) }
                }
                _ => (0.0, PI),
            };
            let mut w = [0.0; 3];
            let t1 = Tol { abs: tol.abs / (2.0 * PI), ..tol };
            let est = adaptive_1d(
                |th| {
                    w[k] = th.cos();
                    w[j] = th.sin();
                    let (v, e) = ray(&w, &mut z, &mut evals);
                    (v * th.sin(), e * th.sin())
                },
                &[lo, 0.5 * (lo + hi), hi],
                t1,
            );
            total = total.plus(Estimate { evals, ..est.scaled(2.0 * PI) });
            continue;
        }
        let dirs = match &bound {
            Some((b, r)) => Directions::towards_ball(x, b, *r),
            None => Directions::Full,
        };
        let est = integrate_directions(
            dim,
            &dirs,
            |w| ray(w, &mut z, &mut evals),
            tol,
        );
        total = total.plus(Estimate { evals, ..est });
    }
    Ok(total)
}

/// `K(V, t, x, y) = int K(t, z - x, y) |V(z)| dz`.
pub fn k_potential_value(
    v: &Potential,
    t: f64,
    x: &SpacePoint,
    y: &SpacePoint,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    check_time(t)?;
    cfg.validate()?;
    let pre = Prepared::new(v);
    pre.check(x.coords())?;
    pre.check(y.coords())?;
    k_raw(&pre, t, x.coords(), y.coords(), cfg)
}

pub(crate) fn k_raw(pre: &Prepared, t: f64, x: &[f64], y: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    let yn = norm(y);
    let cap = t * yn;
    if cap == 0.0 {
        return Ok(Estimate::zero());
    }
    let dim = pre.dim;
    kernel_integral(pre, x, Some(y), |r, w| sharp_parts(t, dim, r, yn, r * dot(w, y)), |_| cap, cap, false, cfg)
}

/// `int R_{lambda, alpha}(x, z) |V(z)| dz` with the resolvent kernel of
/// `lambda - Delta + 2 alpha . grad`.
pub fn resolvent_point(
    v: &Potential,
    lambda: f64,
    alpha: &SpacePoint,
    x: &SpacePoint,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda must be finite and positive, got {lambda}")));
    }
    cfg.validate()?;
    let pre = Prepared::new(v);
    pre.check(x.coords())?;
    pre.check(alpha.coords())?;
    resolvent_raw(&pre, lambda, alpha.coords(), x.coords(), cfg)
}

pub(crate) fn resolvent_raw(pre: &Prepared, lambda: f64, alpha: &[f64], x: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    let an = norm(alpha);
    let kappa = (lambda + an * an).sqrt();
    let dim = pre.dim;
    // whole-space constants integrate to a / lambda exactly
    let mut whole = 0.0;
    let rest: Vec<Piece> = pre
        .pieces
        .iter()
        .filter(|p| {
            if p.region.is_whole() {
                if let Some(a) = p.amp.as_const() {
                    whole += a.abs() / lambda;
                    return false;
                }
            }
            true
        })
        .cloned()
        .collect();
    let sub = Prepared { dim, pieces: rest, axis: pre.axis };
    let est = kernel_integral(
        &sub,
        x,
        Some(alpha),
        |r, w| resolvent_parts(dim, kappa, r, r * dot(w, alpha)),
        |w| RESOLVENT_CUTOFF / (dot(w, alpha) + kappa),
        RESOLVENT_CUTOFF / (kappa - an),
        false,
        cfg,
    )?;
    Ok(est.plus(Estimate::exact(whole)))
}

/// `Delta^{-1} V(x) = -int_0^inf int g(s, x, z) V(z) dz ds`, a Newtonian
/// potential; finite for `d >= 3` and bounded support.
pub fn delta_inverse(v: &Potential, x: &SpacePoint, cfg: &QuadConfig) -> Result<Estimate> {
    cfg.validate()?;
    let pre = Prepared::new(v);
    pre.check(x.coords())?;
    delta_inverse_raw(&pre, x.coords(), cfg)
}

pub(crate) fn delta_inverse_raw(pre: &Prepared, x: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    if pre.pieces.is_empty() {
        return Ok(Estimate::zero());
    }
    if pre.dim <= 2 {
        return Err(Error::Divergent(format!("the Newtonian potential diverges in d = {}", pre.dim)));
    }
    if pre.pieces.iter().any(|p| p.region.is_whole()) {
        return Err(Error::Divergent("the Newtonian potential of a function with unbounded support".into()));
    }
    let dim = pre.dim;
    let est = kernel_integral(pre, x, None, |r, _| newtonian_parts(dim, r), |_| f64::INFINITY, f64::INFINITY, true, cfg)?;
    Ok(est.scaled(-1.0))
}

/// The Kato bracket at `x`: `int_{|z-x| < sqrt(4t)} |V| |z-x|^{2-d}` for
/// `d >= 3`, `int_{|z-x| < sqrt(4t)} |V| log(4t / |z-x|^2)` for `d = 2` and
/// `sqrt(t) int_{|z-x| < sqrt(4t)} |V|` for `d = 1`.
pub fn kato_point(v: &Potential, t: f64, x: &SpacePoint, cfg: &QuadConfig) -> Result<Estimate> {
    check_time(t)?;
    cfg.validate()?;
    let pre = Prepared::new(v);
    pre.check(x.coords())?;
    kato_raw(&pre, t, x.coords(), cfg)
}

pub(crate) fn kato_raw(pre: &Prepared, t: f64, x: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    let dim = pre.dim;
    let rad = (4.0 * t).sqrt();
    let st = t.sqrt();
    kernel_integral(
        pre,
        x,
        None,
        |r, _| match dim {
            1 => st,
            2 => (4.0 * t / (r * r)).ln(),
            d => r.powi(2 - d as i32),
        },
        |_| rad,
        rad,
        false,
        cfg,
    )
}

/// `int_0^t p_alpha(s, x, z) ds` for fixed points.
pub fn drift_time_integral(t: f64, alpha: &SpacePoint, x: &SpacePoint, z: &SpacePoint, cfg: &QuadConfig) -> Result<Estimate> {
    check_time(t)?;
    check_dim(x.dim(), alpha.dim())?;
    check_dim(x.dim(), z.dim())?;
    Ok(drift_time_raw(t, alpha.coords(), x.coords(), z.coords(), cfg))
}

pub(crate) fn drift_time_raw(t: f64, alpha: &[f64], x: &[f64], z: &[f64], cfg: &QuadConfig) -> Estimate {
    let d = x.len();
    // p_alpha(s, x, z) = g(s, x - 2 alpha s, z); the exponent is smallest
    // near s = |z - x| / (2 |alpha|)
    let diff: Vec<f64> = (0..d).map(|i| z[i] - x[i]).collect();
    let an = norm(alpha);
    let mut breaks = graded_mesh(t);
    if an > 0.0 {
        let s_star = norm(&diff) / (2.0 * an);
        let extra: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|k| k * s_star).filter(|s| *s > 0.0 && *s < t).collect();
        breaks = merge_breaks(breaks, extra);
    }
    let dd = d as f64;
    adaptive_1d(
        |s| {
            let r2: f64 = (0..d).map(|i| (diff[i] + 2.0 * alpha[i] * s).powi(2)).sum();
            let e = -r2 / (4.0 * s);
            if e < crate::kernels::UNDERFLOW_EXP {
                (0.0, 0.0)
            } else {
                ((4.0 * PI * s).powf(-0.5 * dd) * e.exp(), 0.0)
            }
        },
        &breaks,
        cfg.tol(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::parse;

    fn sp(v: &[f64]) -> SpacePoint {
        SpacePoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn axial_fast_path_matches_full_angles() {
        let cfg = QuadConfig::with_tol(1e-9, 1e-7);
        let v = crate::potential::cylinder_potential(2).unwrap();
        let fast = Prepared::new(&v);
        assert_eq!(fast.axis, Some(0));
        let slow = Prepared { axis: None, ..fast.clone() };
        let x = [0.7, 0.0, 0.0];
        let y = [-1.3, 0.0, 0.0];
        let a = k_raw(&fast, 1.0, &x, &y, &cfg).unwrap();
        let b = k_raw(&slow, 1.0, &x, &y, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-6 * b.value, "{a:?} {b:?}");
        assert!(a.evals < b.evals);
        let al = [0.4, 0.0, 0.0];
        let a = resolvent_raw(&fast, 1.0, &al, &x, &cfg).unwrap();
        let b = resolvent_raw(&slow, 1.0, &al, &x, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-6 * b.value, "{a:?} {b:?}");
        let a = delta_inverse_raw(&fast, &x, &cfg).unwrap();
        let b = delta_inverse_raw(&slow, &x, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-6 * b.value.abs(), "{a:?} {b:?}");
    }

    #[test]
    fn constant_identities() {
        let cfg = QuadConfig::default();
        for d in 1..=3 {
            let v = Potential::constant(d, 1.0).unwrap();
            let x = sp(&vec![0.3; d]);
            let y = sp(&vec![-1.0; d]);
            let s = s_value(&v, 0.7, &x, &y, &cfg).unwrap();
            assert!((s.value - 0.7).abs() < 1e-10);
            let n = n_value(&v, 0.7, &x, &y, &cfg).unwrap();
            assert!((n.value - (4.0 * PI).powf(0.5 * d as f64) * 0.7).abs() < 1e-9);
            let r = r_point(&v, 0.7, &y, &x, &cfg).unwrap();
            assert!((r.value - 0.7).abs() < 1e-10);
            let e = resolvent_point(&v, 2.0, &y, &x, &cfg).unwrap();
            assert!((e.value - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_potential() {
        let cfg = QuadConfig::default();
        let v = Potential::zero(2);
        let o = sp(&[0.0, 0.0]);
        let y = sp(&[2.0, 0.0]);
        assert_eq!(s_value(&v, 1.0, &o, &y, &cfg).unwrap().value, 0.0);
        assert_eq!(k_potential_value(&v, 1.0, &o, &y, &cfg).unwrap().value, 0.0);
    }

    #[test]
    fn newtonian_of_unit_ball() {
        let v = parse("ball:1,1", 3).unwrap();
        let e = delta_inverse(&v, &sp(&[0.0; 3]), &QuadConfig::default()).unwrap();
        assert!((e.value + 0.5).abs() < 1e-8, "{e:?}");
        // outside: -1/(3 r)
        let e = delta_inverse(&v, &sp(&[2.0, 0.0, 0.0]), &QuadConfig::default()).unwrap();
        assert!((e.value + 1.0 / 6.0).abs() < 1e-8, "{e:?}");
        assert!(matches!(delta_inverse(&parse("ball:1,1", 2).unwrap(), &sp(&[0.0; 2]), &QuadConfig::default()), Err(Error::Divergent(_))));
    }

    #[test]
    fn kato_bracket_examples() {
        let cfg = QuadConfig::default();
        let v = parse("ball:1,1", 3).unwrap();
        let e = kato_point(&v, 1.0, &sp(&[0.0; 3]), &cfg).unwrap();
        assert!((e.value - 2.0 * PI).abs() < 1e-7);
        let v1 = parse("ball:1,1", 1).unwrap();
        let e = kato_point(&v1, 1.0, &sp(&[0.0]), &cfg).unwrap();
        assert!((e.value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn k_cutoff_outside() {
        let v = parse("ball:0.5,1,3,0,0", 3).unwrap();
        let e = k_potential_value(&v, 1.0, &sp(&[0.0; 3]), &sp(&[2.0, 0.0, 0.0]), &QuadConfig::default()).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn resolvent_time_and_space_forms_agree() {
        let cfg = QuadConfig::with_tol(1e-10, 1e-9);
        for d in 1..=3 {
            let v = parse("ball:1,1", d).unwrap();
            let pre = Prepared::new(&v);
            let mut alpha = vec![0.0; d];
            alpha[0] = 0.7;
            let mut x = vec![0.0; d];
            x[0] = -0.4;
            let a = resolvent_time_raw(&pre, 1.3, &alpha, &x, &cfg);
            let b = resolvent_raw(&pre, 1.3, &alpha, &x, &cfg).unwrap();
            assert!((a.value - b.value).abs() < 1e-7 * b.value, "d={d}: {} {}", a.value, b.value);
        }
    }

    #[test]
    fn drift_integral_tends_to_resolvent_at_zero() {
        let cfg = QuadConfig::with_tol(1e-13, 1e-11);
        let alpha = [0.8, 0.0, 0.0];
        let x = [0.0; 3];
        let z = [-1.0, 0.3, 0.0];
        let long = drift_time_raw(400.0, &alpha, &x, &z, &cfg);
        let diff: Vec<f64> = (0..3).map(|i| z[i] - x[i]).collect();
        let exact = resolvent_parts(3, 0.8, norm(&diff), dot(&diff, &alpha));
        assert!((long.value - exact).abs() < 1e-9, "{} {}", long.value, exact);
    }
}
