//! Gaussian masses of potentials,
//! `Phi(c, sigma) = int N(c, sigma^2 I)(z) |V(z)| dz`.
//!
//! S, N, A and r_* are all time integrals of `Phi` along a moving centre,
//! so this is the hot path. Pieces with constant amplitude use the radial
//! law of a Gaussian (a chi distribution) in closed form, leaving only an
//! integral over directions; balls in `d = 3` and whole-space constants are
//! fully closed. Axis-aligned finite cylinders split into an axial integral
//! times a disk mass.

use std::f64::consts::PI;

use super::adaptive::{adaptive_1d, Tol};
use super::polar::{integrate_directions, radial_numeric, sphere_area, Directions};
use super::QuadConfig;
use crate::point::dist;
use crate::potential::{Amp, Piece};
use crate::region::{Intervals, Region};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Upper tail of the standard normal, `P(N(0,1) > u)`, accurate in both tails.
#[inline]
pub(crate) fn norm_sf(u: f64) -> f64 {
    0.5 * libm::erfc(u / std::f64::consts::SQRT_2)
}

/// `P(lo <= N(0,1) <= hi)` without cancellation in the tails.
#[inline]
pub(crate) fn norm_interval(lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if lo >= 0.0 {
        norm_sf(lo) - norm_sf(hi)
    } else if hi <= 0.0 {
        norm_sf(-hi) - norm_sf(-lo)
    } else {
        1.0 - norm_sf(-lo) - norm_sf(hi)
    }
}

/// `(P, Q)` of the regularized incomplete gamma `P(dim/2, x)`, the CDF of a
/// chi-distributed radius at `r = sqrt(2x) sigma`.
pub(crate) fn chi_pq(dim: usize, x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 1.0);
    }
    if x.is_infinite() {
        return (1.0, 0.0);
    }
    let a = 0.5 * dim as f64;
    if x < a + 1.0 {
        // P(a, x) = x^a e^{-x} / Gamma(a + 1) sum_n x^n / ((a+1)...(a+n))
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut n = 1.0;
        while term > 1e-17 * sum {
            term *= x / (a + n);
            sum += term;
            n += 1.0;
        }
        let p = (a * x.ln() - x).exp() / libm::tgamma(a + 1.0) * sum;
        (p, 1.0 - p)
    } else {
        let ex = (-x).exp();
        let q = if dim % 2 == 0 {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..(dim / 2) {
                term *= x / k as f64;
                sum += term;
            }
            ex * sum
        } else {
            let sx = x.sqrt();
            let mut q = libm::erfc(sx);
            // Q(k + 1/2) = Q(k - 1/2) + x^{k-1/2} e^{-x} / Gamma(k + 1/2)
            let mut term = sx * ex / libm::tgamma(1.5);
            for k in 1..=((dim - 1) / 2) {
                q += term;
                term *= x / (k as f64 + 1.5);
            }
            q
        };
        (1.0 - q, q)
    }
}

/// Mass of the chi law on `[r1, r2]` (radii in units of `sigma`).
#[inline]
fn chi_mass(dim: usize, r1: f64, r2: f64) -> f64 {
    let (p1, q1) = chi_pq(dim, 0.5 * r1 * r1);
    let (p2, q2) = chi_pq(dim, 0.5 * r2 * r2);
    if q1 < 0.5 { q1 - q2 } else { p2 - p1 }
}

/// `P(|N(delta e, sigma^2 I_3)| <= radius)`, closed form.
pub(crate) fn ball_mass_3d(delta: f64, radius: f64, sigma: f64) -> f64 {
    let u = (radius - delta) / sigma;
    let v = (radius + delta) / sigma;
    let first = norm_interval(-v, u);
    let second = if delta == 0.0 {
        2.0 * radius / sigma * (-0.5 * u * u).exp() / SQRT_2PI
    } else {
        let k = 2.0 * radius * delta / (sigma * sigma);
        sigma / delta * (-0.5 * u * u).exp() * (-(-k).exp_m1()) / SQRT_2PI
    };
    (first - second).max(0.0)
}

/// `P(|N(delta e, sigma^2 I_2)| <= radius)` as one angular integral.
pub(crate) fn disk_mass_2d(delta: f64, radius: f64, sigma: f64, tol: Tol) -> (f64, f64) {
    let k = 0.5 / (sigma * sigma);
    if delta == 0.0 {
        return (-(-k * radius * radius).exp_m1(), 0.0);
    }
    let tol = Tol { abs: tol.abs * PI, ..tol };
    let est = if delta < radius {
        // exit distance along angle phi from the axis towards the centre
        adaptive_1d(
            |phi| {
                let s = delta * phi.sin();
                let l = delta * phi.cos() + (radius * radius - s * s).sqrt();
                (-(-k * l * l).exp_m1(), 0.0)
            },
            &[0.0, 0.5 * PI, PI],
            tol,
        )
    } else {
        // sin(psi) = (radius / delta) sin(omega) over the tangent cone
        let sb = radius / delta;
        adaptive_1d(
            |om| {
                let s = sb * om.sin();
                let cp = (1.0 - s * s).sqrt();
                let half = radius * om.cos();
                let near = delta * cp - half;
                let jac = sb * om.cos() / cp;
                let gap = 4.0 * delta * cp * half;
                (jac * (-k * near * near).exp() * -(-k * gap).exp_m1(), 0.0)
            },
            &[0.0, 0.5 * PI],
            tol,
        )
    };
    (est.value / PI, est.err_bound / PI)
}

enum Kind {
    WholeConst(f64),
    Ball3 { center: Vec<f64>, radius: f64, amp: f64 },
    Disk2 { center: Vec<f64>, radius: f64, amp: f64 },
    RegionConst { amp: f64 },
    Cylinder { axis: usize, lo: f64, hi: f64, disk: (Vec<f64>, f64), amp: Amp },
    Numeric,
}

struct Prepared<'a> {
    piece: &'a Piece,
    bound: Option<(Vec<f64>, f64)>,
    kind: Kind,
}

/// Evaluator of `Phi(c, sigma)` for fixed pieces and tolerances.
pub(crate) struct GaussMass<'a> {
    dim: usize,
    items: Vec<Prepared<'a>>,
    /// Cutoff radius in units of sigma.
    tail_k: f64,
    tol: Tol,
}

impl<'a> GaussMass<'a> {
    pub(crate) fn new(pieces: &'a [Piece], dim: usize, cfg: &QuadConfig, tol: Tol) -> Self {
        let items = pieces
            .iter()
            .map(|p| {
                let bound = p.bounding_ball();
                let kind = classify(p, dim);
                Prepared { piece: p, bound, kind }
            })
            .collect();
        // tail_sigma is in units of sqrt(4t) = sqrt(2) sigma
        Self { dim, items, tail_k: std::f64::consts::SQRT_2 * cfg.effective_tail(), tol }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Bounding balls of the pieces; `None` when some piece is unbounded.
    pub(crate) fn bounds(&self) -> Option<Vec<(Vec<f64>, f64)>> {
        self.items.iter().map(|it| it.bound.clone()).collect()
    }

    /// `(Phi, error)`.
    pub(crate) fn eval(&self, c: &[f64], sigma: f64) -> (f64, f64) {
        let (mut v, mut e) = (0.0, 0.0);
        for it in &self.items {
            if let Some((b, r)) = &it.bound {
                if dist(c, b) - r > self.tail_k * sigma {
                    continue;
                }
            }
            let (pv, pe) = if sigma <= 0.0 {
                if it.piece.region.contains(c) {
                    (it.piece.amp.value(c).abs(), 0.0)
                } else {
                    (0.0, 0.0)
                }
            } else {
                self.piece_mass(it, c, sigma)
            };
            v += pv;
            e += pe;
        }
        (v, e)
    }

    fn piece_mass(&self, it: &Prepared, c: &[f64], sigma: f64) -> (f64, f64) {
        let dim = self.dim;
        match &it.kind {
            Kind::WholeConst(a) => (a.abs(), 0.0),
            Kind::Ball3 { center, radius, amp } => {
                let m = ball_mass_3d(dist(c, center), *radius, sigma);
                (amp.abs() * m, 1e-15 * amp.abs())
            }
            Kind::Disk2 { center, radius, amp } => {
                let (m, e) = disk_mass_2d(dist(c, center), *radius, sigma, self.tol);
                (amp.abs() * m, amp.abs() * e)
            }
            Kind::RegionConst { amp } => {
                let (m, e) = region_mass_const(&it.piece.region, it.bound.as_ref(), c, sigma, self.tol);
                (amp.abs() * m, amp.abs() * e)
            }
            Kind::Cylinder { axis, lo, hi, disk, amp } => {
                let ca = c[*axis];
                let perp: Vec<f64> =
                    c.iter().enumerate().filter(|(i, _)| i != axis).map(|(_, v)| *v).collect();
                let (dm, de) = disk_mass_2d(dist(&perp, &disk.0), disk.1, sigma, self.tol);
                if dm == 0.0 {
                    return (0.0, de);
                }
                let (am, ae) = match amp {
                    Amp::Const(a) => (a.abs() * norm_interval((lo - ca) / sigma, (hi - ca) / sigma), 0.0),
                    _ => {
                        let a = lo.max(ca - self.tail_k * sigma);
                        let b = hi.min(ca + self.tail_k * sigma);
                        if b <= a {
                            (0.0, 0.0)
                        } else {
                            let mut breaks = vec![a];
                            for k in [-3.0, -1.0, 1.0, 3.0] {
                                let x = ca + k * sigma;
                                if x > a && x < b {
                                    breaks.push(x);
                                }
                            }
                            breaks.push(b);
                            let mut z = c.to_vec();
                            let norm = 1.0 / (sigma * SQRT_2PI);
                            let est = adaptive_1d(
                                |u| {
                                    z[*axis] = u;
                                    let g = ((u - ca) / sigma).powi(2);
                                    (amp.value(&z).abs() * norm * (-0.5 * g).exp(), 0.0)
                                },
                                &breaks,
                                Tol { abs: self.tol.abs, rel: self.tol.rel, max_evals: self.tol.max_evals },
                            );
                            (est.value, est.err_bound)
                        }
                    }
                };
                (am * dm, am * de + ae * dm)
            }
            Kind::Numeric => {
                let r_cap = self.tail_k * sigma;
                let dirs = match &it.bound {
                    Some((b, r)) => Directions::towards_ball(c, b, *r),
                    None => Directions::Full,
                };
                let area = sphere_area(dim);
                let norm = (2.0 * PI * sigma * sigma).powf(-0.5 * dim as f64);
                let inner = Tol { abs: 0.1 * self.tol.abs / area, rel: 0.1 * self.tol.rel, max_evals: self.tol.max_evals };
                let mut z = vec![0.0; dim];
                let region = &it.piece.region;
                let amp = &it.piece.amp;
                let est = integrate_directions(
                    dim,
                    &dirs,
                    |w| {
                        let iv = region.ray(c, w).clip(r_cap);
                        let (v, e, _) = radial_numeric(
                            |r| {
                                for k in 0..dim {
                                    z[k] = c[k] + r * w[k];
                                }
                                let q = r / sigma;
                                amp.value(&z).abs() * norm * (-0.5 * q * q).exp()
                            },
                            dim,
                            &iv,
                            inner,
                        );
                        (v, e)
                    },
                    self.tol,
                );
                (est.value, est.err_bound)
            }
        }
    }
}

fn classify(p: &Piece, dim: usize) -> Kind {
    if let Some(a) = p.amp.as_const() {
        if p.region.is_whole() {
            return Kind::WholeConst(a);
        }
        if let Some((center, radius)) = p.region.as_single_ball() {
            match dim {
                2 => return Kind::Disk2 { center: center.to_vec(), radius, amp: a },
                3 => return Kind::Ball3 { center: center.to_vec(), radius, amp: a },
                _ => {}
            }
        }
    }
    if dim == 3 {
        if let Some((axis, lo, hi, center, radius)) = p.region.as_axial_cylinder() {
            let profile_ok = match &p.amp {
                Amp::Const(_) => true,
                Amp::Profile { axis: pa, .. } => *pa == axis,
                Amp::Pointwise(_) => false,
            };
            if profile_ok {
                let perp: Vec<f64> =
                    center.iter().enumerate().filter(|(i, _)| *i != axis).map(|(_, v)| *v).collect();
                return Kind::Cylinder { axis, lo, hi, disk: (perp, radius), amp: p.amp.clone() };
            }
        }
    }
    match p.amp {
        Amp::Const(a) => Kind::RegionConst { amp: a },
        _ => Kind::Numeric,
    }
}

/// Gaussian mass of a region, `P(N(c, sigma^2 I) in region)`.
fn region_mass_const(
    region: &Region,
    bound: Option<&(Vec<f64>, f64)>,
    c: &[f64],
    sigma: f64,
    tol: Tol,
) -> (f64, f64) {
    let dim = c.len();
    let dirs = match bound {
        Some((b, r)) => Directions::towards_ball(c, b, *r),
        None => Directions::Full,
    };
    let area = sphere_area(dim);
    let est = integrate_directions(
        dim,
        &dirs,
        |w| {
            let iv: Intervals = region.ray(c, w);
            let mut m = 0.0;
            for &(a, b) in iv.as_slice() {
                m += chi_mass(dim, a / sigma, b / sigma);
            }
            (m, 0.0)
        },
        Tol { abs: tol.abs * area, rel: tol.rel, max_evals: tol.max_evals },
    );
    (est.value / area, est.err_bound / area)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::Potential;

    #[test]
    fn chi_cdf_matches_known_forms() {
        for x in [1e-3, 0.3, 1.0, 2.4, 7.0, 30.0] {
            let (p2, q2) = chi_pq(2, x);
            assert!((q2 - (-x).exp()).abs() < 1e-15);
            assert!((p2 + q2 - 1.0).abs() < 1e-15);
            let (p1, _) = chi_pq(1, x);
            assert!((p1 - libm::erf(x.sqrt())).abs() < 1e-14);
            // chi_3 CDF at r = sqrt(2x): erf(r/sqrt2) - sqrt(2/pi) r e^{-r^2/2}
            let r = (2.0 * x).sqrt();
            let p3 = libm::erf(x.sqrt()) - (2.0 / PI).sqrt() * r * (-x).exp();
            assert!((chi_pq(3, x).0 - p3).abs() < 1e-14, "x = {x}");
        }
    }

    #[test]
    fn ball3_limits_and_polar_agreement() {
        // delta -> 0 continuity
        let a = ball_mass_3d(0.0, 1.0, 0.7);
        let b = ball_mass_3d(1e-9, 1.0, 0.7);
        assert!((a - b).abs() < 1e-12);
        let region = Region::ball(vec![0.0; 3], 1.0);
        for (c, s) in [([0.0, 0.0, 0.0], 0.7), ([0.5, 0.2, 0.0], 0.3), ([2.5, 0.0, 0.0], 0.9), ([1.2, 0.0, 0.3], 0.05)] {
            let closed = ball_mass_3d(dist(&c, &[0.0; 3]), 1.0, s);
            let (num, _) = region_mass_const(&region, region.bounding_ball().as_ref(), &c, s, Tol::new(1e-14, 1e-12));
            assert!((closed - num).abs() < 1e-11, "{c:?} {s}: {closed} vs {num}");
        }
    }

    #[test]
    fn disk_matches_polar() {
        let region = Region::ball(vec![0.0; 2], 1.0);
        for (c, s) in [([0.3, 0.0], 0.5), ([0.99, 0.0], 0.2), ([1.0, 0.0], 0.7), ([2.5, 0.0], 0.9), ([1.2, 0.3], 0.05)] {
            let (a, _) = disk_mass_2d(dist(&c, &[0.0; 2]), 1.0, s, Tol::new(1e-15, 1e-13));
            let (b, _) = region_mass_const(&region, region.bounding_ball().as_ref(), &c, s, Tol::new(1e-15, 1e-13));
            assert!((a - b).abs() < 1e-12, "{c:?} {s}: {a} vs {b}");
        }
    }

    #[test]
    fn one_d_interval_is_erf() {
        let v = Potential::centered_ball(1, 1.0, 2.0).unwrap();
        let pieces = v.pieces().unwrap();
        let gm = GaussMass::new(&pieces, 1, &QuadConfig::default(), Tol::new(1e-14, 1e-12));
        let (m, _) = gm.eval(&[0.3], 0.8);
        let exact = 2.0 * norm_interval((-1.3) / 0.8, 0.7 / 0.8);
        assert!((m - exact).abs() < 1e-14);
    }

    #[test]
    fn cylinder_separable_matches_numeric() {
        let v = crate::potential::cylinder_potential(2).unwrap();
        let pieces = v.pieces().unwrap();
        let cfg = QuadConfig::default();
        let tol = Tol::new(1e-13, 1e-10);
        let gm = GaussMass::new(&pieces, 3, &cfg, tol);
        let c = [1.6, 0.1, -0.05];
        let sigma = 0.4;
        let (fast, _) = gm.eval(&c, sigma);
        let mut slow = 0.0;
        for p in &pieces {
            let it = Prepared { piece: p, bound: p.bounding_ball(), kind: Kind::Numeric };
            slow += gm.piece_mass(&it, &c, sigma).0;
        }
        assert!((fast - slow).abs() < 1e-8 * fast, "{fast} {slow}");
    }
}
