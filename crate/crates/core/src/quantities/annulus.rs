//! Planar comparison between the K kernel on a half annulus and the local
//! mass of a potential.
//!
//! For `r >= 2` let `D_r = {z in R^2 : z_1 >= 0, 2 <= |z| <= r}`. The ratio
//! of `int_{D_r} K(1, z, (r, 0)) U(z) dz` to `sup_w int_{|z| <= 2} U(z + w) dz`
//! stays bounded uniformly in `r`; these helpers measure both sides.

use crate::error::{domain, Result};
use crate::kernels::sharp_parts;
use crate::potential::Potential;
use crate::quadrature::{integrate_space, Domain, Estimate, QuadConfig};
use crate::region::{Convex, Region};

use super::layout::{gaussian_reduction, Symmetry};
use super::search::{sup_search, Pass, SearchBox, SupResult};
use super::sups::SupOptions;

/// Radius of the disk in the local mass.
pub const LOCAL_RADIUS: f64 = 2.0;

fn check(u: &Potential, r: f64) -> Result<()> {
    if u.dim() != 2 {
        return Err(domain(format!("the half-annulus comparison is planar, got d = {}", u.dim())));
    }
    if !(r >= LOCAL_RADIUS) || !r.is_finite() {
        return Err(domain(format!("half-annulus radius must be finite and at least 2, got {r}")));
    }
    Ok(())
}

fn half_annulus(r: f64) -> Region {
    Region::ball(vec![0.0, 0.0], r)
        .with(Convex::Exterior { center: vec![0.0, 0.0], radius: LOCAL_RADIUS })
        .with(Convex::HalfSpace { normal: vec![1.0, 0.0], offset: 0.0 })
}

/// `int_{D_r} K(1, z, (r, 0)) |U(z - shift)| dz`.
pub fn half_annulus_integral(u: &Potential, r: f64, shift: &[f64], cfg: &QuadConfig) -> Result<Estimate> {
    check(u, r)?;
    cfg.validate()?;
    if shift.len() != 2 {
        return Err(domain("shift must be planar"));
    }
    if u.is_zero() {
        return Ok(Estimate::zero());
    }
    let mut region = half_annulus(r);
    if let Some((c, rad)) = u.support_bound() {
        let c = vec![c.coords()[0] + shift[0], c.coords()[1] + shift[1]];
        region = region.with(Convex::Ball { center: c, radius: rad });
    }
    let mut q = [0.0; 2];
    integrate_space(
        2,
        |z| {
            q[0] = z[0] - shift[0];
            q[1] = z[1] - shift[1];
            let zn = z[0].hypot(z[1]);
            sharp_parts(1.0, 2, zn, r, z[0] * r) * u.eval_slice(&q).abs()
        },
        &Domain::region(region),
        cfg,
    )
}

/// `sup_w int_{D_r} K(1, z, (r, 0)) |U(z - w)| dz` over translates of `U`.
pub fn half_annulus_sup(u: &Potential, r: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    check(u, r)?;
    cfg.validate()?;
    let Some((c, rad)) = u.support_bound() else {
        let e = half_annulus_integral(u, r, &[0.0, 0.0], cfg)?;
        return Ok(SupResult::from_estimate(e, vec![0.0, 0.0], 1, 0));
    };
    // translates that meet D_r: support centre in [-rad, r + rad] x [-r - rad, r + rad]
    let c = c.coords();
    let bx = SearchBox::new(vec![-rad - c[0], -r - rad - c[1]], vec![r + rad - c[0], r + rad - c[1]]);
    let coarse = |p: &[f64], pass: Pass| {
        let tol = match pass {
            Pass::Screen => QuadConfig { abs_tol: cfg.abs_tol.max(1e-6), rel_tol: cfg.rel_tol.max(1e-3), ..*cfg },
            Pass::Refine => QuadConfig { abs_tol: cfg.abs_tol.max(1e-8), rel_tol: cfg.rel_tol.max(1e-5), ..*cfg },
        };
        Ok(half_annulus_integral(u, r, p, &tol)?.value)
    };
    // the kernel is largest just outside the inner circle on the positive axis
    let seed = vec![LOCAL_RADIUS + rad - c[0], -c[1]];
    sup_search(coarse, |p| half_annulus_integral(u, r, p, cfg), &bx, &opts.search, &[seed])
}

/// `sup_w int_{|z| <= 2} |U(z + w)| dz`.
///
/// For radial potentials whose modulus has centred convex level sets the
/// supremum sits at `w = 0` by Anderson's inequality.
pub fn local_mass_sup(u: &Potential, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    if u.dim() != 2 {
        return Err(domain(format!("the local mass is planar here, got d = {}", u.dim())));
    }
    cfg.validate()?;
    let area = std::f64::consts::PI * LOCAL_RADIUS * LOCAL_RADIUS;
    let mass = |w: &[f64], c: &QuadConfig| -> Result<Estimate> {
        let mut region = Region::ball(w.to_vec(), LOCAL_RADIUS);
        if let Some((sc, rad)) = u.support_bound() {
            region = region.with(Convex::Ball { center: sc.into_vec(), radius: rad });
        }
        integrate_space(2, |z| u.eval_slice(z).abs(), &Domain::region(region), c)
    };
    if u.is_translation_invariant() {
        let a = u.eval_slice(&[0.0, 0.0]).abs();
        return Ok(SupResult::exact(a * area, vec![0.0, 0.0]));
    }
    let Some((c, rad)) = u.support_bound() else {
        return Err(crate::error::Error::Usage("unbounded potential: an explicit search ball is required".into()));
    };
    if !opts.no_symmetry && gaussian_reduction(u) == Symmetry::Invariant {
        let e = mass(&[0.0, 0.0], cfg)?;
        return Ok(SupResult::from_estimate(e, vec![0.0, 0.0], 1, 0));
    }
    let c = c.coords();
    let reach = rad + LOCAL_RADIUS;
    let bx = SearchBox::new(vec![c[0] - reach, c[1] - reach], vec![c[0] + reach, c[1] + reach]);
    sup_search(|p, _| Ok(mass(p, cfg)?.value), |p| mass(p, cfg), &bx, &opts.search, &[c.to_vec()])
}

/// Ratio of [`half_annulus_sup`] to [`local_mass_sup`].
pub fn half_annulus_ratio(u: &Potential, r: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<(f64, SupResult, SupResult)> {
    let num = half_annulus_sup(u, r, cfg, opts)?;
    let den = local_mass_sup(u, cfg, opts)?;
    let ratio = if den.value > 0.0 { num.value / den.value } else { 0.0 };
    Ok((ratio, num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::parse;

    #[test]
    fn constant_potential_ratio_is_bounded() {
        let cfg = QuadConfig::with_tol(1e-9, 1e-7);
        let v = parse("const:1", 2).unwrap();
        let mut last = Vec::new();
        for r in [2.0, 5.0, 10.0, 20.0] {
            let (ratio, num, den) = half_annulus_ratio(&v, r, &cfg, &SupOptions::default()).unwrap();
            assert!((den.value - 4.0 * std::f64::consts::PI).abs() < 1e-12);
            if r == 2.0 {
                // D_2 is a half circle, a null set
                assert_eq!(num.value, 0.0);
                continue;
            }
            assert!(num.value > 0.0 && ratio.is_finite());
            last.push(ratio);
        }
        let hi = last.iter().cloned().fold(0.0, f64::max);
        let lo = last.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 10.0, "{last:?}");
    }

    #[test]
    fn local_mass_of_unit_disk() {
        let cfg = QuadConfig::with_tol(1e-10, 1e-8);
        let v = parse("ball:1,3", 2).unwrap();
        let m = local_mass_sup(&v, &cfg, &SupOptions::default()).unwrap();
        assert!((m.value - 3.0 * std::f64::consts::PI).abs() < 1e-7, "{m:?}");
        let full = local_mass_sup(&v, &cfg, &SupOptions { no_symmetry: true, ..Default::default() }).unwrap();
        assert!((full.value - m.value).abs() < 1e-6, "{full:?}");
    }

    #[test]
    fn shifted_disk_inside_annulus() {
        let cfg = QuadConfig::with_tol(1e-10, 1e-8);
        let v = parse("ball:0.5,1", 2).unwrap();
        // the whole disk sits in D_10 when shifted to (5, 0)
        let e = half_annulus_integral(&v, 10.0, &[5.0, 0.0], &cfg).unwrap();
        let grid = crate::quadrature::grid_oracle_integrate(
            |z| {
                let zn = z[0].hypot(z[1]);
                if (z[0] - 5.0).hypot(z[1]) <= 0.5 { sharp_parts(1.0, 2, zn, 10.0, 10.0 * z[0]) } else { 0.0 }
            },
            &[4.5, -0.5],
            &[5.5, 0.5],
            400,
        );
        assert!((e.value - grid.value).abs() < 1e-3 * grid.value, "{e:?} {grid:?}");
    }
}
