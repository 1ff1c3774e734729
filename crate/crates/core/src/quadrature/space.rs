//! Spatial integrals over a bounded part of `R^d`.

use super::polar::integrate_region_polar;
use super::{Estimate, QuadConfig, SingularityMode};
use crate::error::{check_dim, Error, Result};
use crate::point::norm;
use crate::region::{Convex, Region};

/// Where an integrand lives: a region, optionally narrowed by a Gaussian
/// factor `g(t, center, .)` that the integrand carries.
#[derive(Debug, Clone)]
pub struct Domain {
    pub region: Region,
    pub gaussian: Option<(Vec<f64>, f64)>,
}

impl Domain {
    pub fn region(region: Region) -> Self {
        Self { region, gaussian: None }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Self::region(Region::ball(center, radius))
    }

    pub fn whole(dim: usize) -> Self {
        Self::region(Region::whole(dim))
    }

    pub fn with_gaussian(mut self, center: Vec<f64>, t: f64) -> Self {
        self.gaussian = Some((center, t));
        self
    }

    pub fn dim(&self) -> usize {
        self.region.dim
    }

    /// The region actually integrated over, after tail truncation.
    pub fn effective(&self, cfg: &QuadConfig) -> Region {
        match &self.gaussian {
            Some((c, t)) => {
                let r = cfg.effective_tail() * (4.0 * t).sqrt();
                self.region.clone().with(Convex::Ball { center: c.clone(), radius: r })
            }
            None => self.region.clone(),
        }
    }
}

/// `int_{domain} f(z) dz` by adaptive polar cubature.
///
/// With [`SingularityMode::RadialOrigin`] the polar centre is the coordinate
/// origin, so a `|z|^{2-d}` singularity there is absorbed by the Jacobian.
/// Otherwise the centre is the middle of the bounding ball.
pub fn integrate_space<F: FnMut(&[f64]) -> f64>(
    dim: usize,
    f: F,
    domain: &Domain,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    cfg.validate()?;
    check_dim(dim, domain.dim())?;
    if let Some((c, t)) = &domain.gaussian {
        check_dim(dim, c.len())?;
        if !(*t > 0.0) {
            return Err(Error::Domain("gaussian factor needs t > 0".into()));
        }
    }
    let region = domain.effective(cfg);
    let Some((bc, br)) = region.bounding_ball() else {
        return Err(Error::Usage("integration domain must be bounded".into()));
    };
    let (origin, cap) = match cfg.singularity_mode {
        SingularityMode::RadialOrigin => {
            let o = vec![0.0; dim];
            let cap = norm(&bc) + br;
            (o, cap)
        }
        SingularityMode::None => (bc, br),
    };
    Ok(integrate_region_polar(&origin, &region, cap * (1.0 + 1e-12), f, cfg.tol()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gauss_parts;
    use crate::point::norm_sq;

    #[test]
    fn heat_kernel_normalized_in_2d() {
        let cfg = QuadConfig::default();
        let dom = Domain::whole(2).with_gaussian(vec![0.0, 0.0], 1.0);
        let e = integrate_space(2, |z| gauss_parts(1.0, 2, norm_sq(z)), &dom, &cfg).unwrap();
        assert!((e.value - 1.0).abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn coulomb_ball_radial_origin() {
        let cfg = QuadConfig::default().with_singularity(SingularityMode::RadialOrigin);
        let e = integrate_space(3, |z| 1.0 / norm(z), &Domain::ball(vec![0.0; 3], 1.0), &cfg).unwrap();
        assert!((e.value - 2.0 * std::f64::consts::PI).abs() < 1e-8);
    }

    #[test]
    fn zero_is_exact_and_unbounded_is_rejected() {
        let cfg = QuadConfig::default();
        let e = integrate_space(2, |_| 0.0, &Domain::ball(vec![0.0; 2], 1.0), &cfg).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(integrate_space(2, |_| 1.0, &Domain::whole(2), &cfg).is_err());
    }
}
