//! Integrals over `(0, t) x R^d` with a time mesh graded toward both ends.

use super::adaptive::{adaptive_1d, Tol};
use super::space::{integrate_space, Domain};
use super::{Estimate, QuadConfig};
use crate::error::{domain, Error, Result};

const GRADING_LEVELS: i32 = 8;

/// Breakpoints `t 0.5^k` and `t - t 0.5^k`, `k = 1..8`, plus the endpoints.
pub fn graded_mesh(t: f64) -> Vec<f64> {
    let mut pts = vec![0.0, t];
    for k in 1..=GRADING_LEVELS {
        let h = t * 0.5f64.powi(k);
        pts.push(h);
        pts.push(t - h);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `int_0^t int f(s, z) dz ds`, with the spatial domain allowed to depend on
/// `s` (for instance through a Gaussian factor of variance `~ s`).
pub fn integrate_time_space<F, D>(
    dim: usize,
    t: f64,
    mut f: F,
    mut domain_at: D,
    cfg: &QuadConfig,
) -> Result<Estimate>
where
    F: FnMut(f64, &[f64]) -> f64,
    D: FnMut(f64) -> Domain,
{
    cfg.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain("t must be finite and positive"));
    }
    let inner_cfg = QuadConfig { abs_tol: 0.1 * cfg.abs_tol / t, rel_tol: 0.1 * cfg.rel_tol, ..*cfg };
    let mut failure: Option<Error> = None;
    let mut inner_evals = 0;
    let mut all_converged = true;
    let mut est = adaptive_1d(
        |s| {
            if failure.is_some() {
                return (0.0, 0.0);
            }
            let dom = domain_at(s);
            match integrate_space(dim, |z| f(s, z), &dom, &inner_cfg) {
                Ok(e) => {
                    inner_evals += e.evals;
                    all_converged &= e.converged;
                    (e.value, e.err_bound)
                }
                Err(e) => {
                    failure = Some(e);
                    (0.0, 0.0)
                }
            }
        },
        &graded_mesh(t),
        Tol { abs: cfg.abs_tol, rel: cfg.rel_tol, max_evals: cfg.max_evals },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    est.evals = inner_evals;
    est.converged &= all_converged;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gauss_parts;
    use crate::point::dist_sq;

    #[test]
    fn mesh_is_graded_and_sorted() {
        let m = graded_mesh(2.0);
        assert_eq!(m.len(), 2 * 8 + 1);
        assert_eq!(m[0], 0.0);
        assert_eq!(m[1], 2.0 / 256.0);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn per_slice_normalization() {
        let cfg = QuadConfig::with_tol(1e-9, 1e-9);
        let x = [0.3, -0.2];
        let e = integrate_time_space(
            2,
            0.7,
            |s, z| gauss_parts(s, 2, dist_sq(&x, z)),
            |s| Domain::whole(2).with_gaussian(x.to_vec(), s),
            &cfg,
        )
        .unwrap();
        assert!((e.value - 0.7).abs() < 1e-7, "{e:?}");
    }
}
