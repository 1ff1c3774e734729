//! Mass and semigroup identities of the Gauss-Weierstrass kernel, and the
//! closed forms of every functional at the constant potential.

use std::f64::consts::PI;

use gsek::kernels::{gauss_parts, gauss_weierstrass};
use gsek::quadrature::{integrate_space, Domain};
use gsek::quantities::{a_value, e_star, n_value, r_star, s_value};
use gsek::{parse, QuadConfig, SpacePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{guard, Ctx, Task};
use crate::report::{num, Check};

/// Relative accuracy required of the kernel identities.
pub const KERNEL_TOL: f64 = 1e-6;
/// Absolute accuracy required of the constant-potential identities.
pub const CONSTANT_TOL: f64 = 1e-6;
pub const DRAWS: usize = 20;

const MASS: &str = "int g(t,x,z) dz = 1";
const CK: &str = "int g(s,x,z) g(t-s,z,y) dz = g(t,x,y)";

/// Quadrature settings for the kernel identities: tight enough that the
/// integration error is far below the checked tolerance.
fn kernel_cfg(ctx: &Ctx) -> QuadConfig {
    QuadConfig { abs_tol: ctx.cfg.abs_tol.min(1e-10), rel_tol: ctx.cfg.rel_tol.min(1e-8), ..ctx.cfg }
}

fn draw(rng: &mut ChaCha8Rng, d: usize) -> (f64, f64, Vec<f64>, Vec<f64>) {
    let t = 10f64.powf(rng.random_range(-1.0..1.0));
    let s = t * rng.random_range(0.05..0.95);
    let x = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
    let y = (0..d).map(|_| rng.random_range(-2.0..2.0)).collect();
    (t, s, x, y)
}

fn kernel_checks(ctx: &Ctx, d: usize) -> Vec<Check> {
    let cfg = kernel_cfg(ctx);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    rng.set_stream(d as u64);
    let mut out = Vec::new();
    for i in 0..DRAWS {
        let (t, s, x, y) = draw(&mut rng, d);
        let params = json!({"dim": d, "t": num(t), "s": num(s), "x": x.iter().map(|&v| num(v)).collect::<Vec<_>>(),
            "y": y.iter().map(|&v| num(v)).collect::<Vec<_>>()});
        out.extend(guard(&format!("mass/d{d}/{i}"), MASS, || {
            let xc = x.clone();
            let e = integrate_space(
                d,
                |z| gauss_parts(t, d, z.iter().zip(&xc).map(|(a, b)| (a - b) * (a - b)).sum()),
                &Domain::whole(d).with_gaussian(x.clone(), t),
                &cfg,
            )?;
            Ok(vec![Check::close(format!("mass/d{d}/{i}"), MASS, e.value, 1.0, KERNEL_TOL, e.converged)
                .meta("params", params.clone())
                .meta("err_bound", num(e.err_bound))])
        }));
        out.extend(guard(&format!("chapman_kolmogorov/d{d}/{i}"), CK, || {
            let xp = SpacePoint::new(x.clone())?;
            let yp = SpacePoint::new(y.clone())?;
            let g = gauss_weierstrass(t, &xp, &yp)?;
            // the product is g(t, x, y) times a Gaussian of variance s(t-s)/t
            // around the bridge mean
            let m: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + (s / t) * (b - a)).collect();
            let r2 = |z: &[f64], c: &[f64]| -> f64 { z.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum() };
            let e = integrate_space(
                d,
                |z| gauss_parts(s, d, r2(z, &x)) * gauss_parts(t - s, d, r2(z, &y)),
                &Domain::whole(d).with_gaussian(m, s * (t - s) / t),
                &cfg,
            )?;
            Ok(vec![Check::close(format!("chapman_kolmogorov/d{d}/{i}"), CK, e.value, g, KERNEL_TOL * g, e.converged)
                .meta("params", params.clone())
                .meta("err_bound", num(e.err_bound))])
        }));
    }
    out
}

fn constant_checks(ctx: &Ctx, d: usize, t: f64) -> Vec<Check> {
    let cfg = &ctx.cfg;
    let dsl = "const:1";
    let mut out = Vec::new();
    let x = SpacePoint::new((0..d).map(|i| 0.3 * i as f64 - 0.2).collect()).expect("finite");
    let y = SpacePoint::new((0..d).map(|i| 0.5 - 0.7 * i as f64).collect()).expect("finite");
    let id = |what: &str| format!("constant/{what}/d{d}/t{t}");
    let close = |what: &str, anchor: &str, value: f64, err: f64, exact: f64, conv: bool| {
        Check::close(id(what), anchor, value, exact, CONSTANT_TOL, conv).meta("err_bound", num(err))
    };

    const S_ID: &str = "S(1,t,x,y) = t";
    out.extend(guard(&id("S"), S_ID, || {
        let v = parse(dsl, d)?;
        let e = s_value(&v, t, &x, &y, cfg)?;
        Ok(vec![close("S", S_ID, e.value, e.err_bound, t, e.converged)])
    }));
    const N_ID: &str = "N(1,t,x,y) = (4 pi)^{d/2} t";
    out.extend(guard(&id("N"), N_ID, || {
        let v = parse(dsl, d)?;
        let e = n_value(&v, t, &x, &y, cfg)?;
        let exact = (4.0 * PI).powf(d as f64 / 2.0) * t;
        Ok(vec![close("N", N_ID, e.value, e.err_bound, exact, e.converged)])
    }));
    const R_ID: &str = "r_*(1,t) = t";
    out.extend(guard(&id("r_star"), R_ID, || {
        let r = ctx.sup("r_star", dsl, d, t, |c, o| r_star(&parse(dsl, d)?, t, c, o))?;
        Ok(vec![close("r_star", R_ID, r.value, r.err_bound, t, r.converged)])
    }));
    const E_ID: &str = "e_*(1,lambda) = 1/lambda";
    out.extend(guard(&id("e_star"), E_ID, || {
        let lambda = 1.0 / t;
        let r = ctx.sup("e_star", dsl, d, lambda, |c, o| e_star(&parse(dsl, d)?, lambda, c, o))?;
        Ok(vec![close("e_star", E_ID, r.value, r.err_bound, t, r.converged)])
    }));
    const A_ID: &str = "A(1,t) = t";
    out.extend(guard(&id("A"), A_ID, || {
        let r = ctx.sup("A", dsl, d, t, |c, o| a_value(&parse(dsl, d)?, t, c, o))?;
        Ok(vec![close("A", A_ID, r.value, r.err_bound, t, r.converged)])
    }));
    out
}

pub(super) fn tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for d in 1..=3 {
        tasks.push(Box::new(move || kernel_checks(ctx, d)));
    }
    for d in 1..=3 {
        for t in [0.5, 2.0] {
            tasks.push(Box::new(move || constant_checks(ctx, d, t)));
        }
    }
    tasks
}
