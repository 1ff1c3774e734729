//! The drifted heat kernel integrated over finite and infinite time against
//! the comparison kernel K, and the bounds on r_* that follow.

use std::f64::consts::E;

use gsek::kernels::{resolvent_kernel, sharp_kernel};
use gsek::quantities::{a_value, drift_time_integral, r_star, sup_k, SupResult};
use gsek::{QuadConfig, Result, SpacePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{converged, guard, sup_error, Ctx, Task, SLACK_FACTOR};
use crate::family::standard_family;
use crate::report::{num, Check};

/// Points per sample; two disjoint samples are drawn per dimension.
pub const SAMPLE_SIZE: usize = 100;
/// Allowed spread `max/min - 1` of each empirical constant between samples.
pub const STABILITY: f64 = 0.2;
/// Horizon for the r_* bounds.
pub const HORIZON: f64 = 1.0;

const INF_BAND: &str = "(1/2) int_0^inf p_alpha <= int_0^t p_alpha <= int_0^inf p_alpha on |z-x| <= 2|alpha|t";
const EXP_BAND: &str =
    "(e/(e+1)) int_0^inf e^{-s/t} p_alpha <= int_0^t p_alpha <= e int_0^inf e^{-s/t} p_alpha on |z-x| <= 2|alpha|t";
const JK: &str = "n_1 K(t,z-x,-2 alpha) <= int_0^t p_alpha(s,x,z) ds <= n_2 K(t,z-x,-2 alpha)";
const R_LOW: &str = "r_*(V,T) >= (n_1/2) ||K(V,T)|| + (1/2) A(T)";
const R_HIGH: &str = "r_*(V,T) <= n_2 ||K(V,T)|| + 2^{d-2} A(4T)";

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Sample {
    pub t: f64,
    pub alpha: [f64; 3],
    pub xi: [f64; 3],
}

/// Point of a sample with the measured sides.
#[derive(Debug, Clone, Copy)]
struct Point {
    sample: Sample,
    /// `int_0^t p_alpha`.
    j: f64,
    j_err: f64,
    j_conv: bool,
    /// `int_0^inf p_alpha` (d >= 2) or `int_0^inf e^{-s/t} p_alpha` (d = 1).
    i: f64,
    k: f64,
}

/// Empirical constants of the J/K comparison in one dimension.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DriftConstants {
    pub dim: usize,
    /// Per-sample (n_1, n_2).
    pub first: (f64, f64),
    pub second: (f64, f64),
    pub converged: bool,
}

impl DriftConstants {
    pub fn n1(&self) -> f64 {
        self.first.0.min(self.second.0)
    }

    pub fn n2(&self) -> f64 {
        self.first.1.max(self.second.1)
    }
}

fn unit_ball<R: Rng>(rng: &mut R, d: usize) -> [f64; 3] {
    loop {
        let mut p = [0.0; 3];
        for c in p.iter_mut().take(d) {
            *c = rng.random_range(-1.0..1.0);
        }
        let n2: f64 = p.iter().map(|c| c * c).sum();
        if n2 <= 1.0 && n2 > 0.0 {
            return p;
        }
    }
}

/// `t` and `|alpha|` log-uniform on [0.1, 10], uniform directions, and
/// `xi = z - x` uniform in the ball of radius `2 |alpha| t`.
pub fn draw_sample(seed: u64, d: usize, which: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x3500 + 2 * d as u64 + which);
    (0..SAMPLE_SIZE)
        .map(|_| {
            let t = 10f64.powf(rng.random_range(-1.0..1.0));
            let a = 10f64.powf(rng.random_range(-1.0..1.0));
            let dir = unit_ball(&mut rng, d);
            let dn = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            let alpha = dir.map(|c| a * c / dn);
            let xi = unit_ball(&mut rng, d).map(|c| 2.0 * a * t * c);
            Sample { t, alpha, xi }
        })
        .collect()
}

fn measure(s: &Sample, d: usize, cfg: &QuadConfig) -> Result<Point> {
    let x = SpacePoint::origin(d);
    let alpha = SpacePoint::new(s.alpha[..d].to_vec())?;
    let z = SpacePoint::new(s.xi[..d].to_vec())?;
    let j = drift_time_integral(s.t, &alpha, &x, &z, cfg)?;
    let i = if d == 1 { resolvent_kernel(1.0 / s.t, &alpha, &x, &z)? } else { resolvent_kernel(0.0, &alpha, &x, &z)? };
    let k = sharp_kernel(s.t, &z, &alpha.scaled(-2.0))?;
    Ok(Point { sample: *s, j: j.value, j_err: j.err_bound, j_conv: j.converged, i, k })
}

fn measure_all(ctx: &Ctx, d: usize, which: u64) -> Result<Vec<Point>> {
    draw_sample(ctx.seed, d, which).iter().map(|s| measure(s, d, &ctx.cfg)).collect()
}

fn extremes(points: &[Point]) -> (f64, f64) {
    points.iter().filter(|p| p.k > 0.0).fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        let r = p.j / p.k;
        (lo.min(r), hi.max(r))
    })
}

/// Both samples' empirical n_1, n_2 in dimension `d`.
pub fn drift_constants(ctx: &Ctx, d: usize) -> Result<DriftConstants> {
    let a = measure_all(ctx, d, 0)?;
    let b = measure_all(ctx, d, 1)?;
    let converged = a.iter().chain(&b).all(|p| p.j_conv);
    Ok(DriftConstants { dim: d, first: extremes(&a), second: extremes(&b), converged })
}

fn band_checks(d: usize, which: u64, points: &[Point]) -> Vec<Check> {
    let mut out = Vec::new();
    for (n, p) in points.iter().enumerate() {
        let (lo, hi, anchor) = if d == 1 { (E / (E + 1.0) * p.i, E * p.i, EXP_BAND) } else { (0.5 * p.i, p.i, INF_BAND) };
        let tol = SLACK_FACTOR * p.j_err + 1e-12 * p.i.abs();
        let base = format!("d{d}/sample{which}/{n}");
        let meta = |c: Check| c.meta("sample", json!(p.sample)).meta("j", num(p.j)).meta("i", num(p.i));
        out.push(meta(Check::le(format!("drift_band_lower/{base}"), anchor, lo, p.j, tol, p.j_conv)));
        out.push(meta(Check::le(format!("drift_band_upper/{base}"), anchor, p.j, hi, tol, p.j_conv)));
    }
    out
}

fn prop_checks(ctx: &Ctx, d: usize) -> Result<Vec<Check>> {
    let a = measure_all(ctx, d, 0)?;
    let b = measure_all(ctx, d, 1)?;
    let mut out = band_checks(d, 0, &a);
    out.extend(band_checks(d, 1, &b));
    let (ea, eb) = (extremes(&a), extremes(&b));
    let conv = a.iter().chain(&b).all(|p| p.j_conv);
    let positive = ea.0 > 0.0 && eb.0 > 0.0 && ea.1.is_finite() && eb.1.is_finite();
    let ordered = ea.0 <= ea.1 && eb.0 <= eb.1;
    let meta = |c: Check| {
        c.meta("dim", json!(d))
            .meta("first", json!({"n1": num(ea.0), "n2": num(ea.1)}))
            .meta("second", json!({"n1": num(eb.0), "n2": num(eb.1)}))
    };
    out.push(meta(Check::with(format!("jk_constants/d{d}"), JK, positive && ordered, conv, ea.0.min(eb.0), ea.1.max(eb.1), 0.0)));
    for (name, x, y) in [("n1", ea.0, eb.0), ("n2", ea.1, eb.1)] {
        let spread = x.max(y) / x.min(y);
        out.push(meta(Check::le(format!("jk_stability/{name}/d{d}"), JK, spread, 1.0 + STABILITY, 0.0, conv)));
    }
    Ok(out)
}

pub(super) fn prop_tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    (1..=3).map(|d| -> Task<'_> { Box::new(move || guard(&format!("drift/d{d}"), JK, || prop_checks(ctx, d))) }).collect()
}

fn scaled(r: &SupResult, c: f64) -> SupResult {
    SupResult { value: c * r.value, err_bound: c * r.err_bound, ..r.clone() }
}

fn bound_checks(ctx: &Ctx, d: usize, n: &DriftConstants) -> Result<Vec<Check>> {
    let t = HORIZON;
    let mut out = Vec::new();
    for m in standard_family(d)? {
        let v = &m.potential;
        let k = ctx.sup("sup_K", m.dsl, d, t, |c, o| sup_k(v, t, c, o))?;
        let r = ctx.sup("r_star", m.dsl, d, t, |c, o| r_star(v, t, c, o))?;
        let a = ctx.sup("A", m.dsl, d, t, |c, o| a_value(v, t, c, o))?;
        let a4 = ctx.sup("A", m.dsl, d, 4.0 * t, |c, o| a_value(v, 4.0 * t, c, o))?;
        let lower = [scaled(&k, n.n1() / 2.0), scaled(&a, 0.5)];
        let upper = [scaled(&k, n.n2()), scaled(&a4, 2f64.powi(d as i32 - 2))];
        let lo: f64 = lower.iter().map(|x| x.value).sum();
        let hi: f64 = upper.iter().map(|x| x.value).sum();
        let base = format!("{}/d{d}/T{t}", m.dsl);
        let meta = |c: Check| {
            c.meta("potential", json!(m.dsl))
                .meta("n1", num(n.n1()))
                .meta("n2", num(n.n2()))
                .meta("sup_K", num(k.value))
                .meta("A", num(a.value))
                .meta("A_4T", num(a4.value))
        };
        let parts_lo = [&lower[0], &lower[1], &r];
        let parts_hi = [&upper[0], &upper[1], &r];
        let conv = n.converged;
        out.push(meta(Check::le(
            format!("r_star_lower/{base}"),
            R_LOW,
            lo,
            r.value,
            SLACK_FACTOR * sup_error(&parts_lo),
            conv && converged(&parts_lo),
        )));
        out.push(meta(Check::le(
            format!("r_star_upper/{base}"),
            R_HIGH,
            r.value,
            hi,
            SLACK_FACTOR * sup_error(&parts_hi),
            conv && converged(&parts_hi),
        )));
    }
    Ok(out)
}

pub(super) fn bound_tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    (1..=3)
        .map(|d| -> Task<'_> {
            Box::new(move || {
                guard(&format!("r_star_bounds/d{d}"), R_LOW, || {
                    let n = drift_constants(ctx, d)?;
                    bound_checks(ctx, d, &n)
                })
            })
        })
        .collect()
}
