//! Two-sided bounds on the perturbed-to-free kernel ratio by Monte Carlo,
//! and the bridge estimate of S against quadrature.

use gsek::bridge_mc::{feynman_kac_ratio, s_bridge_estimate};
use gsek::quantities::{s_value, sup_s};
use gsek::{parse, BridgeConfig, Result, SpacePoint};
use serde_json::json;

use super::{guard, sup_error, Ctx, Task};
use crate::report::{num, Check};

/// Monte Carlo slack in standard errors.
pub const MC_SIGMAS: f64 = 3.0;
/// Time steps per bridge for the Feynman-Kac checks.
pub const FK_STEPS: usize = 256;
/// Paths and steps for the cross-oracle.
pub const ORACLE_PATHS: u64 = 100_000;
pub const ORACLE_STEPS: usize = 1024;
/// Small positive potential strength and its time scale.
pub const ETA: f64 = 0.3;
pub const H: f64 = 1.0;

const NEG: &str = "exp(-S(V^-,t,x,y)) <= G(t,x,y)/g(t,x,y) <= 1 for V <= 0";
const ETA_PRE: &str = "||S(V)||_{h,inf} <= eta < 1";
const POS: &str = "G(t,x,y)/g(t,x,y) <= (1/(1-eta))^{1+t/h} when ||S(V)||_{h,inf} <= eta";
const ORACLE: &str = "S(V,t,x,y) = E int_0^t |V(b_s)| ds over the Brownian bridge";

fn negative(ctx: &Ctx) -> Result<Vec<Check>> {
    let d = 1;
    let t = 1.0;
    let x = SpacePoint::origin(d);
    let v = parse("neg(ball:1,1)", d)?;
    let s = s_value(&parse("ball:1,1", d)?, t, &x, &x, &ctx.cfg)?;
    let cfg = BridgeConfig { paths: ctx.fk_paths, steps: FK_STEPS, seed: ctx.seed };
    let fk = feynman_kac_ratio(&v, t, &x, &x, &cfg)?;
    let tol = MC_SIGMAS * fk.stderr;
    let lower = (-s.value).exp();
    let meta = |c: Check| c.meta("S", num(s.value)).meta("stderr", num(fk.stderr)).meta("paths", json!(fk.paths)).meta("steps", json!(FK_STEPS));
    Ok(vec![
        meta(Check::le("fk_negative/lower", NEG, lower, fk.mean, tol + s.err_bound * lower, s.converged)),
        meta(Check::le("fk_negative/upper", NEG, fk.mean, 1.0, tol, true)),
    ])
}

fn positive(ctx: &Ctx) -> Result<Vec<Check>> {
    let d = 1;
    let dsl = format!("scale:{ETA}(ball:1,1)");
    let v = parse(&dsl, d)?;
    // ||S(V)||_{h,inf} = sup over t <= h, measured on a grid of times
    let mut eta = 0.0f64;
    let mut slack = 0.0;
    let mut conv = true;
    for k in 1..=4 {
        let t = H * k as f64 / 4.0;
        let r = ctx.sup("sup_S", &dsl, d, t, |c, o| sup_s(&v, t, c, o))?;
        if r.value > eta {
            eta = r.value;
            slack = sup_error(&[&r]);
        }
        conv &= r.converged;
    }
    let mut out = vec![Check::le("fk_positive/eta", ETA_PRE, eta, ETA, 0.0, conv).meta("slack", num(slack))];
    let x = SpacePoint::origin(d);
    for t in [1.0, 2.0] {
        let cfg = BridgeConfig { paths: ctx.fk_paths, steps: FK_STEPS, seed: ctx.seed.wrapping_add(1) };
        let fk = feynman_kac_ratio(&v, t, &x, &x, &cfg)?;
        let bound = (1.0 / (1.0 - ETA)).powf(1.0 + t / H);
        out.push(
            Check::le(format!("fk_positive/t{t}"), POS, fk.mean, bound, MC_SIGMAS * fk.stderr, true)
                .meta("measured_eta", num(eta))
                .meta("stderr", num(fk.stderr))
                .meta("paths", json!(fk.paths)),
        );
    }
    Ok(out)
}

/// `(dsl, dim, t, x, y)` with `x`, `y` on the first axis.
pub const ORACLE_CASES: [(&str, usize, f64, f64, f64); 10] = [
    ("ball:1,1", 1, 1.0, 0.0, 0.0),
    ("ball:1,2", 1, 0.5, 0.5, -0.5),
    ("const:1", 1, 1.0, 0.0, 1.0),
    ("dilate:4(ball:1,1)", 1, 1.0, 0.0, 0.0),
    ("ball:1,1", 2, 1.0, 0.0, 1.0),
    ("ball:1,0.5", 2, 0.25, 0.5, 0.5),
    ("dilate:0.25(ball:1,1)", 2, 1.0, 0.0, 0.0),
    ("ball:1,1", 3, 1.0, 0.0, 0.0),
    ("dilate:4(ball:1,1)", 3, 0.25, 0.0, 0.3),
    ("cyl3:1", 3, 1.0, 1.1, 1.1),
];

fn oracle(ctx: &Ctx, i: usize) -> Result<Vec<Check>> {
    let (dsl, d, t, a, b) = ORACLE_CASES[i];
    let v = parse(dsl, d)?;
    let x = SpacePoint::on_axis(d, a);
    let y = SpacePoint::on_axis(d, b);
    let q = s_value(&v, t, &x, &y, &ctx.cfg)?;
    let cfg = BridgeConfig { paths: ORACLE_PATHS, steps: ORACLE_STEPS, seed: ctx.seed.wrapping_add(100 + i as u64) };
    let mc = s_bridge_estimate(&v, t, &x, &y, &cfg)?;
    let tol = MC_SIGMAS * (mc.stderr + q.err_bound);
    Ok(vec![Check::close(format!("bridge_oracle/{i}"), ORACLE, mc.mean, q.value, tol, q.converged)
        .meta("potential", json!(dsl))
        .meta("dim", json!(d))
        .meta("t", num(t))
        .meta("x", num(a))
        .meta("y", num(b))
        .meta("stderr", num(mc.stderr))
        .meta("err_bound", num(q.err_bound))])
}

pub(super) fn tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = vec![
        Box::new(move || guard("fk_negative", NEG, || negative(ctx))),
        Box::new(move || guard("fk_positive", POS, || positive(ctx))),
    ];
    for i in 0..ORACLE_CASES.len() {
        tasks.push(Box::new(move || guard(&format!("bridge_oracle/{i}"), ORACLE, || oracle(ctx, i))));
    }
    tasks
}
