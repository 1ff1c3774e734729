//! Two-sided comparisons between the functionals: drift and resolvent
//! sandwiches, the S/N chain, doubling in time and dilatation invariance.

use std::f64::consts::{E, PI};

use gsek::quantities::{delta_inverse_norm, e_star, n_value, r_star, s_value, sup_n, sup_s, SupResult};
use gsek::{parse, Result, SpacePoint};
use serde_json::json;

use super::{converged, guard, sup_error, Ctx, Task, SLACK_FACTOR};
use crate::family::{standard_family, Member};
use crate::report::{num, Check};

pub const TIMES: [f64; 2] = [0.25, 1.0];
/// Relative agreement required of the dilatation identities.
pub const DILATATION_TOL: f64 = 1e-3;
pub const DILATIONS: [f64; 2] = [0.25, 4.0];

const DRIFT_LOW: &str = "r_*(V,t/2) <= (4 pi)^{-d/2} ||N(V,t)||";
const DRIFT_HIGH: &str = "(4 pi)^{-d/2} ||N(V,t)|| <= 2 r_*(V,t/2)";
const RES_LOW: &str = "(1 - e^{-1}) e_*(V,1/t) <= r_*(V,t)";
const RES_HIGH: &str = "r_*(V,t) <= e e_*(V,1/t)";
const CHAIN: &str = "m_1 N(V,t/2,x,y) <= S(V,t,x,y) <= m_2 N(V,t,x,y)";
const DOUBLING: &str = "||S(V)||_{2T,inf} <= 2 ||S(V)||_{T,inf}";
const DIL_DELTA: &str = "||Delta^{-1} (tau_s f)|| = ||Delta^{-1} f||";
const DIL_S: &str = "||S(tau_s f, t)|| = ||S(f, st)||";

/// `a <= b` with slack from both sides' error.
fn le(id: String, anchor: &str, a: f64, b: f64, parts: &[&SupResult]) -> Check {
    let slack = SLACK_FACTOR * sup_error(parts);
    Check::le(id, anchor, a, b, slack, converged(parts))
}

fn sandwich(ctx: &Ctx, m: &Member, d: usize, t: f64) -> Result<Vec<Check>> {
    let v = &m.potential;
    let n = ctx.sup("sup_N", m.dsl, d, t, |c, o| sup_n(v, t, c, o))?;
    let rh = ctx.sup("r_star", m.dsl, d, t / 2.0, |c, o| r_star(v, t / 2.0, c, o))?;
    let r = ctx.sup("r_star", m.dsl, d, t, |c, o| r_star(v, t, c, o))?;
    let e = ctx.sup("e_star", m.dsl, d, 1.0 / t, |c, o| e_star(v, 1.0 / t, c, o))?;
    let c = (4.0 * PI).powf(-(d as f64) / 2.0);
    let cn = SupResult { value: c * n.value, err_bound: c * n.err_bound, ..n.clone() };
    let base = format!("{}/d{d}/t{t}", m.dsl);
    let meta = |ch: Check| ch.meta("potential", json!(m.dsl)).meta("dim", json!(d)).meta("t", num(t));
    let rh2 = SupResult { value: 2.0 * rh.value, err_bound: 2.0 * rh.err_bound, ..rh.clone() };
    let k = 1.0 - (-1.0f64).exp();
    let ek = SupResult { value: k * e.value, err_bound: k * e.err_bound, ..e.clone() };
    let ee = SupResult { value: E * e.value, err_bound: E * e.err_bound, ..e.clone() };
    Ok(vec![
        meta(le(format!("drift_lower/{base}"), DRIFT_LOW, rh.value, cn.value, &[&rh, &cn])),
        meta(le(format!("drift_upper/{base}"), DRIFT_HIGH, cn.value, rh2.value, &[&cn, &rh2])),
        meta(le(format!("resolvent_lower/{base}"), RES_LOW, ek.value, r.value, &[&ek, &r])),
        meta(le(format!("resolvent_upper/{base}"), RES_HIGH, r.value, ee.value, &[&r, &ee])),
    ])
}

/// Sample pairs for the S/N chain, as offsets along the first axis.
const CHAIN_PAIRS: [(f64, f64); 3] = [(0.0, 0.0), (0.5, -0.5), (1.0, 1.0)];

/// Empirical m_1 = min S(t)/N(t/2) and m_2 = max S(t)/N(t) over the family.
fn chain(ctx: &Ctx, d: usize, t: f64) -> Result<Vec<Check>> {
    let (mut m1, mut m2) = (f64::INFINITY, 0.0f64);
    let mut conv = true;
    let mut per = serde_json::Map::new();
    for m in standard_family(d)? {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (a, b) in CHAIN_PAIRS {
            let x = SpacePoint::on_axis(d, a);
            let y = SpacePoint::on_axis(d, b);
            let s = s_value(&m.potential, t, &x, &y, &ctx.cfg)?;
            let nh = n_value(&m.potential, t / 2.0, &x, &y, &ctx.cfg)?;
            let nf = n_value(&m.potential, t, &x, &y, &ctx.cfg)?;
            conv &= s.converged && nh.converged && nf.converged;
            if nh.value > 0.0 && s.value > 0.0 {
                lo = lo.min(s.value / nh.value);
            }
            if nf.value > 0.0 {
                hi = hi.max(s.value / nf.value);
            }
        }
        per.insert(m.dsl.into(), json!({"m1": num(lo), "m2": num(hi)}));
        m1 = m1.min(lo);
        m2 = m2.max(hi);
    }
    // the constants exist: positive, finite and ordered
    let ok = m1 > 0.0 && m2.is_finite() && m1.is_finite();
    Ok(vec![Check::with(format!("sn_chain/d{d}/t{t}"), CHAIN, ok, conv, m1, m2, 0.0)
        .meta("m1", num(m1))
        .meta("m2", num(m2))
        .meta("per_potential", per.into())
        .meta("dim", json!(d))
        .meta("t", num(t))])
}

pub(super) fn sandwich_tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for d in 1..=3 {
        for m in standard_family(d).expect("standard family parses") {
            for t in TIMES {
                let m = m.clone();
                tasks.push(Box::new(move || {
                    guard(&format!("sandwich/{}/d{d}/t{t}", m.dsl), DRIFT_LOW, || sandwich(ctx, &m, d, t))
                }));
            }
        }
        for t in TIMES {
            tasks.push(Box::new(move || guard(&format!("sn_chain/d{d}/t{t}"), CHAIN, || chain(ctx, d, t))));
        }
    }
    tasks
}

pub(super) fn doubling_tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for d in 1..=3 {
        for m in standard_family(d).expect("standard family parses") {
            for t in TIMES {
                let m = m.clone();
                tasks.push(Box::new(move || {
                    let id = format!("doubling/{}/d{d}/T{t}", m.dsl);
                    guard(&id.clone(), DOUBLING, || {
                        let v = &m.potential;
                        let one = ctx.sup("sup_S", m.dsl, d, t, |c, o| sup_s(v, t, c, o))?;
                        let two = ctx.sup("sup_S", m.dsl, d, 2.0 * t, |c, o| sup_s(v, 2.0 * t, c, o))?;
                        let twice = SupResult { value: 2.0 * one.value, err_bound: 2.0 * one.err_bound, ..one.clone() };
                        Ok(vec![le(id, DOUBLING, two.value, twice.value, &[&two, &twice])
                            .meta("potential", json!(m.dsl))
                            .meta("dim", json!(d))
                            .meta("ratio", num(two.value / one.value))])
                    })
                }));
            }
        }
    }
    tasks
}

/// `|a - b| <= DILATATION_TOL * max(|a|, |b|)`, plus the quadrature error.
fn rel_close(id: String, anchor: &str, a: &SupResult, b: &SupResult) -> Check {
    let tol = DILATATION_TOL * a.value.abs().max(b.value.abs()) + a.err_bound + b.err_bound;
    Check::close(id, anchor, a.value, b.value, tol, converged(&[a, b]))
}

pub(super) fn dilatation_tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    const D: usize = 3;
    const BASE: &str = "ball:1,1";
    let mut tasks: Vec<Task<'_>> = Vec::new();
    for s in DILATIONS {
        tasks.push(Box::new(move || {
            let id = format!("dilatation/delta_inverse/s{s}");
            guard(&id.clone(), DIL_DELTA, || {
                let dsl = format!("dilate:{s}({BASE})");
                let f = parse(BASE, D)?;
                let g = parse(&dsl, D)?;
                let a = ctx.sup("delta_inv", &dsl, D, 0.0, |c, o| delta_inverse_norm(&g, c, o))?;
                let b = ctx.sup("delta_inv", BASE, D, 0.0, |c, o| delta_inverse_norm(&f, c, o))?;
                Ok(vec![rel_close(id, DIL_DELTA, &a, &b).meta("s", num(s))])
            })
        }));
        for t in TIMES {
            tasks.push(Box::new(move || {
                let id = format!("dilatation/sup_S/s{s}/t{t}");
                guard(&id.clone(), DIL_S, || {
                    let dsl = format!("dilate:{s}({BASE})");
                    let f = parse(BASE, D)?;
                    let g = parse(&dsl, D)?;
                    let a = ctx.sup("sup_S", &dsl, D, t, |c, o| sup_s(&g, t, c, o))?;
                    let b = ctx.sup("sup_S", BASE, D, s * t, |c, o| sup_s(&f, s * t, c, o))?;
                    Ok(vec![rel_close(id, DIL_S, &a, &b).meta("s", num(s)).meta("t", num(t))])
                })
            }));
        }
    }
    tasks
}
