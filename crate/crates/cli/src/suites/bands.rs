//! Ratio bands across the standard family: sup_S against ||K|| in every
//! dimension and against A in low dimension. Each band is recomputed with
//! refined tolerances and must reproduce.

use gsek::quantities::{a_value, sup_k, sup_s, SupResult};
use gsek::Result;
use serde_json::{json, Map};

use super::{guard, Ctx, Task};
use crate::family::standard_family;
use crate::report::{num, Check};

pub const HORIZON: f64 = 1.0;
/// Allowed spread `max/min - 1` of each band end between the two runs.
pub const REPRODUCE: f64 = 0.2;

const K_BAND: &str = "C_1 ||K(V,T)|| <= ||S(V)||_{T,inf} <= C_2 ||K(V,T)||";
const A_BAND: &str = "||S(V)||_{T,inf} comparable to A(T) with absolute constants, d <= 2";

type Denominator = fn(&Ctx, &str, usize, &gsek::Potential) -> Result<SupResult>;

fn k_den(ctx: &Ctx, dsl: &str, d: usize, v: &gsek::Potential) -> Result<SupResult> {
    ctx.sup("sup_K", dsl, d, HORIZON, |c, o| sup_k(v, HORIZON, c, o))
}

fn a_den(ctx: &Ctx, dsl: &str, d: usize, v: &gsek::Potential) -> Result<SupResult> {
    ctx.sup("A", dsl, d, HORIZON, |c, o| a_value(v, HORIZON, c, o))
}

struct Band {
    lo: f64,
    hi: f64,
    converged: bool,
    ratios: Map<String, serde_json::Value>,
}

fn band(ctx: &Ctx, d: usize, den: Denominator) -> Result<Band> {
    let mut b = Band { lo: f64::INFINITY, hi: 0.0, converged: true, ratios: Map::new() };
    for m in standard_family(d)? {
        let v = &m.potential;
        let s = ctx.sup("sup_S", m.dsl, d, HORIZON, |c, o| sup_s(v, HORIZON, c, o))?;
        let k = den(ctx, m.dsl, d, v)?;
        let r = s.value / k.value;
        b.converged &= s.converged && k.converged;
        b.lo = b.lo.min(r);
        b.hi = b.hi.max(r);
        b.ratios.insert(m.dsl.into(), num(r));
    }
    Ok(b)
}

fn band_checks(ctx: &Ctx, d: usize, name: &str, anchor: &str, den: Denominator) -> Result<Vec<Check>> {
    let first = band(ctx, d, den)?;
    let second = band(ctx.refined(), d, den)?;
    let meta = |c: Check| {
        c.meta("dim", json!(d))
            .meta("C1", num(first.lo))
            .meta("C2", num(first.hi))
            .meta("refined_C1", num(second.lo))
            .meta("refined_C2", num(second.hi))
            .meta("ratios", first.ratios.clone().into())
            .meta("refined_ratios", second.ratios.clone().into())
    };
    let conv = first.converged && second.converged;
    let ok = first.lo > 0.0 && first.hi.is_finite();
    let mut out = vec![meta(Check::with(format!("{name}/interval/d{d}"), anchor, ok, conv, first.lo, first.hi, 0.0))];
    for (end, x, y) in [("C1", first.lo, second.lo), ("C2", first.hi, second.hi)] {
        let spread = x.max(y) / x.min(y);
        out.push(meta(Check::le(format!("{name}/reproduce_{end}/d{d}"), anchor, spread, 1.0 + REPRODUCE, 0.0, conv)));
    }
    Ok(out)
}

pub(super) fn k_band_tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    (1..=3)
        .map(|d| -> Task<'_> { Box::new(move || guard(&format!("k_band/d{d}"), K_BAND, || band_checks(ctx, d, "k_band", K_BAND, k_den))) })
        .collect()
}

pub(super) fn a_band_tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    (1..=2)
        .map(|d| -> Task<'_> { Box::new(move || guard(&format!("a_band/d{d}"), A_BAND, || band_checks(ctx, d, "a_band", A_BAND, a_den))) })
        .collect()
}
