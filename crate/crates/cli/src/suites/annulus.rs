//! Planar half-annulus comparison: the K kernel seen from far along the
//! axis, integrated over the half annulus, against the local mass.

use gsek::quantities::{half_annulus_sup, local_mass_sup};
use gsek::Result;
use serde_json::{json, Map};

use super::{converged, guard, sup_error, Ctx, Task};
use crate::family::{standard_family, Member};
use crate::report::{num, Check};

pub const RADII: [f64; 4] = [2.0, 5.0, 10.0, 20.0];
/// The uniform constant every ratio must stay under.
pub const CEILING: f64 = 1.0;
/// Largest allowed ratio(20) / ratio(10): a bounded sequence must stop
/// growing geometrically.
pub const GROWTH: f64 = 1.25;

const ANCHOR: &str = "int_{D_r} K(1,z,(r,0)) U(z) dz <= c sup_w int_{|z|<=2} U(z+w) dz uniformly in r";

fn member_checks(ctx: &Ctx, m: &Member) -> Result<Vec<Check>> {
    const D: usize = 2;
    let u = &m.potential;
    let den = ctx.sup("local_mass", m.dsl, D, 0.0, |c, o| local_mass_sup(u, c, o))?;
    let mut ratios = Vec::new();
    let mut per = Map::new();
    let mut out = Vec::new();
    for r in RADII {
        let num_r = ctx.sup("half_annulus", m.dsl, D, r, |c, o| half_annulus_sup(u, r, c, o))?;
        let ratio = num_r.value / den.value;
        // relative error of the quotient from both sides
        let err = ratio * (sup_error(&[&num_r]) / num_r.value.max(f64::MIN_POSITIVE) + sup_error(&[&den]) / den.value);
        let conv = converged(&[&num_r, &den]);
        out.push(
            Check::le(format!("half_annulus/{}/r{r}", m.dsl), ANCHOR, ratio, CEILING, 3.0 * err, conv)
                .meta("potential", json!(m.dsl))
                .meta("r", num(r))
                .meta("numerator", num(num_r.value))
                .meta("local_mass", num(den.value)),
        );
        per.insert(format!("{r}"), num(ratio));
        ratios.push((ratio, conv));
    }
    let (r10, c10) = ratios[2];
    let (r20, c20) = ratios[3];
    let growth = if r10 > 0.0 { r20 / r10 } else { 0.0 };
    out.push(
        Check::le(format!("half_annulus_growth/{}", m.dsl), ANCHOR, growth, GROWTH, 0.0, c10 && c20)
            .meta("potential", json!(m.dsl))
            .meta("ratios", per.into()),
    );
    Ok(out)
}

pub(super) fn tasks(ctx: &Ctx) -> Vec<Task<'_>> {
    standard_family(2)
        .expect("standard family parses")
        .into_iter()
        .map(|m| -> Task<'_> { Box::new(move || guard(&format!("half_annulus/{}", m.dsl), ANCHOR, || member_checks(ctx, &m))) })
        .collect()
}
