//! The `eval`, `compare` and `counterexample-d3` verbs.

use std::f64::consts::PI;
use std::time::Instant;

use gsek::bridge_mc::feynman_kac_ratio;
use gsek::kernels::{drifted_kernel, gauss_weierstrass, sharp_kernel};
use gsek::potential::{cylinder_potential, f_antiderivative, f_profile};
use gsek::quadrature::{integrate_1d, Tol};
use gsek::quantities::{
    a_point, a_value, delta_inverse, delta_inverse_norm, e_star, k_potential_value, kato_bracket, kato_point,
    n_value, r_point, r_star, resolvent_point, s_value, sup_k, sup_n, sup_s, SupOptions, SupResult,
};
use gsek::{parse, BridgeConfig, Error, Estimate, MCEstimate, Potential, QuadConfig, Result, SpacePoint};
use serde_json::{json, Map, Value};

use crate::family::FAMILY_VERSION;
use crate::report::{num, Check, Meta, SuiteReport, SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    #[value(name = "g")]
    G,
    #[value(name = "p_alpha")]
    PAlpha,
    #[value(name = "K")]
    K,
    #[value(name = "S")]
    S,
    #[value(name = "N")]
    N,
    #[value(name = "A")]
    A,
    Bracket,
    #[value(name = "r_star")]
    RStar,
    #[value(name = "e_star")]
    EStar,
    #[value(name = "delta_inv")]
    DeltaInv,
    #[value(name = "fk_ratio")]
    FkRatio,
}

/// Parameters of `eval`; points are given in full coordinates.
#[derive(Debug, Clone, Default)]
pub struct EvalParams {
    pub t: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub z: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub paths: u64,
    pub steps: usize,
    pub seed: u64,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn point(name: &str, p: &Option<Vec<f64>>, dim: usize) -> Result<SpacePoint> {
    let v = p.clone().ok_or_else(|| usage(format!("--{name} is required")))?;
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    SpacePoint::new(v)
}

fn opt_point(p: &Option<Vec<f64>>, name: &str, dim: usize) -> Result<Option<SpacePoint>> {
    p.as_ref().map(|_| point(name, p, dim)).transpose()
}

fn need(name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| usage(format!("--{name} is required")))
}

fn pot(p: Option<&Potential>) -> Result<&Potential> {
    p.ok_or_else(|| usage("--potential is required"))
}

fn estimate(e: Estimate) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kind".into(), json!("estimate"));
    m.insert("value".into(), num(e.value));
    m.insert("err_bound".into(), num(e.err_bound));
    m.insert("converged".into(), json!(e.converged));
    m.insert("evals".into(), json!(e.evals));
    m
}

fn sup(r: SupResult) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kind".into(), json!("sup"));
    m.insert("value".into(), num(r.value));
    m.insert("err_bound".into(), num(r.err_bound));
    m.insert("converged".into(), json!(r.converged));
    m.insert("argmax".into(), Value::Array(r.argmax.iter().map(|&v| num(v)).collect()));
    m.insert("grid_points".into(), json!(r.grid_points));
    m.insert("refinements".into(), json!(r.refinements));
    m.insert("lower_bound_only".into(), json!(r.lower_bound_only));
    m
}

fn exact(v: f64) -> Map<String, Value> {
    estimate(Estimate::exact(v))
}

fn mc(e: MCEstimate) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kind".into(), json!("mc"));
    m.insert("value".into(), num(e.mean));
    m.insert("stderr".into(), num(e.stderr));
    m.insert("paths".into(), json!(e.paths));
    m
}

/// Evaluates one quantity. Pointwise when the points it depends on are
/// given, otherwise the supremum over them.
pub fn eval(
    q: Quantity,
    dim: usize,
    v: Option<&Potential>,
    p: &EvalParams,
    cfg: &QuadConfig,
) -> Result<Map<String, Value>> {
    let opts = SupOptions::default();
    let x = opt_point(&p.x, "x", dim)?;
    let y = opt_point(&p.y, "y", dim)?;
    let alpha = opt_point(&p.alpha, "alpha", dim)?;
    Ok(match q {
        Quantity::G => exact(gauss_weierstrass(need("t", p.t)?, &point("x", &p.x, dim)?, &point("y", &p.y, dim)?)?),
        Quantity::PAlpha => exact(drifted_kernel(
            &point("alpha", &p.alpha, dim)?,
            need("t", p.t)?,
            &point("x", &p.x, dim)?,
            &point("z", &p.z, dim)?,
        )?),
        Quantity::K => {
            let t = need("t", p.t)?;
            match (v, x, y) {
                (None, Some(x), Some(y)) => exact(sharp_kernel(t, &x, &y)?),
                (Some(v), Some(x), Some(y)) => estimate(k_potential_value(v, t, &x, &y, cfg)?),
                (Some(v), None, None) => sup(sup_k(v, t, cfg, &opts)?),
                _ => return Err(usage("K needs --x and --y together, or neither with --potential")),
            }
        }
        Quantity::S | Quantity::N => {
            let t = need("t", p.t)?;
            let v = pot(v)?;
            match (x, y, q) {
                (Some(x), Some(y), Quantity::S) => estimate(s_value(v, t, &x, &y, cfg)?),
                (Some(x), Some(y), _) => estimate(n_value(v, t, &x, &y, cfg)?),
                (None, None, Quantity::S) => sup(sup_s(v, t, cfg, &opts)?),
                (None, None, _) => sup(sup_n(v, t, cfg, &opts)?),
                _ => return Err(usage("give --x and --y together, or neither for the supremum")),
            }
        }
        Quantity::A => {
            let (t, v) = (need("t", p.t)?, pot(v)?);
            match x {
                Some(x) => estimate(a_point(v, t, &x, cfg)?),
                None => sup(a_value(v, t, cfg, &opts)?),
            }
        }
        Quantity::Bracket => {
            let (t, v) = (need("t", p.t)?, pot(v)?);
            match x {
                Some(x) => estimate(kato_point(v, t, &x, cfg)?),
                None => sup(kato_bracket(v, t, cfg, &opts)?),
            }
        }
        Quantity::RStar => {
            let (t, v) = (need("t", p.t)?, pot(v)?);
            match (alpha, x) {
                (Some(a), Some(x)) => estimate(r_point(v, t, &a, &x, cfg)?),
                (None, None) => sup(r_star(v, t, cfg, &opts)?),
                _ => return Err(usage("give --alpha and --x together, or neither for the supremum")),
            }
        }
        Quantity::EStar => {
            let (l, v) = (need("lambda", p.lambda)?, pot(v)?);
            match (alpha, x) {
                (Some(a), Some(x)) => estimate(resolvent_point(v, l, &a, &x, cfg)?),
                (None, None) => sup(e_star(v, l, cfg, &opts)?),
                _ => return Err(usage("give --alpha and --x together, or neither for the supremum")),
            }
        }
        Quantity::DeltaInv => {
            let v = pot(v)?;
            match x {
                Some(x) => estimate(delta_inverse(v, &x, cfg)?),
                None => sup(delta_inverse_norm(v, cfg, &opts)?),
            }
        }
        Quantity::FkRatio => {
            let (t, v) = (need("t", p.t)?, pot(v)?);
            let bc = BridgeConfig { paths: p.paths, steps: p.steps, seed: p.seed };
            mc(feynman_kac_ratio(v, t, &point("x", &p.x, dim)?, &point("y", &p.y, dim)?, &bc)?)
        }
    })
}

/// The six quantities of `compare`, in output order.
pub const COMPARE_NAMES: [&str; 6] = ["sup_S", "sup_N", "sup_K", "r_star", "e_star", "A"];

/// All six quantities at horizon `t` and their pairwise ratios `row / column`.
pub fn compare(v: &Potential, t: f64, cfg: &QuadConfig) -> Result<(Vec<SupResult>, Vec<Vec<f64>>)> {
    let o = SupOptions::default();
    let q = vec![
        sup_s(v, t, cfg, &o)?,
        sup_n(v, t, cfg, &o)?,
        sup_k(v, t, cfg, &o)?,
        r_star(v, t, cfg, &o)?,
        e_star(v, 1.0 / t, cfg, &o)?,
        a_value(v, t, cfg, &o)?,
    ];
    let ratios = q.iter().map(|a| q.iter().map(|b| a.value / b.value).collect()).collect();
    Ok((q, ratios))
}

/// `pi e^{-1/2} / 8`.
pub fn lower_constant() -> f64 {
    PI * (-0.5f64).exp() / 8.0
}

/// `B(n) = (pi e^{-1/2}/8) (lnlnln(25n) - lnlnln 25)` through the antiderivative of f.
pub fn lower_bound(n: u32) -> Result<f64> {
    Ok(lower_constant() * (f_antiderivative(1.0 / 25.0)? - f_antiderivative(1.0 / (25.0 * n as f64))?))
}

/// `int_{1/(25n)}^{1/25} f(r) dr` by quadrature.
pub fn f_integral(n: u32, tol: Tol) -> Estimate {
    integrate_1d(|r| f_profile(r).unwrap_or(0.0), 1.0 / (25.0 * n as f64), 1.0 / 25.0, tol)
}

/// `e^{-1/2} int |V_n(z)| / |z| dz`, integrated disk by disk in closed form:
/// `int_{|rho| <= a} (z_1^2 + rho^2)^{-1/2} = 2 pi (sqrt(z_1^2 + a^2) - z_1)`.
pub fn chain_value(n: u32, tol: Tol) -> Estimate {
    let scale = 25.0 * n as f64;
    let mut total = Estimate::zero();
    for k in 1..=n {
        let a2 = k as f64 / scale;
        let e = integrate_1d(
            |z1| 2.0 * PI * ((z1 * z1 + a2).sqrt() - z1) * f_profile(z1 / scale).unwrap_or(0.0),
            k as f64,
            k as f64 + 0.25,
            tol,
        );
        total = total.plus(e);
    }
    total.scaled((-0.5f64).exp())
}

/// Accuracy required of the closed-form lower bound against quadrature of f.
pub const ANTIDERIVATIVE_TOL: f64 = 1e-4;

const COUNTER: &str = "||K(V_n,1)||_inf >= (pi e^{-1/2}/8) int_{1/(25n)}^{1/25} f(r) dr";
const CHAIN: &str = "K(V_n,1,0,(25n,0,0)) >= e^{-1/2} int |V_n(z)|/|z| dz >= B(n)";
const MONO: &str = "B(n) increases with n";
const ANTI: &str = "B(n) from the antiderivative of f matches quadrature of f";

/// One row per `n` with `L(n) = K(V_n, 1, 0, (25n, 0, 0))` and `B(n)`.
pub fn counterexample(ns: &[u32], seed: u64, cfg: &QuadConfig) -> SuiteReport {
    let start = Instant::now();
    let tol = Tol::new(1e-12, 1e-10);
    let mut checks = Vec::new();
    let mut prev: Option<f64> = None;
    for &n in ns {
        let row = (|| -> Result<Vec<Check>> {
            let v = cylinder_potential(n)?;
            let x = SpacePoint::origin(3);
            let y = SpacePoint::new(vec![25.0 * n as f64, 0.0, 0.0])?;
            let l = k_potential_value(&v, 1.0, &x, &y, cfg)?;
            let b = lower_bound(n)?;
            let f = f_integral(n, tol);
            let fb = lower_constant() * f.value;
            let c = chain_value(n, tol);
            let meta = |ch: Check| {
                ch.meta("n", json!(n))
                    .meta("L", num(l.value))
                    .meta("L_err", num(l.err_bound))
                    .meta("B", num(b))
                    .meta("chain", num(c.value))
            };
            let mut out = vec![
                meta(Check::le(format!("counterexample/L_ge_B/n{n}"), COUNTER, b, l.value, 0.0, l.converged)),
                meta(Check::le(format!("counterexample/chain_upper/n{n}"), CHAIN, c.value, l.value, 3.0 * (l.err_bound + c.err_bound), l.converged && c.converged)),
                meta(Check::le(format!("counterexample/chain_lower/n{n}"), CHAIN, b, c.value, 3.0 * c.err_bound, c.converged)),
                meta(Check::close(format!("counterexample/antiderivative/n{n}"), ANTI, b, fb, ANTIDERIVATIVE_TOL, f.converged)),
            ];
            if let Some(p) = prev {
                out.push(meta(Check::with(format!("counterexample/monotone/n{n}"), MONO, b > p, true, p, b, 0.0)));
            }
            prev = Some(b);
            Ok(out)
        })();
        checks.extend(row.unwrap_or_else(|e| vec![Check::error(format!("counterexample/n{n}"), COUNTER, &e)]));
    }
    SuiteReport {
        meta: Meta {
            schema: SCHEMA,
            suite: "counterexample_d3".into(),
            seed,
            config: json!({"abs_tol": cfg.abs_tol, "rel_tol": cfg.rel_tol, "max_evals": cfg.max_evals, "tail_sigma": cfg.tail_sigma, "n": ns}),
            family: FAMILY_VERSION,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: start.elapsed().as_secs_f64(),
        },
        checks,
    }
}

/// The potential for `eval` and `compare`.
pub fn parse_potential(src: &str, dim: usize) -> Result<Potential> {
    parse(src, dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lower_bound_values() {
        let b = lower_bound(10).unwrap();
        assert!((b - 0.0903963).abs() < 1e-6, "{b}");
        let f = f_integral(10, Tol::new(1e-12, 1e-10));
        assert!((lower_constant() * f.value - b).abs() < 1e-8);
        assert!(lower_bound(1000).unwrap() > lower_bound(100).unwrap());
    }

    #[test]
    fn chain_sits_between() {
        let tol = Tol::new(1e-12, 1e-10);
        let c = chain_value(10, tol);
        assert!(c.value >= lower_bound(10).unwrap());
    }

    #[test]
    fn eval_examples() {
        let cfg = QuadConfig::with_tol(1e-9, 1e-7);
        let p = EvalParams { t: Some(0.5), x: Some(vec![0.0]), y: Some(vec![0.0]), ..Default::default() };
        let v = parse("const:1", 1).unwrap();
        let r = eval(Quantity::S, 1, Some(&v), &p, &cfg).unwrap();
        assert!((r["value"].as_f64().unwrap() - 0.5).abs() < 1e-9);
        let z = parse("zero", 2).unwrap();
        let p = EvalParams { t: Some(1.0), x: Some(vec![0.0, 0.0]), y: Some(vec![2.0, 0.0]), ..Default::default() };
        let r = eval(Quantity::K, 2, Some(&z), &p, &cfg).unwrap();
        assert_eq!(r["value"].as_f64().unwrap(), 0.0);
    }
}
