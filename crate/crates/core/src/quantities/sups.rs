//! Suprema of the functionals over their free points.
//!
//! Default search balls: the support ball inflated by `sqrt(4t) tail_sigma`
//! for positions, radius `(diam + sqrt(4t) tail_sigma) / (2t)` for drifts.
//! The reported `argmax` is the first point followed by the second vector
//! (`y` or `alpha`) when there is one.

use serde::{Deserialize, Serialize};

use super::functionals::{
    check_time, delta_inverse_raw, k_raw, kato_raw, n_raw, r_raw, resolvent_raw, resolvent_time_raw, s_raw,
    Prepared,
};
use super::layout::{gaussian_reduction, symmetry, Layout, Symmetry};
use super::search::{sup_search, Pass, SearchOptions, SupResult};
use crate::error::{domain, Error, Result};
use crate::potential::{integration_pieces, Potential};
use crate::quadrature::{Estimate, QuadConfig};

/// Search controls shared by all suprema.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SupOptions {
    pub search: SearchOptions,
    /// Ball `(center, radius)` replacing the default for the first point.
    pub first: Option<(Vec<f64>, f64)>,
    /// Ball replacing the default for the second vector.
    pub second: Option<(Vec<f64>, f64)>,
    /// Extra refinement starts, as (first point, second vector).
    pub seeds: Vec<(Vec<f64>, Vec<f64>)>,
    /// Search the full parameter space instead of the reduced one implied by
    /// the symmetries of the potential.
    pub no_symmetry: bool,
}

/// Loose tolerances for the search phase; the final value uses `cfg`.
fn coarse(cfg: &QuadConfig, pass: Pass) -> QuadConfig {
    let (abs, rel) = match pass {
        Pass::Screen => (1e-6, 1e-3),
        Pass::Refine => (1e-8, 1e-5),
    };
    QuadConfig { abs_tol: cfg.abs_tol.max(abs), rel_tol: cfg.rel_tol.max(rel), ..*cfg }
}

#[derive(Clone, Copy)]
enum Second {
    None,
    /// A position: the support ball, inflated.
    Position,
    /// A drift or `y` of the comparison kernel: a ball about the origin.
    Vector(f64),
}

struct Plan {
    layout: Layout,
    has_second: bool,
    /// Extra starts as (first point, second vector).
    seeds: Vec<(Vec<f64>, Vec<f64>)>,
}

/// Which symmetry reduction a functional admits.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// Time integral of Gaussian masses with affine centres.
    GaussianMass,
    /// Rotation invariance only.
    Rotations,
    /// Like `Rotations`, but the second vector matters even for constants.
    RotationsSecondFree,
    /// As `RotationsSecondFree`, restricted to the symmetry axis.
    AxisOnly,
}

fn plan(v: &Potential, infl: f64, second: Second, kind: Kind, opts: &SupOptions) -> Result<Plan> {
    let dim = v.dim();
    let x_varies_for_const = matches!(kind, Kind::RotationsSecondFree | Kind::AxisOnly);
    let mut sym = if opts.no_symmetry {
        if v.is_translation_invariant() && !x_varies_for_const { Symmetry::Invariant } else { Symmetry::General }
    } else if kind == Kind::GaussianMass {
        gaussian_reduction(v)
    } else if kind == Kind::AxisOnly {
        match symmetry(v) {
            Symmetry::Axial(k) => Symmetry::OnAxis(k),
            s => s,
        }
    } else {
        symmetry(v)
    };
    let support = v.support_bound().map(|(c, r)| (c.into_vec(), r));
    let (c, r) = match (&support, &opts.first) {
        (_, Some(b)) => b.clone(),
        (Some(b), None) => (b.0.clone(), b.1 + infl),
        (None, None) if sym == Symmetry::Invariant => (vec![0.0; dim], 0.0),
        (None, None) => {
            return Err(Error::Usage("unbounded potential: an explicit search ball is required".into()));
        }
    };
    let r1 = if sym == Symmetry::Invariant { 0.0 } else { r };
    let second_ball = match second {
        Second::None => None,
        Second::Position => Some(opts.second.clone().unwrap_or((c.clone(), r))),
        Second::Vector(rad) => Some(opts.second.clone().unwrap_or((vec![0.0; dim], rad))),
    };
    if sym == Symmetry::Invariant && x_varies_for_const {
        sym = Symmetry::Radial;
    }
    let c = if sym == Symmetry::Invariant && !v.is_translation_invariant() { vec![0.0; dim] } else { c };
    let second_ball = match (sym, second_ball) {
        (Symmetry::Invariant, Some((_, r2))) if !v.is_translation_invariant() => Some((vec![0.0; dim], r2)),
        (_, b) => b,
    };
    let has_second = second_ball.is_some();
    if let Some((c2, _)) = &second_ball {
        if c2.len() != dim {
            return Err(domain("search ball has the wrong dimension"));
        }
    }
    if c.len() != dim {
        return Err(domain("search ball has the wrong dimension"));
    }
    // starts at piece centres guard against landscapes with one bump per piece
    let mut seeds = Vec::new();
    if matches!(kind, Kind::GaussianMass | Kind::Rotations) && sym != Symmetry::Invariant {
        let centres: Vec<Vec<f64>> =
            integration_pieces(v).iter().filter_map(|p| p.bounding_ball()).map(|(b, _)| b).collect();
        if centres.len() > 1 && centres.len() <= MAX_PIECE_SEEDS {
            for b in centres {
                let w = match second {
                    Second::Position => b.clone(),
                    _ => vec![0.0; dim],
                };
                seeds.push((b, w));
            }
        }
    }
    Ok(Plan { layout: Layout::new(dim, sym, c, r1, second_ball), has_second, seeds })
}

fn run<F>(pre: &Prepared, plan: &Plan, cfg: &QuadConfig, opts: &SupOptions, eval: F) -> Result<SupResult>
where
    F: Fn(&Prepared, &[f64], &[f64], &QuadConfig) -> Result<Estimate> + Sync,
{
    let lay = &plan.layout;
    let seeds: Vec<Vec<f64>> = opts.seeds.iter().chain(&plan.seeds).map(|(u, w)| lay.unmap(u, w)).collect();
    let mut res = sup_search(
        |p, pass| {
            let (u, w) = lay.map(p);
            Ok(eval(pre, &u, &w, &coarse(cfg, pass))?.value)
        },
        |p| {
            let (u, w) = lay.map(p);
            eval(pre, &u, &w, cfg)
        },
        &lay.search_box(),
        &opts.search,
        &seeds,
    )?;
    let (u, w) = lay.map(&res.argmax);
    res.argmax = u;
    if plan.has_second {
        res.argmax.extend(w);
    }
    Ok(res)
}

fn zero_result(dim: usize, has_second: bool) -> SupResult {
    SupResult::exact(0.0, vec![0.0; if has_second { 2 * dim } else { dim }])
}

fn tail(t: f64, cfg: &QuadConfig) -> f64 {
    (4.0 * t).sqrt() * cfg.tail_sigma
}

fn drift_radius(v: &Potential, t: f64, cfg: &QuadConfig) -> f64 {
    let diam = v.support_bound().map(|(_, r)| 2.0 * r).unwrap_or(0.0);
    (diam + tail(t, cfg)) / (2.0 * t)
}

/// `A(t) = sup_x int_0^t int g(s, x, z) |V(z)| dz ds`.
pub fn a_value(v: &Potential, t: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    check_time(t)?;
    cfg.validate()?;
    if v.is_zero() {
        return Ok(zero_result(v.dim(), false));
    }
    let plan = plan(v, tail(t, cfg), Second::None, Kind::GaussianMass, opts)?;
    run(&Prepared::new(v), &plan, cfg, opts, |pre, x, _, c| Ok(r_raw(pre, t, &vec![0.0; x.len()], x, c)))
}

/// Supremum over `x` of the dimension-dependent Kato bracket.
pub fn kato_bracket(v: &Potential, t: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    check_time(t)?;
    cfg.validate()?;
    if v.is_zero() {
        return Ok(zero_result(v.dim(), false));
    }
    let plan = plan(v, (4.0 * t).sqrt(), Second::None, Kind::Rotations, opts)?;
    run(&Prepared::new(v), &plan, cfg, opts, |pre, x, _, c| kato_raw(pre, t, x, c))
}

/// `r_*(V, t) = sup_{alpha, x} int_0^t int p_alpha(s, x, z) |V(z)| dz ds`.
pub fn r_star(v: &Potential, t: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    check_time(t)?;
    cfg.validate()?;
    if v.is_zero() {
        return Ok(zero_result(v.dim(), true));
    }
    let plan = plan(v, tail(t, cfg), Second::Vector(drift_radius(v, t, cfg)), Kind::GaussianMass, opts)?;
    run(&Prepared::new(v), &plan, cfg, opts, |pre, x, a, c| Ok(r_raw(pre, t, a, x, c)))
}

/// `e_*(V, lambda) = sup_{alpha, x} (lambda - Delta + 2 alpha . grad)^{-1} |V| (x)`.
///
/// The search runs on the time form of the resolvent; the reported value is
/// the spatial integral against the resolvent kernel at the argmax.
pub fn e_star(v: &Potential, lambda: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(domain(format!("lambda must be finite and positive, got {lambda}")));
    }
    cfg.validate()?;
    if v.is_zero() {
        return Ok(zero_result(v.dim(), true));
    }
    let t = 1.0 / lambda;
    let plan = plan(v, tail(t, cfg), Second::Vector(drift_radius(v, t, cfg)), Kind::GaussianMass, opts)?;
    let pre = Prepared::new(v);
    let lay = &plan.layout;
    let seeds: Vec<Vec<f64>> = opts.seeds.iter().chain(&plan.seeds).map(|(u, w)| lay.unmap(u, w)).collect();
    let mut res = sup_search(
        |p, pass| {
            let (x, a) = lay.map(p);
            Ok(resolvent_time_raw(&pre, lambda, &a, &x, &coarse(cfg, pass)).value)
        },
        |p| {
            let (x, a) = lay.map(p);
            resolvent_raw(&pre, lambda, &a, &x, cfg)
        },
        &lay.search_box(),
        &opts.search,
        &seeds,
    )?;
    let (x, a) = lay.map(&res.argmax);
    res.argmax = x;
    res.argmax.extend(a);
    Ok(res)
}

/// `||Delta^{-1} V||_inf`, searched over twice the support ball.
pub fn delta_inverse_norm(v: &Potential, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    cfg.validate()?;
    if v.is_zero() {
        return Ok(zero_result(v.dim(), false));
    }
    let r = v.support_bound().map(|(_, r)| r).unwrap_or(0.0);
    let plan = plan(v, r, Second::None, Kind::Rotations, opts)?;
    run(&Prepared::new(v), &plan, cfg, opts, |pre, x, _, c| {
        let e = delta_inverse_raw(pre, x, c)?;
        Ok(Estimate { value: e.value.abs(), ..e })
    })
}

/// `||S(V, t)||_inf = sup_{x, y} S(V, t, x, y)`.
pub fn sup_s(v: &Potential, t: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    check_time(t)?;
    cfg.validate()?;
    if v.is_zero() {
        return Ok(zero_result(v.dim(), true));
    }
    let plan = plan(v, tail(t, cfg), Second::Position, Kind::GaussianMass, opts)?;
    run(&Prepared::new(v), &plan, cfg, opts, |pre, x, y, c| Ok(s_raw(pre, t, x, y, c)))
}

/// `||N(V, t)||_inf = sup_{x, y} N(V, t, x, y)`.
pub fn sup_n(v: &Potential, t: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    check_time(t)?;
    cfg.validate()?;
    if v.is_zero() {
        return Ok(zero_result(v.dim(), true));
    }
    let plan = plan(v, tail(t, cfg), Second::Position, Kind::GaussianMass, opts)?;
    run(&Prepared::new(v), &plan, cfg, opts, |pre, x, y, c| Ok(n_raw(pre, t, x, y, c)))
}

/// `||K(V, t)||_inf = sup_{x, y} int K(t, z - x, y) |V(z)| dz`. The `y` ball
/// has radius `2 R / t`, `R` the inflated support radius, so the cutoff
/// `|z - x| <= t|y|` can reach the whole support from any `x` searched.
pub fn sup_k(v: &Potential, t: f64, cfg: &QuadConfig, opts: &SupOptions) -> Result<SupResult> {
    check_time(t)?;
    cfg.validate()?;
    if v.is_zero() {
        return Ok(zero_result(v.dim(), true));
    }
    let r = v.support_bound().map(|(_, r)| r).unwrap_or(0.0) + tail(t, cfg);
    let pre = Prepared::new(v);
    let eval = |pre: &Prepared, x: &[f64], y: &[f64], c: &QuadConfig| k_raw(pre, t, x, y, c);
    let second = Second::Vector(2.0 * r / t);
    if opts.no_symmetry || !matches!(symmetry(v), Symmetry::Axial(_)) {
        let plan = plan(v, tail(t, cfg), second, Kind::RotationsSecondFree, opts)?;
        return run(&pre, &plan, cfg, opts, eval);
    }
    // Axial potentials: search with both points on the axis first, then
    // search the full space on a coarser grid seeded with that maximiser.
    let mut axis_opts = opts.clone();
    axis_opts.search.per_axis *= AXIAL_REFINEMENT;
    // the on-axis landscape has one bump per piece, narrower than the grid
    // step for long families, so every piece centre is also a start
    let d = v.dim();
    let pieces: Vec<(Vec<f64>, f64)> = pre.pieces.iter().filter_map(|p| p.bounding_ball()).collect();
    if pieces.len() <= MAX_PIECE_SEEDS {
        for (c, r) in pieces {
            let y0 = (r + t.sqrt()) / t;
            for sgn in [-1.0, 1.0] {
                let mut y = vec![0.0; d];
                if let Symmetry::Axial(k) = symmetry(v) {
                    y[k] = sgn * y0;
                }
                axis_opts.seeds.push((c.clone(), y));
            }
        }
    }
    let axis = run(&pre, &plan(v, tail(t, cfg), second, Kind::AxisOnly, &axis_opts)?, cfg, &axis_opts, eval)?;
    let mut full_opts = opts.clone();
    full_opts.search.max_grid = full_opts.search.max_grid.min(AXIAL_FULL_GRID);
    // grid points are ranked with relative accuracy about 1e-3
    full_opts.search.refine_above = Some(axis.value * (1.0 + 3e-3));
    let full = run(&pre, &plan(v, tail(t, cfg), second, Kind::RotationsSecondFree, &full_opts)?, cfg, &full_opts, eval)?;
    let total = axis.grid_points + full.grid_points;
    let mut best = if full.value >= axis.value { full } else { axis };
    best.grid_points = total;
    Ok(best)
}

/// Above this many pieces, piece centres are not used as search starts.
const MAX_PIECE_SEEDS: usize = 64;

/// On-axis evaluations are cheap, so their grid is this many times denser.
const AXIAL_REFINEMENT: usize = 5;

/// Grid budget of the full K search once an on-axis maximiser is known.
const AXIAL_FULL_GRID: usize = 729;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::parse;

    #[test]
    fn constant_sups() {
        let cfg = QuadConfig::default();
        let o = SupOptions::default();
        for d in 1..=3 {
            let v = Potential::constant(d, 1.0).unwrap();
            assert!((a_value(&v, 0.5, &cfg, &o).unwrap().value - 0.5).abs() < 1e-9);
            assert!((r_star(&v, 0.5, &cfg, &o).unwrap().value - 0.5).abs() < 1e-9);
            assert!((e_star(&v, 2.0, &cfg, &o).unwrap().value - 0.5).abs() < 1e-9);
            assert!((sup_s(&v, 0.5, &cfg, &o).unwrap().value - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn ball_sups_at_centre() {
        let cfg = QuadConfig::default();
        let o = SupOptions::default();
        let v = parse("ball:1,1", 3).unwrap();
        let k = kato_bracket(&v, 1.0, &cfg, &o).unwrap();
        assert!((k.value - 2.0 * std::f64::consts::PI).abs() < 1e-6, "{k:?}");
        let n = delta_inverse_norm(&v, &cfg, &o).unwrap();
        assert!((n.value - 0.5).abs() < 1e-7, "{n:?}");
        let a = a_value(&parse("ball:1,1", 1).unwrap(), 1.0, &cfg, &o).unwrap();
        assert!(a.argmax[0].abs() < 1e-3, "{a:?}");
    }

    #[test]
    fn reduction_agrees_with_full_search() {
        let cfg = QuadConfig::default();
        let v = parse("ball:1,1", 3).unwrap();
        let fast = sup_s(&v, 0.5, &cfg, &SupOptions::default()).unwrap();
        let full = sup_s(&v, 0.5, &cfg, &SupOptions { no_symmetry: true, ..Default::default() }).unwrap();
        assert_eq!(fast.grid_points, 1);
        assert!(full.grid_points > 100);
        assert!(full.value <= fast.value + 1e-7, "{} {}", full.value, fast.value);
        assert!(full.value >= fast.value - 1e-4, "{} {}", full.value, fast.value);
    }

    #[test]
    fn zero_everywhere() {
        let v = Potential::zero(2);
        let cfg = QuadConfig::default();
        let o = SupOptions::default();
        assert_eq!(sup_k(&v, 1.0, &cfg, &o).unwrap().value, 0.0);
        assert_eq!(e_star(&v, 1.0, &cfg, &o).unwrap().value, 0.0);
    }
}
