//! Supremum search over a box: a coarse grid, then coordinatewise
//! golden-section refinement from the best grid points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::quadrature::Estimate;

/// Axis-aligned search box. Axes with `lo == hi` are held fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SearchBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert_eq!(lo.len(), hi.len());
        Self { lo, hi }
    }

    pub fn point(p: Vec<f64>) -> Self {
        Self { lo: p.clone(), hi: p }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn active(&self) -> usize {
        self.lo.iter().zip(&self.hi).filter(|(a, b)| b > a).count()
    }

    fn clamp(&self, p: &mut [f64]) {
        for i in 0..p.len() {
            p[i] = p[i].clamp(self.lo[i], self.hi[i]);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Upper bound on grid points; the per-axis count shrinks to respect it.
    pub max_grid: usize,
    /// Points per free axis before the cap (made odd so box centres are hit).
    pub per_axis: usize,
    pub seeds: usize,
    /// Golden-section stops when the bracket is shorter than this.
    pub xtol: f64,
    pub sweeps: usize,
    /// Grid points whose screening value does not exceed this are not
    /// refined; extra seeds are always refined.
    #[serde(default)]
    pub refine_above: Option<f64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { max_grid: 4096, per_axis: 9, seeds: 5, xtol: 1e-4, sweeps: 2, refine_above: None }
    }
}

/// Approximate supremum of a functional.
///
/// `value` is the functional at `argmax`, so it bounds the true supremum
/// from below up to `err_bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupResult {
    pub value: f64,
    pub err_bound: f64,
    pub argmax: Vec<f64>,
    pub grid_points: usize,
    pub refinements: usize,
    pub lower_bound_only: bool,
    pub converged: bool,
}

impl SupResult {
    pub fn exact(value: f64, argmax: Vec<f64>) -> Self {
        Self { value, err_bound: 0.0, argmax, grid_points: 0, refinements: 0, lower_bound_only: true, converged: true }
    }

    pub(crate) fn from_estimate(e: Estimate, argmax: Vec<f64>, grid_points: usize, refinements: usize) -> Self {
        Self {
            value: e.value,
            err_bound: e.err_bound,
            argmax,
            grid_points,
            refinements,
            lower_bound_only: true,
            converged: e.converged,
        }
    }
}

/// Largest odd count `<= per_axis` with `count^active <= max_grid`.
fn axis_count(opts: &SearchOptions, active: usize) -> usize {
    if active == 0 {
        return 1;
    }
    let mut n = opts.per_axis.max(1);
    if n % 2 == 0 {
        n -= 1;
    }
    while n > 1 && (n as f64).powi(active as i32) > opts.max_grid as f64 {
        n -= 2;
    }
    n
}

fn grid_points(bx: &SearchBox, n: usize) -> Vec<Vec<f64>> {
    let d = bx.dim();
    let counts: Vec<usize> = (0..d).map(|i| if bx.hi[i] > bx.lo[i] { n } else { 1 }).collect();
    let total: usize = counts.iter().product();
    (0..total)
        .map(|mut idx| {
            (0..d)
                .map(|i| {
                    let k = idx % counts[i];
                    idx /= counts[i];
                    if counts[i] == 1 {
                        0.5 * (bx.lo[i] + bx.hi[i])
                    } else {
                        bx.lo[i] + (bx.hi[i] - bx.lo[i]) * k as f64 / (counts[i] - 1) as f64
                    }
                })
                .collect()
        })
        .collect()
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximises `g` on `[a, b]`, returning the best abscissa and value if
/// either beats `best`.
fn golden<G: FnMut(f64) -> Result<f64>>(mut g: G, mut a: f64, mut b: f64, xtol: f64, best: f64) -> Result<Option<(f64, f64)>> {
    let mut top: Option<(f64, f64)> = None;
    let note = |x: f64, fx: f64, top: &mut Option<(f64, f64)>| {
        if fx > top.map_or(best, |t| t.1) {
            *top = Some((x, fx));
        }
    };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = g(x1)?;
    let mut f2 = g(x2)?;
    note(x1, f1, &mut top);
    note(x2, f2, &mut top);
    while b - a > xtol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = g(x1)?;
            note(x1, f1, &mut top);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = g(x2)?;
            note(x2, f2, &mut top);
        }
    }
    Ok(top)
}

/// Extra sweeps allowed after the halving ones while the value still rises.
const POLISH_SWEEPS: usize = 12;
/// A sweep gaining less than this relative amount ends the polish.
const POLISH_GAIN: f64 = 1e-6;

/// Coordinate-wise golden section with shrinking windows, then polishing
/// sweeps each followed by a line search along the sweep's net move, which
/// follows ridges that are not aligned with the axes.
fn refine<F: Fn(&[f64]) -> Result<f64>>(
    f: &F,
    bx: &SearchBox,
    p: &mut Vec<f64>,
    fp: &mut f64,
    steps: &[f64],
    opts: &SearchOptions,
) -> Result<usize> {
    let mut count = 0;
    let mut half = steps.to_vec();
    let dim = bx.dim();
    let free: Vec<usize> = (0..dim).filter(|&i| bx.hi[i] > bx.lo[i]).collect();
    let axis_pass = |p: &mut Vec<f64>, fp: &mut f64, half: &[f64], count: &mut usize| -> Result<()> {
        for &i in &free {
            let w = half[i].max(opts.xtol);
            let a = (p[i] - w).max(bx.lo[i]);
            let b = (p[i] + w).min(bx.hi[i]);
            let mut q = p.clone();
            let hit = golden(
                |x| {
                    q[i] = x;
                    *count += 1;
                    f(&q)
                },
                a,
                b,
                opts.xtol,
                *fp,
            )?;
            if let Some((x, v)) = hit {
                p[i] = x;
                *fp = v;
            }
        }
        Ok(())
    };
    for _ in 0..opts.sweeps {
        axis_pass(p, fp, &half, &mut count)?;
        for h in half.iter_mut() {
            *h *= 0.5;
        }
    }
    if opts.sweeps == 0 || free.len() < 2 {
        return Ok(count);
    }
    for _ in 0..POLISH_SWEEPS {
        let (start, f0) = (p.clone(), *fp);
        axis_pass(p, fp, &half, &mut count)?;
        let dir: Vec<f64> = p.iter().zip(&start).map(|(a, b)| a - b).collect();
        if dir.iter().any(|&c| c != 0.0) {
            let at = |s: f64| -> Vec<f64> {
                let mut q: Vec<f64> = start.iter().zip(&dir).map(|(a, d)| a + s * d).collect();
                bx.clamp(&mut q);
                q
            };
            let len = dir.iter().map(|c| c * c).sum::<f64>().sqrt();
            let hit = golden(
                |s| {
                    count += 1;
                    f(&at(s))
                },
                0.0,
                4.0,
                opts.xtol / len,
                *fp,
            )?;
            if let Some((s, v)) = hit {
                *p = at(s);
                *fp = v;
            }
        }
        if *fp - f0 <= POLISH_GAIN * fp.abs() {
            break;
        }
    }
    Ok(count)
}

/// Accuracy a search evaluation is asked for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pass {
    /// Ranking grid points; only the ordering matters.
    Screen,
    /// Golden-section refinement.
    Refine,
}

fn refine_point<C: Fn(&[f64], Pass) -> Result<f64>>(
    coarse: &C,
    bx: &SearchBox,
    p: &mut Vec<f64>,
    fp: &mut f64,
    steps: &[f64],
    opts: &SearchOptions,
) -> Result<usize> {
    refine(&|q: &[f64]| coarse(q, Pass::Refine), bx, p, fp, steps, opts)
}

/// Grid search plus golden-section refinement.
///
/// `coarse` drives the search and may use loose tolerances, looser still for
/// [`Pass::Screen`]; `fine` is evaluated once at the final argmax and
/// supplies the reported value.
/// `extra_seeds` join the best grid points as refinement starts.
pub fn sup_search<C, F>(
    coarse: C,
    fine: F,
    bx: &SearchBox,
    opts: &SearchOptions,
    extra_seeds: &[Vec<f64>],
) -> Result<SupResult>
where
    C: Fn(&[f64], Pass) -> Result<f64> + Sync,
    F: Fn(&[f64]) -> Result<Estimate>,
{
    let n = axis_count(opts, bx.active());
    let grid = grid_points(bx, n);
    let values: Vec<f64> = grid.par_iter().map(|p| coarse(p, Pass::Screen)).collect::<Result<Vec<_>>>()?;
    let grid_count = grid.len();

    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let threshold = opts.refine_above.unwrap_or(f64::NEG_INFINITY);
    let mut points: Vec<(Vec<f64>, bool)> = order
        .iter()
        .take(opts.seeds.max(1))
        .enumerate()
        .filter(|&(rank, &k)| rank == 0 || values[k] > threshold)
        .map(|(_, &k)| (grid[k].clone(), values[k] > threshold))
        .collect();
    for s in extra_seeds {
        let mut p = s.clone();
        bx.clamp(&mut p);
        points.push((p, true));
    }
    let starts: Vec<(Vec<f64>, f64, bool)> = points
        .into_par_iter()
        .map(|(p, refine)| coarse(&p, Pass::Refine).map(|v| (p, v, refine)))
        .collect::<Result<Vec<_>>>()?;

    let steps: Vec<f64> =
        (0..bx.dim()).map(|i| if n > 1 { (bx.hi[i] - bx.lo[i]) / (n - 1) as f64 } else { bx.hi[i] - bx.lo[i] }).collect();
    let refined: Vec<(Vec<f64>, f64, usize)> = starts
        .into_par_iter()
        .map(|(mut p, mut fp, refine)| {
            let count = if refine { refine_point(&coarse, bx, &mut p, &mut fp, &steps, opts)? } else { 0 };
            Ok((p, fp, count))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = 0;
    for (k, r) in refined.iter().enumerate() {
        if r.1 > refined[best].1 {
            best = k;
        }
    }
    let refinements: usize = refined.iter().map(|r| r.2).sum();
    let arg = refined[best].0.clone();
    let est = fine(&arg)?;
    Ok(SupResult::from_estimate(est, arg, grid_count, refinements))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_counts_respect_cap() {
        let o = SearchOptions::default();
        assert_eq!(axis_count(&o, 1), 9);
        assert_eq!(axis_count(&o, 3), 9);
        assert_eq!(axis_count(&o, 4), 7);
        assert_eq!(axis_count(&o, 6), 3);
        assert_eq!(axis_count(&o, 0), 1);
    }

    #[test]
    fn finds_off_grid_maximum() {
        let f = |p: &[f64]| Ok(-(p[0] - 0.3137).powi(2) - 2.0 * (p[1] + 0.71).powi(2) + 1.0);
        let bx = SearchBox::new(vec![-2.0, -2.0], vec![2.0, 2.0]);
        let r = sup_search(|p, _| f(p), |p| Ok(Estimate::exact(f(p)?)), &bx, &SearchOptions::default(), &[]).unwrap();
        assert!((r.argmax[0] - 0.3137).abs() < 2e-4);
        assert!((r.argmax[1] + 0.71).abs() < 2e-4);
        assert!((r.value - 1.0).abs() < 1e-7);
        assert!(r.lower_bound_only);
    }

    #[test]
    fn degenerate_box_single_eval() {
        let bx = SearchBox::point(vec![1.0, 2.0]);
        let r = sup_search(|p, _| Ok(p[0] + p[1]), |p| Ok(Estimate::exact(p[0] + p[1])), &bx, &SearchOptions::default(), &[])
            .unwrap();
        assert_eq!(r.value, 3.0);
        assert_eq!(r.grid_points, 1);
    }
}
