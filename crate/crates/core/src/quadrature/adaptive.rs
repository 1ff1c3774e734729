//! Globally adaptive subdivision: always split the panel with the largest
//! error until the total error meets the tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rules::{genz_malik, gk15, gm_evals, GK15_EVALS};
use super::Estimate;

/// Stopping rule for one adaptive integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub max_evals: u64,
}

impl Tol {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, max_evals: 1_000_000 }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

struct Panel<T> {
    err: f64,
    id: u64,
    value: f64,
    data: T,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        // largest error first, older panel first on ties
        self.err.total_cmp(&o.err).then_with(|| o.id.cmp(&self.id))
    }
}

/// Sums panel values in creation order so the result does not depend on
/// heap layout.
fn finish<T>(panels: Vec<Panel<T>>, evals: u64, tol: &Tol) -> Estimate {
    let mut panels = panels;
    panels.sort_by_key(|p| p.id);
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    Estimate { value, err_bound: err, evals, converged: err <= tol.target(value) }
}

/// Adaptive GK15 over the consecutive panels `breaks[i]..breaks[i+1]`.
/// `f` returns `(value, error)` so nested integrals propagate their error.
pub fn adaptive_1d<F: FnMut(f64) -> (f64, f64)>(mut f: F, breaks: &[f64], tol: Tol) -> Estimate {
    let mut heap: BinaryHeap<Panel<(f64, f64)>> = BinaryHeap::new();
    let mut frozen = Vec::new();
    let mut evals = 0;
    let mut id = 0;
    let (mut total, mut total_err) = (0.0, 0.0);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(b > a) {
            continue;
        }
        let (v, e) = gk15(&mut f, a, b);
        evals += GK15_EVALS;
        total += v;
        total_err += e;
        heap.push(Panel { err: e, id, value: v, data: (a, b) });
        id += 1;
    }
    while total_err > tol.target(total) && evals + 2 * GK15_EVALS <= tol.max_evals {
        let Some(p) = heap.pop() else { break };
        let (a, b) = p.data;
        let m = 0.5 * (a + b);
        if !(m > a && m < b) || (b - a) <= 1e-13 * a.abs().max(b.abs()) {
            frozen.push(p);
            continue;
        }
        let (v1, e1) = gk15(&mut f, a, m);
        let (v2, e2) = gk15(&mut f, m, b);
        evals += 2 * GK15_EVALS;
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
        heap.push(Panel { err: e1, id, value: v1, data: (a, m) });
        heap.push(Panel { err: e2, id: id + 1, value: v2, data: (m, b) });
        id += 2;
        // resynchronise running sums now and then against drift
        if id % 512 == 0 {
            total = heap.iter().chain(frozen.iter()).map(|p| p.value).sum();
            total_err = heap.iter().chain(frozen.iter()).map(|p| p.err).sum();
        }
    }
    let mut all = heap.into_vec();
    all.extend(frozen);
    finish(all, evals, &tol)
}

/// Adaptive integral of a plain function over `[a, b]`.
pub fn integrate_1d<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tol) -> Estimate {
    adaptive_1d(|x| (f(x), 0.0), &[a, b], tol)
}

struct Cell {
    center: Vec<f64>,
    half: Vec<f64>,
    axis: usize,
}

/// Adaptive Genz-Malik cubature over the box `[lo, hi]` (dimension >= 2),
/// starting from `splits[i]` equal parts along axis `i`. For dimension 1 it
/// falls back to [`adaptive_1d`].
pub fn adaptive_cube<F: FnMut(&[f64]) -> (f64, f64)>(
    mut f: F,
    lo: &[f64],
    hi: &[f64],
    splits: &[usize],
    tol: Tol,
) -> Estimate {
    let n = lo.len();
    if n == 1 {
        let k = splits.first().copied().unwrap_or(1).max(1);
        let breaks: Vec<f64> =
            (0..=k).map(|i| lo[0] + (hi[0] - lo[0]) * i as f64 / k as f64).collect();
        let mut buf = [0.0];
        return adaptive_1d(
            |x| {
                buf[0] = x;
                f(&buf)
            },
            &breaks,
            tol,
        );
    }
    let per = gm_evals(n);
    let mut scratch = Vec::with_capacity(n);
    let mut heap: BinaryHeap<Panel<Cell>> = BinaryHeap::new();
    let mut frozen = Vec::new();
    let mut evals = 0;
    let mut id = 0u64;
    let (mut total, mut total_err) = (0.0, 0.0);

    // initial tensor partition
    let counts: Vec<usize> = (0..n).map(|i| splits.get(i).copied().unwrap_or(1).max(1)).collect();
    let cells: usize = counts.iter().product();
    for idx in 0..cells {
        let mut rem = idx;
        let mut center = vec![0.0; n];
        let mut half = vec![0.0; n];
        for i in 0..n {
            let k = rem % counts[i];
            rem /= counts[i];
            let w = (hi[i] - lo[i]) / counts[i] as f64;
            half[i] = 0.5 * w;
            center[i] = lo[i] + (k as f64 + 0.5) * w;
        }
        let r = genz_malik(&mut f, &center, &half, &mut scratch);
        evals += per;
        total += r.value;
        total_err += r.err;
        heap.push(Panel { err: r.err, id, value: r.value, data: Cell { center, half, axis: r.split_axis } });
        id += 1;
    }

    while total_err > tol.target(total) && evals + 2 * per <= tol.max_evals {
        let Some(p) = heap.pop() else { break };
        let Cell { center, half, axis } = p.data;
        if half[axis] <= 1e-13 * center[axis].abs().max(1e-300) {
            frozen.push(Panel { data: Cell { center, half, axis }, ..p });
            continue;
        }
        let mut half2 = half.clone();
        half2[axis] *= 0.5;
        for sign in [-1.0, 1.0] {
            let mut c2 = center.clone();
            c2[axis] += sign * half2[axis];
            let r = genz_malik(&mut f, &c2, &half2, &mut scratch);
            total += r.value;
            total_err += r.err;
            heap.push(Panel {
                err: r.err,
                id,
                value: r.value,
                data: Cell { center: c2, half: half2.clone(), axis: r.split_axis },
            });
            id += 1;
        }
        evals += 2 * per;
        total -= p.value;
        total_err -= p.err;
        if id % 512 == 0 {
            total = heap.iter().chain(frozen.iter()).map(|p| p.value).sum();
            total_err = heap.iter().chain(frozen.iter()).map(|p| p.err).sum();
        }
    }
    let mut all = heap.into_vec();
    all.extend(frozen);
    finish(all, evals, &tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_1d() {
        let e = integrate_1d(|x| (-x * x).exp(), -10.0, 10.0, Tol::new(1e-13, 1e-13));
        assert!((e.value - std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(e.converged);
    }

    #[test]
    fn endpoint_singularity_1d() {
        let e = integrate_1d(|x| 1.0 / x.sqrt(), 0.0, 1.0, Tol::new(1e-10, 1e-10));
        assert!((e.value - 2.0).abs() < 1e-8, "{:?}", e);
    }

    #[test]
    fn gaussian_2d_and_3d() {
        let tol = Tol::new(1e-11, 1e-11);
        let e = adaptive_cube(|x| ((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0), &[-8.0; 2], &[8.0; 2], &[2, 2], tol);
        assert!((e.value - std::f64::consts::PI).abs() < 1e-9, "{:?}", e);
        let e = adaptive_cube(|x| ((-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp(), 0.0), &[-7.0; 3], &[7.0; 3], &[1], tol);
        assert!((e.value - std::f64::consts::PI.powf(1.5)).abs() < 1e-8, "{:?}", e);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| ((x[0] * 3.0).sin() * (x[1] - 0.2).abs(), 0.0);
        let a = adaptive_cube(f, &[0.0, -1.0], &[2.0, 1.0], &[1, 1], Tol::new(1e-9, 1e-9));
        let b = adaptive_cube(f, &[0.0, -1.0], &[2.0, 1.0], &[1, 1], Tol::new(1e-9, 1e-9));
        assert_eq!(a, b);
    }
}
