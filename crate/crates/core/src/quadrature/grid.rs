//! Brute-force midpoint rule on a tensor grid, used as an independent check
//! of the adaptive engine.

use super::Estimate;

fn midpoint<F: FnMut(&[f64]) -> f64>(f: &mut F, lo: &[f64], hi: &[f64], n: usize) -> f64 {
    let d = lo.len();
    let h: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| (b - a) / n as f64).collect();
    let cell: f64 = h.iter().product();
    let mut idx = vec![0usize; d];
    let mut z = vec![0.0; d];
    let mut sum = 0.0;
    loop {
        for k in 0..d {
            z[k] = lo[k] + (idx[k] as f64 + 0.5) * h[k];
        }
        sum += f(&z);
        let mut k = 0;
        loop {
            if k == d {
                return sum * cell;
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Midpoint sum with `resolution` cells per axis over the box `[lo, hi]`.
/// The error estimate is the difference from the half-resolution sum.
pub fn grid_oracle_integrate<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    lo: &[f64],
    hi: &[f64],
    resolution: usize,
) -> Estimate {
    let n = resolution.max(1);
    let fine = midpoint(&mut f, lo, hi, n);
    let err = if n >= 2 { (fine - midpoint(&mut f, lo, hi, n / 2)).abs() } else { f64::INFINITY };
    let evals = (n as u64).pow(lo.len() as u32) + (n as u64 / 2).pow(lo.len() as u32);
    Estimate { value: fine, err_bound: err, evals, converged: err.is_finite() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_square() {
        let e = grid_oracle_integrate(|_| 1.0, &[0.0, 0.0], &[1.0, 1.0], 16);
        assert!((e.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_normalization() {
        let g = |z: &[f64]| (-z[0] * z[0] / 4.0).exp() / (4.0 * std::f64::consts::PI).sqrt();
        let e = grid_oracle_integrate(g, &[-8.0], &[8.0], 2048);
        assert!((e.value - 1.0).abs() < 1e-6);
    }
}
