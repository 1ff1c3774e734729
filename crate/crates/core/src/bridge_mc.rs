//! Brownian-bridge Monte Carlo for `S(V, t, x, y)` and the Feynman-Kac ratio
//! `G / g = E[exp(int_0^t V(b_s) ds)]`.
//!
//! The process has generator `Delta`, so its coordinates have variance `2s`
//! and the bridge from `x` to `y` at time `s` has variance `2 s (t - s) / t`.
//! Every path draws from its own ChaCha8 stream selected by the path index,
//! and paths are reduced in fixed chunks in index order, so results do not
//! depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};
use crate::point::SpacePoint;
use crate::potential::Potential;

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeConfig {
    pub paths: u64,
    pub steps: usize,
    pub seed: u64,
}

impl Default for BridgeConfig {
    fn default() -> Self {
        Self { paths: 100_000, steps: 1024, seed: 0 }
    }
}

impl BridgeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths == 0 {
            return Err(domain("paths must be at least 1"));
        }
        if self.steps < 2 {
            return Err(domain("steps must be at least 2"));
        }
        Ok(())
    }
}

/// Sample mean with its standard error `sd / sqrt(paths)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub paths: u64,
}

/// The stream for path `index`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("time must be finite and positive, got {t}")))
    }
}

/// Fills `path` (length `(steps + 1) * d`) with a bridge from `x` to `y`
/// at the times `k t / steps`.
fn fill_bridge<R: Rng>(t: f64, x: &[f64], y: &[f64], steps: usize, rng: &mut R, path: &mut [f64]) {
    let d = x.len();
    let h = t / steps as f64;
    path[..d].copy_from_slice(x);
    for k in 0..steps - 1 {
        let rem = t - k as f64 * h;
        let frac = h / rem;
        let sd = (2.0 * h * (rem - h) / rem).sqrt();
        let (prev, next) = path.split_at_mut((k + 1) * d);
        let cur = &prev[k * d..];
        for i in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            next[i] = cur[i] + frac * (y[i] - cur[i]) + sd * z;
        }
    }
    path[steps * d..].copy_from_slice(y);
}

/// One pinned path: `steps + 1` points with the first equal to `x` and the
/// last equal to `y`.
pub fn sample_bridge<R: Rng>(t: f64, x: &SpacePoint, y: &SpacePoint, steps: usize, rng: &mut R) -> Result<Vec<SpacePoint>> {
    check_t(t)?;
    check_dim(x.dim(), y.dim())?;
    if steps < 2 {
        return Err(domain("steps must be at least 2"));
    }
    let d = x.dim();
    let mut buf = vec![0.0; (steps + 1) * d];
    fill_bridge(t, x.coords(), y.coords(), steps, rng, &mut buf);
    Ok(buf.chunks(d).map(|c| SpacePoint::from(c)).collect())
}

/// Running mean and sum of squared deviations.
#[derive(Clone, Copy)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn new() -> Self {
        Self { n: 0, mean: 0.0, m2: 0.0 }
    }

    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let delta = o.mean - self.mean;
        let mean = self.mean + delta * (o.n as f64 / n as f64);
        let m2 = self.m2 + o.m2 + delta * delta * (self.n as f64 * o.n as f64 / n as f64);
        Moments { n, mean, m2 }
    }

    fn estimate(&self) -> MCEstimate {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        MCEstimate { mean: self.mean, stderr: (var / self.n as f64).sqrt(), paths: self.n }
    }
}

/// Averages `score(path)` over bridges, deterministically in the seed.
fn bridge_average<F>(t: f64, x: &[f64], y: &[f64], cfg: &BridgeConfig, score: F) -> MCEstimate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = x.len();
    let chunks = cfg.paths.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = Moments::new();
            let mut path = vec![0.0; (cfg.steps + 1) * d];
            let end = ((c + 1) * CHUNK).min(cfg.paths);
            for i in c * CHUNK..end {
                let mut rng = path_rng(cfg.seed, i);
                fill_bridge(t, x, y, cfg.steps, &mut rng, &mut path);
                m.push(score(&path));
            }
            m
        })
        .collect();
    parts.into_iter().fold(Moments::new(), Moments::merge).estimate()
}

/// Trapezoid rule for `int_0^t f(b_s) ds` along a sampled path.
fn trapezoid<F: Fn(&[f64]) -> f64>(path: &[f64], d: usize, h: f64, f: F) -> f64 {
    let pts: Vec<&[f64]> = path.chunks(d).collect();
    let n = pts.len();
    let mut s = 0.5 * (f(pts[0]) + f(pts[n - 1]));
    for p in &pts[1..n - 1] {
        s += f(p);
    }
    s * h
}

/// Monte Carlo estimate of `S(V, t, x, y) = E[int_0^t |V(b_s)| ds]`.
pub fn s_bridge_estimate(v: &Potential, t: f64, x: &SpacePoint, y: &SpacePoint, cfg: &BridgeConfig) -> Result<MCEstimate> {
    check_t(t)?;
    cfg.validate()?;
    check_dim(v.dim(), x.dim())?;
    check_dim(v.dim(), y.dim())?;
    let d = v.dim();
    let h = t / cfg.steps as f64;
    Ok(bridge_average(t, x.coords(), y.coords(), cfg, |p| trapezoid(p, d, h, |z| v.eval_slice(z).abs())))
}

/// Monte Carlo estimate of `G(t, x, y) / g(t, x, y) = E[exp(int_0^t V(b_s) ds)]`
/// for potentials with a structural bound on `|V|`.
pub fn feynman_kac_ratio(v: &Potential, t: f64, x: &SpacePoint, y: &SpacePoint, cfg: &BridgeConfig) -> Result<MCEstimate> {
    check_t(t)?;
    cfg.validate()?;
    check_dim(v.dim(), x.dim())?;
    check_dim(v.dim(), y.dim())?;
    if v.sup_bound().is_none() || v.has_cylinder_family() {
        return Err(Error::Unbounded("the Feynman-Kac ratio needs a uniformly bounded potential".into()));
    }
    let d = v.dim();
    let h = t / cfg.steps as f64;
    Ok(bridge_average(t, x.coords(), y.coords(), cfg, |p| trapezoid(p, d, h, |z| v.eval_slice(z)).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{cylinder_potential, parse};

    fn sp(v: &[f64]) -> SpacePoint {
        SpacePoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn endpoints_are_pinned() {
        let mut rng = path_rng(7, 3);
        let x = sp(&[0.5, -1.0]);
        let y = sp(&[2.0, 0.25]);
        for _ in 0..20 {
            let p = sample_bridge(1.5, &x, &y, 16, &mut rng).unwrap();
            assert_eq!(p.len(), 17);
            assert_eq!(p[0], x);
            assert_eq!(p[16], y);
        }
    }

    #[test]
    fn midpoint_law() {
        // variance 2 s (t - s) / t = t / 2 at s = t / 2
        let t = 0.8;
        let n = 100_000u64;
        let mut m = Moments::new();
        let mut path = vec![0.0; 9];
        for i in 0..n {
            let mut rng = path_rng(11, i);
            fill_bridge(t, &[0.0], &[0.0], 8, &mut rng, &mut path);
            m.push(path[4]);
        }
        let var = m.m2 / (n - 1) as f64;
        let se_mean = (var / n as f64).sqrt();
        assert!(m.mean.abs() < 4.0 * se_mean);
        let se_var = var * (2.0 / (n - 1) as f64).sqrt();
        assert!((var - t / 2.0).abs() < 4.0 * se_var, "{var}");
    }

    #[test]
    fn time_reversal() {
        // mean of the path at s from x to y equals that at t - s from y to x
        let cfg = BridgeConfig { paths: 20_000, steps: 8, seed: 5 };
        let x = [1.0];
        let y = [-0.5];
        let fwd = bridge_average(1.0, &x, &y, &cfg, |p| p[2]);
        let bwd = bridge_average(1.0, &y, &x, &cfg, |p| p[6]);
        assert!((fwd.mean - bwd.mean).abs() < 4.0 * (fwd.stderr + bwd.stderr));
        assert!((fwd.mean - 0.625).abs() < 4.0 * fwd.stderr);
    }

    #[test]
    fn deterministic_and_constant_cases() {
        let cfg = BridgeConfig { paths: 3000, steps: 64, seed: 1 };
        let v = parse("ball:1,1", 1).unwrap();
        let o = sp(&[0.0]);
        let a = s_bridge_estimate(&v, 1.0, &o, &o, &cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| s_bridge_estimate(&v, 1.0, &o, &o, &cfg).unwrap());
        assert_eq!(a, b);
        let c = Potential::constant(1, 1.0).unwrap();
        let e = s_bridge_estimate(&c, 0.5, &o, &o, &cfg).unwrap();
        assert!((e.mean - 0.5).abs() < 1e-12);
        assert_eq!(e.stderr, 0.0);
        let f = feynman_kac_ratio(&Potential::constant(1, 0.3).unwrap(), 2.0, &o, &o, &cfg).unwrap();
        assert!((f.mean - 0.6f64.exp()).abs() < 1e-12);
        let z = feynman_kac_ratio(&Potential::zero(1), 2.0, &o, &o, &cfg).unwrap();
        assert_eq!(z.mean, 1.0);
    }

    #[test]
    fn unbounded_is_refused() {
        let v = cylinder_potential(1).unwrap();
        let o = sp(&[0.0; 3]);
        let cfg = BridgeConfig { paths: 10, steps: 4, seed: 0 };
        assert!(matches!(feynman_kac_ratio(&v, 1.0, &o, &o, &cfg), Err(Error::Unbounded(_))));
        assert!(s_bridge_estimate(&v, 1.0, &o, &o, &cfg).is_ok());
    }
}
