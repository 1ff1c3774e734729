//! Integration domains built as intersections of simple sets.
//!
//! Every set knows how a ray `o + r d` (`r >= 0`, `|d| = 1`) meets it, which
//! is what the polar integrator needs: along any ray the domain is a short
//! union of parameter intervals.

use crate::point::{dist, dot};

/// At most this many disjoint intervals per ray.
const MAX_INTERVALS: usize = 4;

/// A small stack-allocated union of disjoint, sorted intervals in `[0, inf)`.
#[derive(Debug, Clone, Copy)]
pub struct Intervals {
    len: usize,
    data: [(f64, f64); MAX_INTERVALS],
}

impl Intervals {
    pub fn full() -> Self {
        let mut s = Self::empty();
        s.push(0.0, f64::INFINITY);
        s
    }

    pub fn empty() -> Self {
        Self { len: 0, data: [(0.0, 0.0); MAX_INTERVALS] }
    }

    fn single(a: f64, b: f64) -> Self {
        let mut s = Self::empty();
        s.push(a, b);
        s
    }

    fn push(&mut self, a: f64, b: f64) {
        let a = a.max(0.0);
        if b > a && self.len < MAX_INTERVALS {
            self.data[self.len] = (a, b);
            self.len += 1;
        }
    }

    pub fn as_slice(&self) -> &[(f64, f64)] {
        &self.data[..self.len]
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn total_len(&self) -> f64 {
        self.as_slice().iter().map(|(a, b)| b - a).sum()
    }

    pub fn intersect(&self, other: &Intervals) -> Intervals {
        let mut out = Intervals::empty();
        for &(a, b) in self.as_slice() {
            for &(c, d) in other.as_slice() {
                out.push(a.max(c), b.min(d));
            }
        }
        // inputs are sorted and disjoint, so the pairwise intersections are too
        // once sorted by their left ends
        out.data[..out.len].sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    pub fn clip(&self, r_max: f64) -> Intervals {
        self.intersect(&Intervals::single(0.0, r_max))
    }

    /// Maps `t` in `[0, 1]` to a point of the union, uniformly in length.
    pub fn map_unit(&self, t: f64) -> f64 {
        let total = self.total_len();
        let mut target = t * total;
        for &(a, b) in self.as_slice() {
            let w = b - a;
            if target <= w {
                return a + target;
            }
            target -= w;
        }
        self.as_slice().last().map(|p| p.1).unwrap_or(0.0)
    }
}

/// A basic set of R^d.
#[derive(Debug, Clone, PartialEq)]
pub enum Convex {
    /// `|z - center| <= radius`
    Ball { center: Vec<f64>, radius: f64 },
    /// `|z - center| >= radius` (not convex, meets a ray in up to two pieces)
    Exterior { center: Vec<f64>, radius: f64 },
    /// `lo <= z[axis] <= hi`
    Slab { axis: usize, lo: f64, hi: f64 },
    /// distance from the line `center + R e_axis` at most `radius`
    AxialCylinder { axis: usize, center: Vec<f64>, radius: f64 },
    /// `<normal, z> >= offset`
    HalfSpace { normal: Vec<f64>, offset: f64 },
}

impl Convex {
    pub fn contains(&self, z: &[f64]) -> bool {
        match self {
            Convex::Ball { center, radius } => dist(z, center) <= *radius,
            Convex::Exterior { center, radius } => dist(z, center) >= *radius,
            Convex::Slab { axis, lo, hi } => z[*axis] >= *lo && z[*axis] <= *hi,
            Convex::AxialCylinder { axis, center, radius } => {
                let mut s = 0.0;
                for (i, (zi, ci)) in z.iter().zip(center).enumerate() {
                    if i != *axis {
                        s += (zi - ci) * (zi - ci);
                    }
                }
                s <= radius * radius
            }
            Convex::HalfSpace { normal, offset } => dot(normal, z) >= *offset,
        }
    }

    pub fn ray(&self, o: &[f64], d: &[f64]) -> Intervals {
        match self {
            Convex::Ball { center, radius } => match sphere_roots(o, d, center, *radius) {
                Some((r1, r2)) => Intervals::single(r1, r2),
                None => Intervals::empty(),
            },
            Convex::Exterior { center, radius } => match sphere_roots(o, d, center, *radius) {
                Some((r1, r2)) => {
                    let mut s = Intervals::empty();
                    s.push(0.0, r1);
                    s.push(r2, f64::INFINITY);
                    s
                }
                None => Intervals::full(),
            },
            Convex::Slab { axis, lo, hi } => {
                let (oa, da) = (o[*axis], d[*axis]);
                if da.abs() < 1e-300 {
                    if oa >= *lo && oa <= *hi {
                        Intervals::full()
                    } else {
                        Intervals::empty()
                    }
                } else {
                    let r1 = (lo - oa) / da;
                    let r2 = (hi - oa) / da;
                    Intervals::single(r1.min(r2), r1.max(r2))
                }
            }
            Convex::AxialCylinder { axis, center, radius } => {
                let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
                for i in 0..o.len() {
                    if i == *axis {
                        continue;
                    }
                    let p = o[i] - center[i];
                    a += d[i] * d[i];
                    b += p * d[i];
                    c += p * p;
                }
                c -= radius * radius;
                if a < 1e-300 {
                    return if c <= 0.0 { Intervals::full() } else { Intervals::empty() };
                }
                let disc = b * b - a * c;
                if disc < 0.0 {
                    return Intervals::empty();
                }
                let sq = disc.sqrt();
                Intervals::single((-b - sq) / a, (-b + sq) / a)
            }
            Convex::HalfSpace { normal, offset } => {
                let nd = dot(normal, d);
                let gap = offset - dot(normal, o);
                if nd.abs() < 1e-300 {
                    if gap <= 0.0 {
                        Intervals::full()
                    } else {
                        Intervals::empty()
                    }
                } else if nd > 0.0 {
                    Intervals::single(gap / nd, f64::INFINITY)
                } else {
                    Intervals::single(0.0, gap / nd)
                }
            }
        }
    }

    /// The image under `z -> k z`.
    pub fn scaled(&self, k: f64) -> Convex {
        let sc = |v: &Vec<f64>| v.iter().map(|x| x * k).collect::<Vec<_>>();
        match self {
            Convex::Ball { center, radius } => Convex::Ball { center: sc(center), radius: radius * k },
            Convex::Exterior { center, radius } => {
                Convex::Exterior { center: sc(center), radius: radius * k }
            }
            Convex::Slab { axis, lo, hi } => Convex::Slab { axis: *axis, lo: lo * k, hi: hi * k },
            Convex::AxialCylinder { axis, center, radius } => {
                Convex::AxialCylinder { axis: *axis, center: sc(center), radius: radius * k }
            }
            Convex::HalfSpace { normal, offset } => {
                Convex::HalfSpace { normal: normal.clone(), offset: offset * k }
            }
        }
    }
}

fn sphere_roots(o: &[f64], d: &[f64], c: &[f64], radius: f64) -> Option<(f64, f64)> {
    let mut b = 0.0;
    let mut oc2 = 0.0;
    for i in 0..o.len() {
        let p = o[i] - c[i];
        b += p * d[i];
        oc2 += p * p;
    }
    let disc = b * b - (oc2 - radius * radius);
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    Some((-b - sq, -b + sq))
}

/// Intersection of basic sets; no parts means all of R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub dim: usize,
    pub parts: Vec<Convex>,
}

impl Region {
    pub fn whole(dim: usize) -> Self {
        Self { dim, parts: Vec::new() }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        Self { dim: center.len(), parts: vec![Convex::Ball { center, radius }] }
    }

    pub fn with(mut self, part: Convex) -> Self {
        self.parts.push(part);
        self
    }

    pub fn is_whole(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        self.parts.iter().all(|p| p.contains(z))
    }

    pub fn ray(&self, o: &[f64], d: &[f64]) -> Intervals {
        let mut acc = Intervals::full();
        for p in &self.parts {
            acc = acc.intersect(&p.ray(o, d));
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    pub fn scaled(&self, k: f64) -> Region {
        Region { dim: self.dim, parts: self.parts.iter().map(|p| p.scaled(k)).collect() }
    }

    /// A ball containing the region, if one can be read off its parts.
    pub fn bounding_ball(&self) -> Option<(Vec<f64>, f64)> {
        let mut best: Option<(Vec<f64>, f64)> = None;
        let mut consider = |c: Vec<f64>, r: f64| {
            if best.as_ref().map_or(true, |b| r < b.1) {
                best = Some((c, r));
            }
        };
        for p in &self.parts {
            if let Convex::Ball { center, radius } = p {
                consider(center.clone(), *radius);
            }
        }
        // a slab crossed with a cylinder along the same axis is a finite cylinder
        for p in &self.parts {
            if let Convex::AxialCylinder { axis, center, radius } = p {
                for q in &self.parts {
                    if let Convex::Slab { axis: sa, lo, hi } = q {
                        if sa == axis {
                            let mut c = center.clone();
                            c[*axis] = 0.5 * (lo + hi);
                            let half = 0.5 * (hi - lo);
                            consider(c, (half * half + radius * radius).sqrt());
                        }
                    }
                }
            }
        }
        best
    }

    /// `Some((axis, lo, hi, disk_center, disk_radius))` when the region is exactly a
    /// finite cylinder aligned with a coordinate axis.
    pub(crate) fn as_axial_cylinder(&self) -> Option<(usize, f64, f64, &[f64], f64)> {
        if self.parts.len() != 2 {
            return None;
        }
        match (&self.parts[0], &self.parts[1]) {
            (Convex::Slab { axis, lo, hi }, Convex::AxialCylinder { axis: a2, center, radius })
                if axis == a2 =>
            {
                Some((*axis, *lo, *hi, center.as_slice(), *radius))
            }
            _ => None,
        }
    }

    pub(crate) fn as_single_ball(&self) -> Option<(&[f64], f64)> {
        match self.parts.as_slice() {
            [Convex::Ball { center, radius }] => Some((center.as_slice(), *radius)),
            _ => None,
        }
    }
}

pub(crate) fn balls_disjoint(a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)) -> bool {
    dist(&a.0, &b.0) > a.1 + b.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::norm_sq;

    fn unit(v: &[f64]) -> Vec<f64> {
        let n = norm_sq(v).sqrt();
        v.iter().map(|x| x / n).collect()
    }

    #[test]
    fn ray_through_ball_center() {
        let r = Region::ball(vec![3.0, 0.0, 0.0], 1.0);
        let iv = r.ray(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]);
        assert_eq!(iv.as_slice(), &[(2.0, 4.0)]);
        assert!(r.ray(&[0.0, 0.0, 0.0], &[0.0, 1.0, 0.0]).is_empty());
    }

    #[test]
    fn exterior_from_inside_is_one_piece() {
        let r = Region::whole(2).with(Convex::Exterior { center: vec![0.0, 0.0], radius: 2.0 });
        let iv = r.ray(&[0.0, 0.0], &unit(&[1.0, 1.0]));
        assert_eq!(iv.len, 1);
        assert!((iv.as_slice()[0].0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exterior_from_outside_splits() {
        let r = Region::whole(2).with(Convex::Exterior { center: vec![5.0, 0.0], radius: 1.0 });
        let iv = r.ray(&[0.0, 0.0], &[1.0, 0.0]);
        assert_eq!(iv.as_slice(), &[(0.0, 4.0), (6.0, f64::INFINITY)]);
    }

    #[test]
    fn finite_cylinder_ray_and_bound() {
        let r = Region::whole(3)
            .with(Convex::Slab { axis: 0, lo: 1.0, hi: 1.25 })
            .with(Convex::AxialCylinder { axis: 0, center: vec![0.0; 3], radius: 0.2 });
        let iv = r.ray(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]);
        assert_eq!(iv.as_slice(), &[(1.0, 1.25)]);
        let (c, rad) = r.bounding_ball().unwrap();
        assert!((c[0] - 1.125).abs() < 1e-15);
        assert!((rad - (0.125f64.powi(2) + 0.04).sqrt()).abs() < 1e-15);
        assert!(r.contains(&[1.1, 0.1, 0.1]));
        assert!(!r.contains(&[1.1, 0.2, 0.1]));
    }

    #[test]
    fn halfspace_ray() {
        let h = Convex::HalfSpace { normal: vec![1.0, 0.0], offset: 0.0 };
        assert_eq!(h.ray(&[-1.0, 0.0], &[1.0, 0.0]).as_slice(), &[(1.0, f64::INFINITY)]);
        assert!(h.ray(&[-1.0, 0.0], &[-1.0, 0.0]).is_empty());
    }

    #[test]
    fn unit_map_covers_union() {
        let mut s = Intervals::empty();
        s.push(0.0, 1.0);
        s.push(3.0, 4.0);
        assert_eq!(s.map_unit(0.25), 0.5);
        assert_eq!(s.map_unit(0.75), 3.5);
        assert_eq!(s.total_len(), 2.0);
    }
}
