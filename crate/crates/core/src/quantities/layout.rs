//! Search parametrisations that use the symmetries of a potential.
//!
//! A radial potential makes every two-point functional invariant under
//! rotations about the origin, so the first point can be put on `e_1` and
//! the second in the `(e_1, e_2)` half-plane. A potential symmetric about a
//! coordinate axis allows the first point in a half-plane through that
//! axis. Translation-invariant potentials need no search at all.

use super::search::SearchBox;
use crate::potential::{Node, Potential};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Symmetry {
    Invariant,
    Radial,
    Axial(usize),
    /// Both points on the axis; see [`gaussian_reduction`].
    OnAxis(usize),
    General,
}

fn node_symmetry(n: &Node, dim: usize) -> Symmetry {
    use Symmetry::*;
    match n {
        Node::Zero | Node::Constant(_) => Invariant,
        Node::BallIndicator { center, .. } => {
            let nz: Vec<usize> = (0..dim).filter(|&i| center[i] != 0.0).collect();
            match nz.len() {
                0 => Radial,
                1 if dim >= 2 => Axial(nz[0]),
                _ => General,
            }
        }
        Node::Cylinder3(_) => Axial(0),
        Node::Dilate(_, inner) | Node::Truncate(_, inner) => match node_symmetry(inner, dim) {
            Invariant => Radial,
            s => s,
        },
        Node::Scale(_, inner) | Node::Negate(inner) => node_symmetry(inner, dim),
        Node::Sum(terms) | Node::Series { terms, .. } => {
            let mut acc = Invariant;
            for t in terms {
                acc = combine(acc, node_symmetry(t, dim));
            }
            acc
        }
    }
}

fn combine(a: Symmetry, b: Symmetry) -> Symmetry {
    use Symmetry::*;
    match (a, b) {
        (Invariant, s) | (s, Invariant) => s,
        (Radial, Radial) => Radial,
        (Radial, Axial(k)) | (Axial(k), Radial) => Axial(k),
        (Axial(k), Axial(j)) if k == j => Axial(k),
        _ => General,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Sign {
    Pos,
    Neg,
    Mixed,
}

/// Sign of the node, and whether every cross-section of `|V|` orthogonal to
/// the symmetry axis (or every level set, in the radial case) is a centred
/// disk or ball.
fn unimodal(n: &Node) -> Option<Sign> {
    let sign_of = |a: f64| if a >= 0.0 { Sign::Pos } else { Sign::Neg };
    match n {
        Node::Zero => Some(Sign::Pos),
        Node::Constant(a) => Some(sign_of(*a)),
        Node::BallIndicator { amp, .. } => Some(sign_of(*amp)),
        Node::Cylinder3(_) => Some(Sign::Pos),
        Node::Dilate(_, inner) | Node::Truncate(_, inner) => unimodal(inner),
        Node::Scale(c, inner) => {
            let s = unimodal(inner)?;
            Some(if *c >= 0.0 { s } else { flip(s) })
        }
        Node::Negate(inner) => unimodal(inner).map(flip),
        Node::Sum(terms) | Node::Series { terms, .. } => {
            let mut acc: Option<Sign> = None;
            for t in terms {
                let s = unimodal(t)?;
                acc = match acc {
                    None => Some(s),
                    Some(a) if a == s => Some(a),
                    _ => Some(Sign::Mixed),
                };
            }
            match acc {
                Some(Sign::Mixed) => None,
                a => Some(a.unwrap_or(Sign::Pos)),
            }
        }
    }
}

fn flip(s: Sign) -> Sign {
    match s {
        Sign::Pos => Sign::Neg,
        Sign::Neg => Sign::Pos,
        Sign::Mixed => Sign::Mixed,
    }
}

/// Reduction valid for functionals of the form `int w(s) Phi(c(s), sigma(s)) ds`
/// with centres affine in the searched points.
///
/// By Anderson's inequality the Gaussian mass of a symmetric function with
/// convex level sets is largest when the Gaussian is centred on its centre
/// of symmetry. For radial unimodal `|V|` every centre should sit at the
/// origin, so all points are zero; for axial ones only the components along
/// the axis remain.
pub(crate) fn gaussian_reduction(v: &Potential) -> Symmetry {
    let sym = symmetry(v);
    match (sym, unimodal(v.node())) {
        (Symmetry::Radial, Some(_)) => Symmetry::Invariant,
        (Symmetry::Axial(k), Some(_)) => Symmetry::OnAxis(k),
        _ => sym,
    }
}

pub(crate) fn symmetry(v: &Potential) -> Symmetry {
    if v.is_translation_invariant() {
        return Symmetry::Invariant;
    }
    node_symmetry(v.node(), v.dim())
}

/// Maps search parameters to one point `u` (and optionally a second vector
/// `w`). `u` ranges over the ball `(c1, r1)`, `w` over `(c2, r2)`.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    dim: usize,
    sym: Symmetry,
    c1: Vec<f64>,
    r1: f64,
    second: Option<(Vec<f64>, f64)>,
}

impl Layout {
    pub(crate) fn new(dim: usize, sym: Symmetry, c1: Vec<f64>, r1: f64, second: Option<(Vec<f64>, f64)>) -> Self {
        // the reduced forms need the centres at the origin or on the axis
        let onto_axis = |c: Vec<f64>| match sym {
            Symmetry::Radial => vec![0.0; dim],
            Symmetry::Axial(k) | Symmetry::OnAxis(k) => (0..dim).map(|i| if i == k { c[i] } else { 0.0 }).collect(),
            _ => c,
        };
        let c1 = onto_axis(c1);
        let second = second.map(|(c, r)| (onto_axis(c), r));
        Self { dim, sym, c1, r1, second }
    }

    fn axial_perp(&self, k: usize) -> usize {
        (k + 1) % self.dim
    }

    pub(crate) fn search_box(&self) -> SearchBox {
        let d = self.dim;
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        let mut push = |a: f64, b: f64| {
            lo.push(a);
            hi.push(b);
        };
        match self.sym {
            Symmetry::Invariant => {}
            Symmetry::Radial => {
                push(0.0, self.r1);
                if let Some((_, r2)) = &self.second {
                    push(-r2, *r2);
                    if d >= 2 {
                        push(0.0, *r2);
                    }
                }
            }
            Symmetry::Axial(k) => {
                push(self.c1[k] - self.r1, self.c1[k] + self.r1);
                push(0.0, self.r1);
                if let Some((c2, r2)) = &self.second {
                    for i in 0..d {
                        let last_perp = d == 3 && i != k && i != self.axial_perp(k);
                        if last_perp {
                            push(c2[i], c2[i] + r2);
                        } else {
                            push(c2[i] - r2, c2[i] + r2);
                        }
                    }
                }
            }
            Symmetry::OnAxis(k) => {
                push(self.c1[k] - self.r1, self.c1[k] + self.r1);
                if let Some((c2, r2)) = &self.second {
                    push(c2[k] - r2, c2[k] + r2);
                }
            }
            Symmetry::General => {
                for i in 0..d {
                    push(self.c1[i] - self.r1, self.c1[i] + self.r1);
                }
                if let Some((c2, r2)) = &self.second {
                    for i in 0..d {
                        push(c2[i] - r2, c2[i] + r2);
                    }
                }
            }
        }
        SearchBox::new(lo, hi)
    }

    pub(crate) fn map(&self, p: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim;
        let mut u = vec![0.0; d];
        let mut w = self.second.as_ref().map(|(c, _)| c.clone()).unwrap_or_default();
        match self.sym {
            Symmetry::Invariant => u.copy_from_slice(&self.c1),
            Symmetry::Radial => {
                u[0] = p[0];
                if self.second.is_some() {
                    w.iter_mut().for_each(|v| *v = 0.0);
                    w[0] = p[1];
                    if d >= 2 {
                        w[1] = p[2];
                    }
                }
            }
            Symmetry::Axial(k) => {
                u.copy_from_slice(&self.c1);
                u[k] = p[0];
                u[self.axial_perp(k)] = p[1];
                if self.second.is_some() {
                    w.copy_from_slice(&p[2..2 + d]);
                }
            }
            Symmetry::OnAxis(k) => {
                u.copy_from_slice(&self.c1);
                u[k] = p[0];
                if self.second.is_some() {
                    w[k] = p[1];
                }
            }
            Symmetry::General => {
                u.copy_from_slice(&p[..d]);
                if self.second.is_some() {
                    w.copy_from_slice(&p[d..2 * d]);
                }
            }
        }
        (u, w)
    }

    /// Parameters reproducing the given points, for seeding. Only exact for
    /// points already in reduced position.
    pub(crate) fn unmap(&self, u: &[f64], w: &[f64]) -> Vec<f64> {
        let d = self.dim;
        match self.sym {
            Symmetry::Invariant => Vec::new(),
            Symmetry::Radial => {
                let mut p = vec![u[0].abs()];
                if self.second.is_some() {
                    let s = if u[0] < 0.0 { -1.0 } else { 1.0 };
                    p.push(s * w[0]);
                    if d >= 2 {
                        p.push(w[1].abs());
                    }
                }
                p
            }
            Symmetry::Axial(k) => {
                let mut p = vec![u[k], u[self.axial_perp(k)].abs()];
                if self.second.is_some() {
                    p.extend_from_slice(&w[..d]);
                    if d == 3 {
                        let j = 3 - k - self.axial_perp(k);
                        p[2 + j] = p[2 + j].abs();
                    }
                }
                p
            }
            Symmetry::OnAxis(k) => {
                let mut p = vec![u[k]];
                if self.second.is_some() {
                    p.push(w[k]);
                }
                p
            }
            Symmetry::General => {
                let mut p = u.to_vec();
                if self.second.is_some() {
                    p.extend_from_slice(w);
                }
                p
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{cylinder_potential, parse};

    #[test]
    fn detects_symmetries() {
        assert_eq!(symmetry(&parse("const:2", 3).unwrap()), Symmetry::Invariant);
        assert_eq!(symmetry(&parse("ball:1,1", 3).unwrap()), Symmetry::Radial);
        assert_eq!(symmetry(&parse("dilate:4(ball:1,1)", 2).unwrap()), Symmetry::Radial);
        assert_eq!(symmetry(&parse("ball:1,1,0,2", 2).unwrap()), Symmetry::Axial(1));
        assert_eq!(symmetry(&cylinder_potential(3).unwrap()), Symmetry::Axial(0));
        assert_eq!(symmetry(&parse("ball:1,1,1,2", 2).unwrap()), Symmetry::General);
    }

    #[test]
    fn gaussian_reductions() {
        assert_eq!(gaussian_reduction(&parse("dilate:4(ball:1,2)", 3).unwrap()), Symmetry::Invariant);
        assert_eq!(gaussian_reduction(&cylinder_potential(2).unwrap()), Symmetry::OnAxis(0));
        assert_eq!(gaussian_reduction(&parse("sum(ball:2,1;ball:1,-3)", 2).unwrap()), Symmetry::Radial);
        assert_eq!(gaussian_reduction(&parse("sum(ball:2,1;ball:1,3)", 2).unwrap()), Symmetry::Invariant);
    }

    #[test]
    fn map_unmap_roundtrip() {
        let l = Layout::new(3, Symmetry::Axial(0), vec![2.0, 0.0, 0.0], 3.0, Some((vec![0.0; 3], 5.0)));
        let bx = l.search_box();
        assert_eq!(bx.dim(), 5);
        let p = vec![1.5, 0.5, -1.0, 2.0, 0.25];
        let (u, w) = l.map(&p);
        assert_eq!(u, vec![1.5, 0.5, 0.0]);
        assert_eq!(w, vec![-1.0, 2.0, 0.25]);
        assert_eq!(l.unmap(&u, &w), p);
    }
}
