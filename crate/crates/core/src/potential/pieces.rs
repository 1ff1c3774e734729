use std::sync::Arc;

use super::{f_profile_unchecked, Node, Potential};
use crate::region::{balls_disjoint, Convex, Region};

/// Amplitude of a potential on one piece.
#[derive(Debug, Clone, PartialEq)]
pub enum Amp {
    Const(f64),
    /// `factor * f(scale * z[axis])`, the cylinder profile.
    Profile { factor: f64, axis: usize, scale: f64 },
    /// Fallback: evaluate the whole tree pointwise.
    Pointwise(Arc<Potential>),
}

impl Amp {
    fn scaled(&self, c: f64) -> Amp {
        match self {
            Amp::Const(a) => Amp::Const(a * c),
            Amp::Profile { factor, axis, scale } => {
                Amp::Profile { factor: factor * c, axis: *axis, scale: *scale }
            }
            Amp::Pointwise(p) => Amp::Pointwise(p.clone()),
        }
    }

    /// Signed amplitude at `z`, assuming `z` lies in the piece.
    #[inline]
    pub fn value(&self, z: &[f64]) -> f64 {
        match self {
            Amp::Const(a) => *a,
            Amp::Profile { factor, axis, scale } => factor * f_profile_unchecked(scale * z[*axis]),
            Amp::Pointwise(p) => p.eval_slice(z),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Amp::Const(a) => Some(*a),
            _ => None,
        }
    }
}

/// `amp * 1_region`. The pieces of one decomposition have disjoint regions.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub region: Region,
    pub amp: Amp,
}

impl Piece {
    pub fn bounding_ball(&self) -> Option<(Vec<f64>, f64)> {
        self.region.bounding_ball()
    }
}

pub(super) fn decompose(node: &Node, dim: usize) -> Option<Vec<Piece>> {
    let out = match node {
        Node::Zero => Vec::new(),
        Node::Constant(a) => {
            if *a == 0.0 {
                Vec::new()
            } else {
                vec![Piece { region: Region::whole(dim), amp: Amp::Const(*a) }]
            }
        }
        Node::BallIndicator { center, radius, amp } => {
            if *amp == 0.0 {
                Vec::new()
            } else {
                vec![Piece { region: Region::ball(center.clone(), *radius), amp: Amp::Const(*amp) }]
            }
        }
        Node::Cylinder3(n) => {
            let scale = 25.0 * *n as f64;
            (1..=*n)
                .map(|k| {
                    let k = k as f64;
                    Piece {
                        region: Region::whole(3)
                            .with(Convex::Slab { axis: 0, lo: k, hi: k + 0.25 })
                            .with(Convex::AxialCylinder {
                                axis: 0,
                                center: vec![0.0; 3],
                                radius: (k / scale).sqrt(),
                            }),
                        amp: Amp::Profile { factor: 1.0, axis: 0, scale: 1.0 / scale },
                    }
                })
                .collect()
        }
        Node::Dilate(s, inner) => {
            let rs = s.sqrt();
            let mut out = Vec::new();
            for p in decompose(inner, dim)? {
                let amp = match p.amp {
                    Amp::Const(a) => Amp::Const(s * a),
                    Amp::Profile { factor, axis, scale } => {
                        Amp::Profile { factor: s * factor, axis, scale: scale * rs }
                    }
                    Amp::Pointwise(_) => return None,
                };
                out.push(Piece { region: p.region.scaled(1.0 / rs), amp });
            }
            out
        }
        Node::Truncate(r, inner) => decompose(inner, dim)?
            .into_iter()
            .map(|p| Piece {
                region: p.region.with(Convex::Ball { center: vec![0.0; dim], radius: *r }),
                amp: p.amp,
            })
            .collect(),
        Node::Scale(c, inner) => {
            if *c == 0.0 {
                Vec::new()
            } else {
                decompose(inner, dim)?.into_iter().map(|p| scale_piece(p, *c)).collect()
            }
        }
        Node::Negate(inner) => {
            decompose(inner, dim)?.into_iter().map(|p| scale_piece(p, -1.0)).collect()
        }
        Node::Sum(terms) => {
            let groups: Option<Vec<Vec<Piece>>> = terms.iter().map(|t| decompose(t, dim)).collect();
            merge_disjoint(groups?)?
        }
        Node::Series { weights, terms, truncation_len } => {
            let mut groups = Vec::new();
            for (w, t) in weights.iter().zip(terms).take(*truncation_len) {
                groups.push(decompose(t, dim)?.into_iter().map(|p| scale_piece(p, *w)).collect());
            }
            merge_disjoint(groups)?
        }
    };
    Some(out)
}

fn scale_piece(p: Piece, c: f64) -> Piece {
    Piece { region: p.region, amp: p.amp.scaled(c) }
}

/// Joins groups of internally disjoint pieces. Pieces of different groups
/// must have disjoint bounding balls, or identical regions with constant
/// amplitudes (which merge).
fn merge_disjoint(groups: Vec<Vec<Piece>>) -> Option<Vec<Piece>> {
    let mut out: Vec<Piece> = Vec::new();
    let mut group_of: Vec<usize> = Vec::new();
    for (g, group) in groups.into_iter().enumerate() {
        for p in group {
            let mut merged = false;
            for (i, q) in out.iter_mut().enumerate() {
                if group_of[i] == g {
                    continue;
                }
                if q.region == p.region {
                    match (&q.amp, &p.amp) {
                        (Amp::Const(a), Amp::Const(b)) => {
                            q.amp = Amp::Const(a + b);
                            merged = true;
                            break;
                        }
                        _ => return None,
                    }
                }
                match (q.bounding_ball(), p.bounding_ball()) {
                    (Some(a), Some(b)) if balls_disjoint(&a, &b) => {}
                    _ => return None,
                }
            }
            if !merged {
                out.push(p);
                group_of.push(g);
            }
        }
    }
    out.retain(|p| p.amp.as_const() != Some(0.0));
    Some(out)
}

/// Pieces for integration: the exact decomposition when there is one,
/// otherwise a single pointwise piece over the support ball (or all of R^d).
pub(crate) fn integration_pieces(v: &Potential) -> Vec<Piece> {
    if let Some(p) = v.pieces() {
        return p;
    }
    let region = match v.support_bound() {
        Some((c, r)) => Region::ball(c.into_vec(), r),
        None => Region::whole(v.dim()),
    };
    vec![Piece { region, amp: Amp::Pointwise(Arc::new(v.clone())) }]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::SpacePoint;
    use crate::potential::cylinder_potential;

    #[test]
    fn cylinders_decompose() {
        let v = cylinder_potential(10).unwrap();
        let pieces = v.pieces().unwrap();
        assert_eq!(pieces.len(), 10);
        let z = [3.1, 0.05, 0.0];
        let inside: Vec<_> = pieces.iter().filter(|p| p.region.contains(&z)).collect();
        assert_eq!(inside.len(), 1);
        assert_eq!(inside[0].amp.value(&z), v.eval_slice(&z));
    }

    #[test]
    fn dilated_pieces_match_tree() {
        let v = Potential::dilate(0.25, cylinder_potential(2).unwrap()).unwrap();
        let pieces = v.pieces().unwrap();
        for z in [[2.2, 0.1, 0.0], [4.1, 0.3, 0.1], [4.4, 0.0, 0.0], [9.0, 0.0, 0.0]] {
            let from_pieces: f64 =
                pieces.iter().filter(|p| p.region.contains(&z)).map(|p| p.amp.value(&z)).sum();
            assert!((from_pieces - v.eval_slice(&z)).abs() < 1e-12, "{z:?}");
        }
    }

    #[test]
    fn overlapping_sum_falls_back() {
        let v = Potential::sum(vec![
            Potential::constant(1, 1.0).unwrap(),
            Potential::centered_ball(1, 1.0, 1.0).unwrap(),
        ])
        .unwrap();
        assert!(v.pieces().is_none());
        let p = integration_pieces(&v);
        assert_eq!(p.len(), 1);
        assert!(matches!(p[0].amp, Amp::Pointwise(_)));
    }

    #[test]
    fn equal_balls_merge() {
        let b = Potential::centered_ball(2, 1.0, 1.0).unwrap();
        let v = Potential::sum(vec![b.clone(), Potential::negate(b)]).unwrap();
        assert!(v.pieces().unwrap().is_empty());
        let far = Potential::ball(SpacePoint::new(vec![5.0, 0.0]).unwrap(), 1.0, 2.0).unwrap();
        let v = Potential::sum(vec![Potential::centered_ball(2, 1.0, 1.0).unwrap(), far]).unwrap();
        assert_eq!(v.pieces().unwrap().len(), 2);
    }
}
