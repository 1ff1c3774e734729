//! Potentials as closed symbolic trees.
//!
//! A [`Potential`] is a node tree plus the dimension of the space it lives
//! on. Trees are immutable once built; evaluation is pure. Besides pointwise
//! values the tree yields structural facts used by the integrators: a ball
//! containing the support, a bound on `|V|`, and a decomposition of `|V|`
//! into disjoint pieces of simple shape (see [`Piece`]).

mod dsl;
mod pieces;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};
use crate::point::{dist, SpacePoint};

pub use dsl::parse;
pub use pieces::{Amp, Piece};
pub(crate) use pieces::integration_pieces;

/// Node of a potential tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Zero,
    Constant(f64),
    /// `amp * 1_{|z - center| <= radius}`
    BallIndicator { center: Vec<f64>, radius: f64, amp: f64 },
    /// The cylinder family `V_n` of the `d = 3` counterexample, see
    /// [`cylinder_potential`].
    Cylinder3(u32),
    /// `tau_s f(z) = s f(sqrt(s) z)`
    Dilate(f64, Box<Node>),
    /// `f(z) 1_{|z| <= r}`
    Truncate(f64, Box<Node>),
    Scale(f64, Box<Node>),
    Sum(Vec<Node>),
    /// `sum_{i < truncation_len} weights[i] * terms[i]`
    Series { weights: Vec<f64>, terms: Vec<Node>, truncation_len: usize },
    Negate(Box<Node>),
}

/// A potential `V: R^dim -> R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    dim: usize,
    node: Node,
}

impl Potential {
    fn from_node(dim: usize, node: Node) -> Self {
        Self { dim, node }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_node(dim, Node::Zero)
    }

    pub fn constant(dim: usize, a: f64) -> Result<Self> {
        finite(a, "constant")?;
        Ok(Self::from_node(dim, Node::Constant(a)))
    }

    pub fn ball(center: SpacePoint, radius: f64, amp: f64) -> Result<Self> {
        positive(radius, "ball radius")?;
        finite(amp, "ball amplitude")?;
        Ok(Self::from_node(
            center.dim(),
            Node::BallIndicator { center: center.into_vec(), radius, amp },
        ))
    }

    /// `amp * 1_{B(0, radius)}` in `R^dim`.
    pub fn centered_ball(dim: usize, radius: f64, amp: f64) -> Result<Self> {
        Self::ball(SpacePoint::origin(dim), radius, amp)
    }

    pub fn dilate(s: f64, inner: Potential) -> Result<Self> {
        positive(s, "dilatation factor")?;
        Ok(Self::from_node(inner.dim, Node::Dilate(s, Box::new(inner.node))))
    }

    pub fn truncate(r: f64, inner: Potential) -> Result<Self> {
        positive(r, "truncation radius")?;
        Ok(Self::from_node(inner.dim, Node::Truncate(r, Box::new(inner.node))))
    }

    pub fn scale(c: f64, inner: Potential) -> Result<Self> {
        finite(c, "scale factor")?;
        Ok(Self::from_node(inner.dim, Node::Scale(c, Box::new(inner.node))))
    }

    pub fn negate(inner: Potential) -> Self {
        Self::from_node(inner.dim, Node::Negate(Box::new(inner.node)))
    }

    pub fn sum(terms: Vec<Potential>) -> Result<Self> {
        let dim = terms
            .first()
            .map(|p| p.dim)
            .ok_or_else(|| Error::Usage("a sum needs at least one term".into()))?;
        let mut nodes = Vec::with_capacity(terms.len());
        for t in terms {
            check_dim(dim, t.dim)?;
            nodes.push(t.node);
        }
        Ok(Self::from_node(dim, Node::Sum(nodes)))
    }

    /// A weighted series evaluated through its first `truncation_len` terms.
    pub fn series(weights: Vec<f64>, terms: Vec<Potential>, truncation_len: usize) -> Result<Self> {
        if weights.len() != terms.len() || terms.is_empty() {
            return Err(Error::Usage("series needs equally many (>= 1) weights and terms".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(domain("series weights must be positive and finite"));
        }
        if truncation_len == 0 || truncation_len > terms.len() {
            return Err(domain(format!(
                "truncation length must lie in 1..={}, got {truncation_len}",
                terms.len()
            )));
        }
        let dim = terms[0].dim;
        let mut nodes = Vec::with_capacity(terms.len());
        for t in terms {
            check_dim(dim, t.dim)?;
            nodes.push(t.node);
        }
        Ok(Self::from_node(dim, Node::Series { weights, terms: nodes, truncation_len }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn node(&self) -> &Node {
        &self.node
    }

    /// `V(z)`.
    pub fn evaluate(&self, z: &SpacePoint) -> Result<f64> {
        check_dim(self.dim, z.dim())?;
        Ok(self.eval_slice(z.coords()))
    }

    /// `V(z)` without the dimension check.
    pub fn eval_slice(&self, z: &[f64]) -> f64 {
        eval_node(&self.node, z)
    }

    /// A ball containing the support; `None` when the support is unbounded.
    /// The zero potential reports the degenerate ball `(0, 0)`.
    pub fn support_bound(&self) -> Option<(SpacePoint, f64)> {
        match support(&self.node, self.dim)? {
            Support::Empty => Some((SpacePoint::origin(self.dim), 0.0)),
            Support::Ball(c, r) => Some((SpacePoint::new(c).ok()?, r)),
        }
    }

    /// Structural bound on `sup |V|`, `None` when the tree does not yield one.
    pub fn sup_bound(&self) -> Option<f64> {
        sup_node(&self.node).filter(|v| v.is_finite())
    }

    /// True when the tree contains a member of the cylinder family, whose
    /// profile has no bound uniform in the family index.
    pub fn has_cylinder_family(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Cylinder3(_) => true,
                Node::Dilate(_, i) | Node::Truncate(_, i) | Node::Scale(_, i) | Node::Negate(i) => walk(i),
                Node::Sum(t) | Node::Series { terms: t, .. } => t.iter().any(walk),
                _ => false,
            }
        }
        walk(&self.node)
    }

    /// True when the tree is a constant (possibly zero) function, i.e. every
    /// quantity is translation invariant.
    pub fn is_translation_invariant(&self) -> bool {
        const_value(&self.node).is_some()
    }

    pub fn is_zero(&self) -> bool {
        matches!(sup_node(&self.node), Some(v) if v == 0.0)
    }

    /// Disjoint pieces whose absolute amplitudes sum to `|V|`, or `None` when
    /// the tree has overlapping parts that do not merge.
    pub fn pieces(&self) -> Option<Vec<Piece>> {
        pieces::decompose(&self.node, self.dim)
    }

    /// Tail of a series node beyond its truncation,
    /// `sum_{i >= L} w_i sup|term_i|`; zero for other nodes. `None` when some
    /// tail term has no structural sup bound.
    pub fn series_tail_bound(&self) -> Option<f64> {
        match &self.node {
            Node::Series { weights, terms, truncation_len } => {
                let mut tail = 0.0;
                for (w, t) in weights.iter().zip(terms).skip(*truncation_len) {
                    tail += w * sup_node(t)?;
                }
                Some(tail)
            }
            _ => Some(0.0),
        }
    }

    /// The same series with a different truncation length.
    pub fn with_truncation(&self, len: usize) -> Result<Self> {
        match &self.node {
            Node::Series { weights, terms, .. } => {
                let terms =
                    terms.iter().map(|n| Potential::from_node(self.dim, n.clone())).collect();
                Potential::series(weights.clone(), terms, len)
            }
            _ => Err(Error::Usage("not a series".into())),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.node, f)
    }
}

fn write_node(n: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match n {
        Node::Zero => write!(f, "zero"),
        Node::Constant(a) => write!(f, "const:{a}"),
        Node::BallIndicator { center, radius, amp } => {
            write!(f, "ball:{radius},{amp}")?;
            if center.iter().any(|c| *c != 0.0) {
                for c in center {
                    write!(f, ",{c}")?;
                }
            }
            Ok(())
        }
        Node::Cylinder3(n) => write!(f, "cyl3:{n}"),
        Node::Dilate(s, inner) => {
            write!(f, "dilate:{s}(")?;
            write_node(inner, f)?;
            write!(f, ")")
        }
        Node::Truncate(r, inner) => {
            write!(f, "trunc:{r}(")?;
            write_node(inner, f)?;
            write!(f, ")")
        }
        Node::Scale(c, inner) => {
            write!(f, "scale:{c}(")?;
            write_node(inner, f)?;
            write!(f, ")")
        }
        Node::Negate(inner) => {
            write!(f, "neg(")?;
            write_node(inner, f)?;
            write!(f, ")")
        }
        Node::Sum(terms) => {
            write!(f, "sum(")?;
            for (i, t) in terms.iter().enumerate() {
                if i > 0 {
                    write!(f, ";")?;
                }
                write_node(t, f)?;
            }
            write!(f, ")")
        }
        Node::Series { weights, terms, truncation_len } => {
            // not part of the DSL; printed as the equivalent finite sum
            write!(f, "sum(")?;
            for (i, (w, t)) in weights.iter().zip(terms).take(*truncation_len).enumerate() {
                if i > 0 {
                    write!(f, ";")?;
                }
                write!(f, "scale:{w}(")?;
                write_node(t, f)?;
                write!(f, ")")?;
            }
            write!(f, ")")
        }
    }
}

fn finite(v: f64, what: &str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite, got {v}")))
    }
}

fn positive(v: f64, what: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be finite and positive, got {v}")))
    }
}

fn eval_node(n: &Node, z: &[f64]) -> f64 {
    match n {
        Node::Zero => 0.0,
        Node::Constant(a) => *a,
        Node::BallIndicator { center, radius, amp } => {
            if dist(z, center) <= *radius {
                *amp
            } else {
                0.0
            }
        }
        Node::Cylinder3(n) => cylinder_value(*n, z),
        Node::Dilate(s, inner) => {
            let rs = s.sqrt();
            let w: Vec<f64> = z.iter().map(|v| v * rs).collect();
            s * eval_node(inner, &w)
        }
        Node::Truncate(r, inner) => {
            if crate::point::norm(z) <= *r {
                eval_node(inner, z)
            } else {
                0.0
            }
        }
        Node::Scale(c, inner) => c * eval_node(inner, z),
        Node::Negate(inner) => -eval_node(inner, z),
        Node::Sum(terms) => terms.iter().map(|t| eval_node(t, z)).sum(),
        Node::Series { weights, terms, truncation_len } => weights
            .iter()
            .zip(terms)
            .take(*truncation_len)
            .map(|(w, t)| w * eval_node(t, z))
            .sum(),
    }
}

fn cylinder_value(n: u32, z: &[f64]) -> f64 {
    if z.len() != 3 {
        return 0.0;
    }
    let z1 = z[0];
    let k = z1.floor();
    if k < 1.0 || k > n as f64 || z1 > k + 0.25 {
        return 0.0;
    }
    let scale = 25.0 * n as f64;
    if z[1] * z[1] + z[2] * z[2] > k / scale {
        return 0.0;
    }
    f_profile_unchecked(z1 / scale)
}

enum Support {
    Empty,
    Ball(Vec<f64>, f64),
}

fn support(n: &Node, dim: usize) -> Option<Support> {
    match n {
        Node::Zero => Some(Support::Empty),
        Node::Constant(a) => {
            if *a == 0.0 {
                Some(Support::Empty)
            } else {
                None
            }
        }
        Node::BallIndicator { center, radius, amp } => {
            if *amp == 0.0 {
                Some(Support::Empty)
            } else {
                Some(Support::Ball(center.clone(), *radius))
            }
        }
        // all cylinder vertices lie within |z| < n + 1
        Node::Cylinder3(n) => Some(Support::Ball(vec![0.0; dim], *n as f64 + 1.0)),
        Node::Dilate(s, inner) => Some(match support(inner, dim)? {
            Support::Empty => Support::Empty,
            Support::Ball(c, r) => {
                let k = 1.0 / s.sqrt();
                Support::Ball(c.iter().map(|v| v * k).collect(), r * k)
            }
        }),
        Node::Truncate(r, inner) => match support(inner, dim) {
            Some(Support::Empty) => Some(Support::Empty),
            Some(Support::Ball(c, rad)) => {
                let cn = crate::point::norm(&c);
                if cn + rad <= *r {
                    Some(Support::Ball(c, rad))
                } else if cn - rad >= *r {
                    Some(Support::Empty)
                } else {
                    // the smaller of the two candidate balls still contains the support
                    if rad <= *r {
                        Some(Support::Ball(c, rad))
                    } else {
                        Some(Support::Ball(vec![0.0; dim], *r))
                    }
                }
            }
            None => Some(Support::Ball(vec![0.0; dim], *r)),
        },
        Node::Scale(c, inner) => {
            if *c == 0.0 {
                Some(Support::Empty)
            } else {
                support(inner, dim)
            }
        }
        Node::Negate(inner) => support(inner, dim),
        Node::Sum(terms) => union_support(terms.iter().map(|t| support(t, dim)), dim),
        Node::Series { terms, truncation_len, .. } => {
            union_support(terms.iter().take(*truncation_len).map(|t| support(t, dim)), dim)
        }
    }
}

fn union_support(parts: impl Iterator<Item = Option<Support>>, dim: usize) -> Option<Support> {
    let mut balls: Vec<(Vec<f64>, f64)> = Vec::new();
    for p in parts {
        match p? {
            Support::Empty => {}
            Support::Ball(c, r) => balls.push((c, r)),
        }
    }
    if balls.is_empty() {
        return Some(Support::Empty);
    }
    if balls.len() == 1 {
        let (c, r) = balls.pop().unwrap();
        return Some(Support::Ball(c, r));
    }
    // ball around the centroid of the centres
    let m = balls.len() as f64;
    let mut center = vec![0.0; dim];
    for (c, _) in &balls {
        for (a, b) in center.iter_mut().zip(c) {
            *a += b / m;
        }
    }
    let radius = balls.iter().map(|(c, r)| dist(c, &center) + r).fold(0.0, f64::max);
    Some(Support::Ball(center, radius))
}

fn sup_node(n: &Node) -> Option<f64> {
    match n {
        Node::Zero => Some(0.0),
        Node::Constant(a) => Some(a.abs()),
        Node::BallIndicator { amp, .. } => Some(amp.abs()),
        Node::Cylinder3(n) => {
            // f decreases then increases on (0, e^{-1}); the profile range is
            // [1/(25n), (n + 1/4)/(25n)]
            let scale = 25.0 * *n as f64;
            let a = f_profile_unchecked(1.0 / scale);
            let b = f_profile_unchecked((*n as f64 + 0.25) / scale);
            Some(a.max(b))
        }
        Node::Dilate(s, inner) => Some(s * sup_node(inner)?),
        Node::Truncate(_, inner) => sup_node(inner),
        Node::Scale(c, inner) => Some(c.abs() * sup_node(inner)?),
        Node::Negate(inner) => sup_node(inner),
        Node::Sum(terms) => terms.iter().map(sup_node).sum(),
        Node::Series { weights, terms, truncation_len } => weights
            .iter()
            .zip(terms)
            .take(*truncation_len)
            .map(|(w, t)| sup_node(t).map(|v| w * v))
            .sum(),
    }
}

/// `Some(a)` when the node is the constant function `a`.
fn const_value(n: &Node) -> Option<f64> {
    match n {
        Node::Zero => Some(0.0),
        Node::Constant(a) => Some(*a),
        Node::Dilate(s, inner) => const_value(inner).map(|a| s * a),
        Node::Scale(c, inner) => const_value(inner).map(|a| c * a),
        Node::Negate(inner) => const_value(inner).map(|a| -a),
        Node::Sum(terms) => terms.iter().map(const_value).sum(),
        Node::Series { weights, terms, truncation_len } => weights
            .iter()
            .zip(terms)
            .take(*truncation_len)
            .map(|(w, t)| const_value(t).map(|a| w * a))
            .sum(),
        Node::BallIndicator { amp, .. } if *amp == 0.0 => Some(0.0),
        _ => None,
    }
}

fn check_log_domain(r: f64) -> Result<()> {
    if r > 0.0 && r < (-1.0f64).exp() {
        Ok(())
    } else {
        Err(domain(format!("argument must lie in (0, 1/e), got {r}")))
    }
}

/// `rho(r) = 1 / (r^2 |ln r| ln|ln r|)` on `(0, 1/e)`.
pub fn rho(r: f64) -> Result<f64> {
    check_log_domain(r)?;
    let l = -r.ln();
    Ok(1.0 / (r * r * l * l.ln()))
}

/// `f(r) = 1 / (r |ln r| ln|ln r|)` on `(0, 1/e)`.
pub fn f_profile(r: f64) -> Result<f64> {
    check_log_domain(r)?;
    Ok(f_profile_unchecked(r))
}

#[inline]
pub(crate) fn f_profile_unchecked(r: f64) -> f64 {
    let l = -r.ln();
    1.0 / (r * l * l.ln())
}

/// `F(r) = -ln ln ln(1/r)`, an antiderivative of `f` on `(0, 1/e)`.
pub fn f_antiderivative(r: f64) -> Result<f64> {
    check_log_domain(r)?;
    Ok(-(-r.ln()).ln().ln())
}

/// `V_n(z) = f(z_1 / (25n)) sum_{k=1}^n 1_{C_k}(z)` with
/// `C_k = [k, k + 1/4] x D_{sqrt(k/(25n))}` in `R^3`.
pub fn cylinder_potential(n: u32) -> Result<Potential> {
    if n == 0 {
        return Err(domain("cylinder family index must be positive"));
    }
    Ok(Potential::from_node(3, Node::Cylinder3(n)))
}

/// `sum_n w_n tau_{s_n}(1_{B(0, r_n)} U)` for a caller-supplied base `U`,
/// truncated to `truncation_len` terms. `params` holds `(w_n, s_n, r_n)`.
pub fn dilation_series(
    base: &Potential,
    params: &[(f64, f64, f64)],
    truncation_len: usize,
) -> Result<Potential> {
    let mut weights = Vec::with_capacity(params.len());
    let mut terms = Vec::with_capacity(params.len());
    for &(w, s, r) in params {
        weights.push(w);
        terms.push(Potential::dilate(s, Potential::truncate(r, base.clone())?)?);
    }
    Potential::series(weights, terms, truncation_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(v: &[f64]) -> SpacePoint {
        SpacePoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn basic_nodes() {
        let c = Potential::constant(2, 3.0).unwrap();
        assert_eq!(c.evaluate(&p(&[5.0, -1.0])).unwrap(), 3.0);
        let b = Potential::centered_ball(2, 1.0, -2.0).unwrap();
        assert_eq!(b.evaluate(&p(&[0.5, 0.0])).unwrap(), -2.0);
        assert_eq!(b.evaluate(&p(&[1.5, 0.0])).unwrap(), 0.0);
        assert!(matches!(b.evaluate(&p(&[0.0])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn dilatation_identity() {
        let f = Potential::centered_ball(3, 1.0, 1.0).unwrap();
        let v = Potential::dilate(4.0, f.clone()).unwrap();
        assert_eq!(v.evaluate(&p(&[0.4, 0.0, 0.0])).unwrap(), 4.0);
        for z in [[0.1, 0.2, 0.3], [0.49, 0.0, 0.0], [0.51, 0.0, 0.0]] {
            let w: Vec<f64> = z.iter().map(|v| v * 2.0).collect();
            assert_eq!(v.eval_slice(&z), 4.0 * f.eval_slice(&w));
        }
        let (c, r) = v.support_bound().unwrap();
        assert_eq!(c.norm(), 0.0);
        assert_eq!(r, 0.5);
    }

    #[test]
    fn profile_values() {
        let e3 = (-3.0f64).exp();
        assert_relative_eq!(rho(e3).unwrap(), 6.0f64.exp() / (3.0 * 3.0f64.ln()), max_relative = 1e-13);
        assert_relative_eq!(f_profile(e3).unwrap(), 3.0f64.exp() / (3.0 * 3.0f64.ln()), max_relative = 1e-13);
        let ee = (-std::f64::consts::E).exp();
        assert_relative_eq!(rho(ee).unwrap(), (2.0 * std::f64::consts::E).exp() / std::f64::consts::E, max_relative = 1e-13);
        assert!(rho(0.5).is_err());
        assert!(rho(0.0).is_err());
        assert!(rho(0.01).unwrap() > rho(0.1).unwrap());
    }

    #[test]
    fn cylinder_values() {
        let v = cylinder_potential(1).unwrap();
        assert_relative_eq!(v.eval_slice(&[1.1, 0.0, 0.0]), f_profile(0.044).unwrap(), max_relative = 1e-14);
        assert_eq!(v.eval_slice(&[1.1, 0.3, 0.0]), 0.0);
        let v4 = cylinder_potential(4).unwrap();
        assert_eq!(v4.eval_slice(&[2.5, 0.0, 0.0]), 0.0);
        assert!(v4.eval_slice(&[2.1, 0.0, 0.0]) > 0.0);
        let (_, r) = v4.support_bound().unwrap();
        assert_eq!(r, 5.0);
    }

    #[test]
    fn support_and_sup() {
        assert!(Potential::constant(1, 2.0).unwrap().support_bound().is_none());
        assert_eq!(Potential::constant(1, 2.0).unwrap().sup_bound(), Some(2.0));
        let s = Potential::sum(vec![
            Potential::centered_ball(1, 1.0, 1.0).unwrap(),
            Potential::ball(p(&[4.0]), 1.0, -3.0).unwrap(),
        ])
        .unwrap();
        let (c, r) = s.support_bound().unwrap();
        assert_eq!(c[0], 2.0);
        assert_eq!(r, 3.0);
        assert_eq!(s.sup_bound(), Some(4.0));
        assert!(Potential::zero(2).is_zero());
    }

    #[test]
    fn series_tail() {
        let b = Potential::centered_ball(1, 1.0, 1.0).unwrap();
        let terms = vec![b.clone(), b.clone(), b.clone()];
        let s = Potential::series(vec![0.5, 0.25, 0.125], terms, 1).unwrap();
        assert_eq!(s.series_tail_bound(), Some(0.375));
        assert_eq!(s.eval_slice(&[0.0]), 0.5);
        let s2 = s.with_truncation(2).unwrap();
        assert!((s2.eval_slice(&[0.0]) - s.eval_slice(&[0.0])).abs() <= 0.25);
    }
}
