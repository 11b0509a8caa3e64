//! Higher-order tangent bundles: coordinates, the total time derivative,
//! prolongation of curves and vector fields.

use std::fmt;

use crate::symbolic::{Coordinate, Expr, Symbol};

pub mod forms;

pub use forms::{Form1, Form2, Form3};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum JetError {
    #[error("momentum coordinate {0} in a jet-only expression")]
    Momentum(Coordinate),
    #[error("coordinate {coord} exceeds order {order}")]
    OrderExceeded { coord: Coordinate, order: usize },
    #[error("component {component} still depends on {coord} after projection to order {order}")]
    Projection { component: Coordinate, coord: Coordinate, order: usize },
    #[error("target order {target} exceeds field order {order}")]
    TargetOrder { target: usize, order: usize },
    #[error("{0} components for a space of dimension {1}")]
    Dimension(usize, usize),
}

/// The manifold `T^m Q` for an `n`-dimensional base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JetSpace {
    pub order: usize,
    pub dim: usize,
}

impl JetSpace {
    pub fn new(order: usize, dim: usize) -> Self {
        assert!(dim >= 1, "base dimension must be positive");
        JetSpace { order, dim }
    }

    pub fn dimension(&self) -> usize {
        (self.order + 1) * self.dim
    }

    /// Coordinates in canonical order: by derivative order, then axis.
    pub fn coords(&self) -> Vec<Coordinate> {
        (0..=self.order).flat_map(|i| (1..=self.dim).map(move |a| Coordinate::q(i, a))).collect()
    }

    pub fn block(&self, order: usize) -> Vec<Coordinate> {
        (1..=self.dim).map(|a| Coordinate::q(order, a)).collect()
    }

    pub fn contains(&self, c: &Coordinate) -> bool {
        c.is_jet() && c.order <= self.order && (1..=self.dim).contains(&c.axis)
    }

    pub fn index_of(&self, c: &Coordinate) -> Option<usize> {
        self.contains(c).then(|| c.order * self.dim + c.axis - 1)
    }

    /// The projection `rho^m_s`, which truncates coordinates.
    pub fn truncated(&self, s: usize) -> JetSpace {
        JetSpace { order: s.min(self.order), dim: self.dim }
    }
}

/// Returns `sum_i q_{i+1}^A * de/dq_i^A` over `T^m Q`.
pub fn total_derivative(e: &Expr, m: usize) -> Result<Expr, JetError> {
    for c in e.free_coords() {
        if c.is_momentum() {
            return Err(JetError::Momentum(c));
        }
        if c.order > m {
            return Err(JetError::OrderExceeded { coord: c, order: m });
        }
    }
    Ok(d_t(e))
}

/// Unchecked total derivative over whatever jet coordinates `e` uses.
pub(crate) fn d_t(e: &Expr) -> Expr {
    e.free_coords()
        .into_iter()
        .filter(|c| c.is_jet())
        .map(|c| Expr::coord(c.raised()).mul(&e.diff(&c)))
        .sum()
}

/// `d_T` applied `times` times.
pub(crate) fn d_t_iter(e: &Expr, times: usize) -> Expr {
    (0..times).fold(e.clone(), |acc, _| d_t(&acc))
}

/// A symbolic curve in `Q`: one expression per axis in the parameter `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curve {
    pub parameter: String,
    pub components: Vec<Expr>,
}

impl Curve {
    pub fn new(components: Vec<Expr>) -> Self {
        Curve { parameter: "t".to_string(), components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn time(&self) -> Symbol {
        Symbol::constant(&self.parameter)
    }

    pub fn derivative(&self) -> Curve {
        let t = self.time();
        Curve {
            parameter: self.parameter.clone(),
            components: self.components.iter().map(|c| c.diff_symbol(&t)).collect(),
        }
    }
}

/// Canonical lift of a curve to `T^k Q`: `levels[i][A-1]` is the `i`-th
/// derivative of the `A`-th component.
pub fn prolong(c: &Curve, k: usize) -> Vec<Vec<Expr>> {
    let mut levels = Vec::with_capacity(k + 1);
    let mut cur = c.clone();
    for i in 0..=k {
        if i > 0 {
            cur = cur.derivative();
        }
        levels.push(cur.components.clone());
    }
    levels
}

/// A vector field in components over an ordered coordinate list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorField {
    pub coords: Vec<Coordinate>,
    pub components: Vec<Expr>,
}

impl VectorField {
    pub fn new(coords: Vec<Coordinate>, components: Vec<Expr>) -> Result<Self, JetError> {
        if coords.len() != components.len() {
            return Err(JetError::Dimension(components.len(), coords.len()));
        }
        Ok(VectorField { coords, components })
    }

    pub fn on(space: &JetSpace, components: Vec<Expr>) -> Result<Self, JetError> {
        Self::new(space.coords(), components)
    }

    pub fn component(&self, c: &Coordinate) -> Option<&Expr> {
        self.coords.iter().position(|x| x == c).map(|i| &self.components[i])
    }

    /// The derivative of `f` along the field.
    pub fn apply(&self, f: &Expr) -> Expr {
        let free = f.free_coords();
        self.coords
            .iter()
            .zip(&self.components)
            .filter(|(c, x)| free.contains(c) && !x.is_zero())
            .map(|(c, x)| x.mul(&f.diff(c)))
            .sum()
    }

    pub fn substitute_coords(&self, rules: &std::collections::BTreeMap<Coordinate, Expr>) -> Self {
        VectorField {
            coords: self.coords.clone(),
            components: self.components.iter().map(|x| x.substitute_coords(rules)).collect(),
        }
    }

    /// The push-forward by `rho^r_s`: keeps the components along jet
    /// coordinates of order at most `s`. The caller must already have
    /// expressed them in terms of those coordinates.
    pub fn project(&self, s: usize) -> Result<VectorField, JetError> {
        let order = self.coords.iter().filter(|c| c.is_jet()).map(|c| c.order).max().unwrap_or(0);
        if s > order {
            return Err(JetError::TargetOrder { target: s, order });
        }
        let mut coords = Vec::new();
        let mut components = Vec::new();
        for (c, x) in self.coords.iter().zip(&self.components) {
            if !(c.is_jet() && c.order <= s) {
                continue;
            }
            if let Some(bad) = x.free_coords().into_iter().find(|d| d.is_momentum() || d.order > s) {
                return Err(JetError::Projection { component: *c, coord: bad, order: s });
            }
            coords.push(*c);
            components.push(x.clone());
        }
        Ok(VectorField { coords, components })
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Expr::is_zero)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (c, x)) in self.coords.iter().zip(&self.components).enumerate() {
            let negative = x.num_terms() == 1 && x.terms()[0].1 < num_traits::Zero::zero();
            let shown = if negative { x.neg() } else { x.clone() };
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if shown.num_terms() > 1 {
                write!(f, "({}) ∂{}", shown, c)?;
            } else {
                write!(f, "{} ∂{}", shown, c)?;
            }
        }
        Ok(())
    }
}

/// Smallest `r` in `1..=k` such that the components along `q_0..q_{k-r}`
/// are `q_1..q_{k-r+1}`, for a field on `T^k Q`.
pub fn semispray_type(x: &VectorField, space: &JetSpace) -> Option<usize> {
    let k = space.order;
    if k == 0 {
        return None;
    }
    let mut holonomic = 0;
    for i in 0..k {
        let ok = space.block(i).iter().all(|c| x.component(c) == Some(&Expr::coord(c.raised())));
        if !ok {
            break;
        }
        holonomic += 1;
    }
    (holonomic > 0).then(|| (k + 1 - holonomic).max(1))
}

/// Whether the type-`r` shape holds.
pub fn has_semispray_shape(x: &VectorField, space: &JetSpace, r: usize) -> bool {
    match semispray_type(x, space) {
        Some(t) => t <= r && r <= space.order,
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::{parse, ParseContext};

    fn p(s: &str) -> Expr {
        parse(s, &ParseContext::permissive()).unwrap()
    }

    #[test]
    fn total_derivative_raises_order() {
        assert_eq!(total_derivative(&p("q0_1"), 0).unwrap(), p("q1_1"));
        assert_eq!(total_derivative(&p("q1_1^2/2"), 1).unwrap(), p("q1_1*q2_1"));
        assert_eq!(total_derivative(&p("mu*q2_1"), 2).unwrap(), p("mu*q3_1"));
        assert!(matches!(total_derivative(&p("p0_1"), 1), Err(JetError::Momentum(_))));
        assert!(matches!(total_derivative(&p("q2_1"), 1), Err(JetError::OrderExceeded { .. })));
    }

    #[test]
    fn prolongation_of_simple_curves() {
        let c = Curve::new(vec![p("t^2")]);
        let l = prolong(&c, 2);
        assert_eq!(l.iter().map(|v| v[0].to_string()).collect::<Vec<_>>(), ["t^2", "2*t", "2"]);
        let s = Curve::new(vec![p("sin(t)")]);
        let l = prolong(&s, 3);
        assert_eq!(l[3][0], p("-cos(t)"));
        assert_eq!(l[2][0], p("-sin(t)"));
    }

    #[test]
    fn beam_quartic_needs_the_corrected_coefficient() {
        let printed = Curve::new(vec![p("-rho/mu*t^4 + c3*t^3 + c2*t^2 + c1*t + c0")]);
        assert_eq!(prolong(&printed, 4)[4][0], p("-24*rho/mu"));
        let fixed = Curve::new(vec![p("-rho/(24*mu)*t^4")]);
        assert_eq!(prolong(&fixed, 4)[4][0], p("-rho/mu"));
    }

    #[test]
    fn semispray_types() {
        let t1 = JetSpace::new(1, 1);
        let x = VectorField::on(&t1, vec![p("q1_1"), p("0")]).unwrap();
        assert_eq!(semispray_type(&x, &t1), Some(1));
        let y = VectorField::on(&t1, vec![p("7"), p("0")]).unwrap();
        assert_eq!(semispray_type(&y, &t1), None);
        let t3 = JetSpace::new(3, 1);
        let z = VectorField::on(&t3, vec![p("q1_1"), p("q2_1"), p("q0_1"), p("0")]).unwrap();
        assert_eq!(semispray_type(&z, &t3), Some(2));
        assert!(has_semispray_shape(&z, &t3, 3));
        assert!(!has_semispray_shape(&z, &t3, 1));
    }

    #[test]
    fn projection_checks_dependencies() {
        let t3 = JetSpace::new(3, 1);
        let x = VectorField::on(&t3, vec![p("q1_1"), p("q0_1"), p("q3_1"), p("-q2_1")]).unwrap();
        let pr = x.project(1).unwrap();
        assert_eq!(pr.components, vec![p("q1_1"), p("q0_1")]);
        assert_eq!(x.project(3).unwrap(), x);
        let bad = VectorField::on(&t3, vec![p("q3_1"), p("0"), p("0"), p("0")]).unwrap();
        assert!(matches!(bad.project(1), Err(JetError::Projection { .. })));
    }

    #[test]
    fn display_lists_every_component() {
        let t1 = JetSpace::new(1, 1);
        let x = VectorField::on(&t1, vec![p("q1_1"), p("0")]).unwrap();
        assert_eq!(x.to_string(), "q1_1 ∂q0_1 + 0 ∂q1_1");
    }
}
