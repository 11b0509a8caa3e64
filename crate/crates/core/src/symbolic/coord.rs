use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Whether a coordinate lives on a jet space or on the momentum fibre of a
/// cotangent bundle. Jet coordinates sort before momenta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoordKind {
    Jet,
    Momentum,
}

/// A natural coordinate: `q<i>_<A>` is the `i`-th derivative of the base
/// coordinate `A`; `p<i>_<A>` is its conjugate momentum `p_A^i`.
///
/// `axis` is one-based, matching the printed names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coordinate {
    pub kind: CoordKind,
    pub order: usize,
    pub axis: usize,
}

impl Coordinate {
    pub fn q(order: usize, axis: usize) -> Self {
        assert!(axis >= 1, "axis index is one-based");
        Coordinate { kind: CoordKind::Jet, order, axis }
    }

    pub fn p(order: usize, axis: usize) -> Self {
        assert!(axis >= 1, "axis index is one-based");
        Coordinate { kind: CoordKind::Momentum, order, axis }
    }

    pub fn is_jet(&self) -> bool {
        self.kind == CoordKind::Jet
    }

    pub fn is_momentum(&self) -> bool {
        self.kind == CoordKind::Momentum
    }

    /// The jet coordinate one derivative order higher.
    pub fn raised(&self) -> Self {
        Coordinate { order: self.order + 1, ..*self }
    }

    /// Conjugate partner: `q_i^A <-> p_A^i`.
    pub fn conjugate(&self) -> Self {
        let kind = match self.kind {
            CoordKind::Jet => CoordKind::Momentum,
            CoordKind::Momentum => CoordKind::Jet,
        };
        Coordinate { kind, ..*self }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.kind {
            CoordKind::Jet => 'q',
            CoordKind::Momentum => 'p',
        };
        write!(f, "{}{}_{}", prefix, self.order, self.axis)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a coordinate name: {0:?}")]
pub struct BadCoordinate(pub String);

impl FromStr for Coordinate {
    type Err = BadCoordinate;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_coordinate(s).ok_or_else(|| BadCoordinate(s.to_string()))
    }
}

/// Recognises `q<digits>_<digits>` / `p<digits>_<digits>` with a nonzero axis.
pub(crate) fn parse_coordinate(s: &str) -> Option<Coordinate> {
    let mut chars = s.chars();
    let kind = match chars.next()? {
        'q' => CoordKind::Jet,
        'p' => CoordKind::Momentum,
        _ => return None,
    };
    let rest = chars.as_str();
    let (order, axis) = rest.split_once('_')?;
    if order.is_empty() || axis.is_empty() {
        return None;
    }
    if !order.bytes().all(|b| b.is_ascii_digit()) || !axis.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let order: usize = order.parse().ok()?;
    let axis: usize = axis.parse().ok()?;
    if axis == 0 {
        return None;
    }
    Some(Coordinate { kind, order, axis })
}

/// Anything an expression can be differentiated by, substituted for, or
/// evaluated at: a coordinate or a named constant.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Coord(Coordinate),
    Const(Arc<str>),
}

impl Symbol {
    pub fn constant(name: &str) -> Self {
        Symbol::Const(Arc::from(name))
    }

    pub fn as_coord(&self) -> Option<Coordinate> {
        match self {
            Symbol::Coord(c) => Some(*c),
            Symbol::Const(_) => None,
        }
    }
}

impl From<Coordinate> for Symbol {
    fn from(c: Coordinate) -> Self {
        Symbol::Coord(c)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Coord(c) => c.fmt(f),
            Symbol::Const(name) => f.write_str(name),
        }
    }
}
