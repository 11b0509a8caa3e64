//! Exact symbolic expressions over jet and phase-space coordinates.

mod coord;
mod eval;
mod expr;
pub mod linalg;
mod parse;
mod print;
mod sample;

pub use coord::{BadCoordinate, CoordKind, Coordinate, Symbol};
pub use eval::{Bindings, EvalError};
pub use expr::{rat, ratio, Atom, Expr, Func, Monomial, Placeholder, Rational};
pub use parse::{parse, ParseContext, ParseError};
pub use sample::{bindings_from, probably_equal, Sampler};

