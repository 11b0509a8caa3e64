pub mod hamiltonian;
pub mod hj;
pub mod jet;
pub mod lagrangian;
pub mod model;
pub mod numeric;
pub mod symbolic;

pub use hamiltonian::{HamiltonianSystem, LegendreMap, PhaseSpace};
pub use hj::{CheckOptions, GeneratingFunction, OneForm, ResidualReport, Section};
pub use jet::{Curve, Form1, Form2, JetSpace, VectorField};
pub use lagrangian::{CartanData, LagrangianSystem, SemisprayField};
pub use model::{ModelError, ModelFile, Report};
pub use numeric::{integrate, Trajectory};
pub use symbolic::{parse, Bindings, Coordinate, Expr, ParseContext, Symbol};
