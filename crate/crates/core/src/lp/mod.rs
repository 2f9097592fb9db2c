//! Linear programming: a bounded simplex engine and the cut relaxations built on it.

pub mod relax;
pub mod simplex;

pub use relax::{lp_bound_directed, lp_bound_undirected};
pub use simplex::{LpModel, LpSolution, LpStatus, Row, Sense};

/// Integrality tolerance shared by the integer solvers.
pub const INT_TOL: f64 = 1e-6;
/// Minimum violation for a cut row to be added.
pub const CUT_TOL: f64 = 1e-4;
