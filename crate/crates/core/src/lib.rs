//! Balanced spanning forests for L0 two-dimensional phase unwrapping.
//!
//! Residues of a wrapped phase image become charged vertices of a complete
//! graph; connecting them by trees of zero net charge yields branch cuts that
//! make the phase integrable. This crate provides exact (branch-and-cut) and
//! heuristic (hybrid iterated local search) solvers for the forest problem,
//! dual-ascent bounds, classical baselines and the imaging pipeline around them.

pub mod baselines;
pub mod bc;
pub mod dual;
pub mod error;
pub mod generate;
pub mod hils;
pub mod lp;
pub mod model;
pub mod phase;
pub mod rng;

pub use error::{Error, Result};
pub use generate::{generate_puc, read_instance, write_instance};
pub use model::{
    add_border_vertices, component_mst, evaluate, ChargedPoint, ForestSolution, Instance, Partition, Tree, Vertex,
};
