//! Exact branch-and-cut over the directed cut formulation.

pub mod cuts;
pub mod flow;
pub mod search;

pub use cuts::{separate, Cut};
pub use flow::{FlowNetwork, MaxFlow};
pub use search::{branch_and_cut, decode_integral, BcConfig, BcResult, BcStatus};
