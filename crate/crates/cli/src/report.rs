//! JSON reports. Every report carries `"schema": 1`; only `time_seconds` depends on the clock.

use phaseforest::phase::Metrics;
use phaseforest::ForestSolution;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Serialize)]
pub struct GenerateReport {
    pub schema: u32,
    pub command: &'static str,
    pub kind: &'static str,
    pub seed: u64,
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct BoundReport {
    pub schema: u32,
    pub command: &'static str,
    pub instance: String,
    pub strategy: &'static str,
    pub seed: u64,
    pub scaling: bool,
    pub lower_bound: f64,
    pub iterations: usize,
    pub cuts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_arcs: Option<usize>,
    /// `100 * (UB - LB) / UB` against `--upper-bound`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap_percent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reduction_percent: Option<f64>,
    pub time_seconds: f64,
}

/// Result of one solver call, written as `solution.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub schema: u32,
    pub command: String,
    pub method: String,
    pub instance: String,
    pub seed: u64,
    pub runs: usize,
    /// `optimal`, `gap` (time limit), or `heuristic`.
    pub status: String,
    /// The time limit cut the solver short; the solution is the best found so far.
    pub partial: bool,
    pub cost: f64,
    pub penalty: f64,
    pub feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    pub trees: usize,
    /// One entry per HILS run, seeded `seed, seed + 1, ...`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub per_run: Vec<RunReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bc: Option<BcReport>,
    pub solution: ForestSolution,
    pub time_seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub cost: f64,
    pub feasible: bool,
    pub iterations: usize,
    pub time_seconds: f64,
}

/// Branch-and-cut statistics; `t_flow` and `t_root` are seconds spent in separation and at the root.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BcReport {
    pub upper_bound: f64,
    pub gap_percent: f64,
    pub root_bound: f64,
    pub cuts: usize,
    pub fixed_arcs: usize,
    pub t_flow: f64,
    pub t_root: f64,
}

#[derive(Debug, Serialize)]
pub struct MetricsReport {
    pub schema: u32,
    pub command: &'static str,
    pub method: String,
    pub rows: usize,
    pub cols: usize,
    pub residues: usize,
    #[serde(flatten)]
    pub metrics: Metrics,
    pub cost: f64,
    pub partial: bool,
    pub time_seconds: f64,
}
