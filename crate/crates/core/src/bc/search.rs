//! Depth-first branch-and-cut.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bc::cuts::{separate, Cut};
use crate::dual::{dual_ascent, dual_scaling, fix_by_reduced_cost, DualSolution, Strategy};
use crate::error::{Error, Result};
use crate::lp::{LpModel, LpStatus, Row, Sense, CUT_TOL, INT_TOL};
use crate::model::{evaluate, ForestSolution, Instance, Partition};

/// Nodes whose bound reaches the incumbent within this margin are pruned.
pub const PRUNE_EPS: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct BcConfig {
    pub time_limit_seconds: f64,
    /// Remove arcs by reduced cost before the search.
    pub fixing: bool,
    /// Upper bound used only for fixing; the search itself starts without it.
    pub fixing_bound: Option<f64>,
    pub seed: u64,
}

impl Default for BcConfig {
    fn default() -> Self {
        BcConfig { time_limit_seconds: 3600.0, fixing: true, fixing_bound: None, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcStatus {
    Optimal,
    /// Stopped by the time limit; bounds are certified but may differ.
    Gap,
    /// No feasible forest survives (only possible after wrong fixing input).
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct BcResult {
    pub solution: Option<ForestSolution>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub root_bound: f64,
    pub nodes: usize,
    pub status: BcStatus,
    pub cuts: usize,
    pub fixed_arcs: usize,
    pub t_flow: f64,
    pub t_root: f64,
    pub t_total: f64,
}

impl BcResult {
    /// Relative gap `(UB - LB) / UB` in percent (0 when both are zero).
    pub fn gap_percent(&self) -> f64 {
        relative_gap(self.lower_bound, self.upper_bound)
    }

    pub fn root_gap_percent(&self) -> f64 {
        relative_gap(self.root_bound, self.upper_bound)
    }
}

fn relative_gap(lb: f64, ub: f64) -> f64 {
    if !ub.is_finite() {
        return f64::INFINITY;
    }
    if ub.abs() < 1e-12 {
        return 0.0;
    }
    ((ub - lb) / ub * 100.0).max(0.0)
}

/// Groups the undirected support of an integral point into components.
fn support_partition(inst: &Instance, x: &[f64]) -> (Partition, f64) {
    let n = inst.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    let mut support_cost = 0.0;
    for (a, &v) in x.iter().enumerate() {
        if v > 0.5 {
            let (i, j) = inst.arc_endpoints(a);
            support_cost += inst.d(i, j);
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(v);
    }
    (Partition::new(comps), support_cost)
}

/// Decodes an integral arc vector into a balanced forest.
///
/// Each component of the undirected support must be balanced; its tree is
/// recomputed as a minimum spanning tree, which never costs more than the support.
pub fn decode_integral(inst: &Instance, x: &[f64]) -> Result<ForestSolution> {
    if x.len() != inst.arc_count() {
        return Err(Error::arg(format!("expected {} arc values, got {}", inst.arc_count(), x.len())));
    }
    if let Some(a) = x.iter().position(|&v| (v - v.round()).abs() > INT_TOL) {
        return Err(Error::arg(format!("arc {a} has fractional value {}", x[a])));
    }
    let (p, support_cost) = support_partition(inst, x);
    let sol = evaluate(inst, &p)?;
    if let Some(t) = sol.trees.iter().find(|t| t.charge != 0) {
        return Err(Error::Internal(format!("support component {:?} has net charge {}", t.vertices, t.charge)));
    }
    if sol.total_cost > support_cost + PRUNE_EPS {
        return Err(Error::Internal(format!(
            "spanning trees cost {} exceeds support cost {support_cost}",
            sol.total_cost
        )));
    }
    Ok(sol)
}

struct Node {
    fixings: Vec<(usize, f64)>,
    bound: f64,
}

/// Proves optimality by branch-and-cut, warm-started from a dual ascent and an incumbent.
///
/// Without `warm`, a random-strategy ascent with dual scaling is computed.
/// Arc fixing needs a finite incumbent; otherwise every arc is kept.
pub fn branch_and_cut(
    inst: &Instance,
    warm: Option<&DualSolution>,
    incumbent: Option<&ForestSolution>,
    cfg: &BcConfig,
) -> Result<BcResult> {
    let started = Instant::now();
    let n = inst.len();
    let arcs = inst.arc_count();
    let own_warm;
    let warm = match warm {
        Some(w) => w,
        None => {
            let ds = dual_ascent(inst, Strategy::Random, cfg.seed);
            own_warm = dual_scaling(inst, &ds, 0.9, 10, cfg.seed)?;
            &own_warm
        }
    };
    let mut best: Option<ForestSolution> = incumbent.filter(|s| s.is_feasible()).cloned();
    let mut ub = best.as_ref().map_or(f64::INFINITY, |s| s.total_cost);

    let mut removed = vec![false; arcs];
    let mut fixed_arcs = 0;
    let fix_ub = cfg.fixing_bound.map_or(ub, |b| b.min(ub));
    if cfg.fixing && fix_ub.is_finite() {
        for a in fix_by_reduced_cost(warm, fix_ub.max(warm.lower_bound))? {
            removed[a] = true;
            fixed_arcs += 1;
        }
    }
    let mut column_of = vec![None; arcs];
    let mut arc_of = Vec::new();
    for a in 0..arcs {
        if !removed[a] {
            column_of[a] = Some(arc_of.len());
            arc_of.push(a);
        }
    }
    let mut lp = LpModel::new(arc_of.len());
    for (c, &a) in arc_of.iter().enumerate() {
        lp.set_objective(c, inst.arc_cost(a));
    }
    let mut pool: HashSet<Cut> = HashSet::new();
    let mut initial: Vec<Cut> = (0..n).filter_map(|v| Cut::for_set(inst, &[v])).collect();
    initial.extend(warm.positive_cuts(inst));
    let mut rows = Vec::new();
    for cut in initial {
        if pool.insert(cut.clone()) {
            rows.push(cut.row(inst, &column_of));
        }
    }
    lp.add_rows(rows);
    let mut pair_rows: HashSet<(usize, usize)> = HashSet::new();

    let mut t_flow = 0.0;
    let mut t_root = 0.0;
    let mut root_bound = f64::NEG_INFINITY;
    let mut nodes = 0usize;
    let mut stack = vec![Node { fixings: Vec::new(), bound: f64::NEG_INFINITY }];
    let mut timed_out = false;
    let mut open_bound = f64::INFINITY;
    let mut current: Vec<(usize, f64)> = Vec::new();

    while let Some(node) = stack.pop() {
        if node.bound >= ub - PRUNE_EPS {
            continue;
        }
        if started.elapsed().as_secs_f64() > cfg.time_limit_seconds {
            open_bound = open_bound.min(node.bound);
            for other in &stack {
                open_bound = open_bound.min(other.bound);
            }
            timed_out = true;
            break;
        }
        nodes += 1;
        for &(c, _) in &current {
            lp.set_bounds(c, 0.0, 1.0);
        }
        for &(c, v) in &node.fixings {
            lp.set_bounds(c, v, v);
        }
        current.clone_from(&node.fixings);

        let mut x_full = vec![0.0; arcs];
        let mut node_obj;
        let mut aborted = false;
        loop {
            let sol = lp.solve()?;
            match sol.status {
                LpStatus::Optimal => {}
                LpStatus::Infeasible => {
                    node_obj = f64::INFINITY;
                    break;
                }
                LpStatus::Unbounded => return Err(Error::Lp("cut relaxation reported unbounded".into())),
            }
            node_obj = sol.objective;
            for (c, &a) in arc_of.iter().enumerate() {
                x_full[a] = sol.x[c].clamp(0.0, 1.0);
            }
            if node_obj >= ub - PRUNE_EPS {
                break;
            }
            if started.elapsed().as_secs_f64() > cfg.time_limit_seconds {
                aborted = true;
                break;
            }
            let t0 = Instant::now();
            let cuts = separate(inst, &x_full);
            t_flow += t0.elapsed().as_secs_f64();
            let mut new_rows = Vec::new();
            for cut in cuts {
                if cut.value(inst, &x_full) < 1.0 - CUT_TOL && pool.insert(cut.clone()) {
                    new_rows.push(cut.row(inst, &column_of));
                }
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let (a, b) = (inst.arc_index(i, j), inst.arc_index(j, i));
                    if x_full[a] + x_full[b] > 1.0 + CUT_TOL && pair_rows.insert((i, j)) {
                        let coeffs: Vec<(usize, f64)> =
                            [a, b].iter().filter_map(|&k| column_of[k]).map(|c| (c, 1.0)).collect();
                        new_rows.push(Row::new(coeffs, Sense::Le, 1.0));
                    }
                }
            }
            if new_rows.is_empty() {
                break;
            }
            lp.add_rows(new_rows);
        }
        if nodes == 1 {
            t_root = started.elapsed().as_secs_f64();
            root_bound = if aborted { node.bound.max(warm.lower_bound) } else { node_obj };
        }
        if aborted {
            open_bound = open_bound.min(node.bound.max(if nodes == 1 { warm.lower_bound } else { node.bound }));
            for other in &stack {
                open_bound = open_bound.min(other.bound);
            }
            timed_out = true;
            break;
        }
        if node_obj >= ub - PRUNE_EPS {
            continue;
        }
        let mut branch: Option<(usize, f64)> = None;
        for (c, &a) in arc_of.iter().enumerate() {
            let v = x_full[a];
            if v > INT_TOL && v < 1.0 - INT_TOL {
                let score = (v - 0.5).abs();
                if branch.is_none_or(|(_, s)| score < s) {
                    branch = Some((c, score));
                }
            }
        }
        match branch {
            None => {
                let (p, _) = support_partition(inst, &x_full);
                let sol = evaluate(inst, &p)?;
                if sol.is_feasible() && sol.total_cost < ub - crate::model::COST_EPS {
                    ub = sol.total_cost;
                    best = Some(sol);
                }
            }
            Some((c, _)) => {
                let mut zero = node.fixings.clone();
                zero.push((c, 0.0));
                let mut one = node.fixings;
                one.push((c, 1.0));
                stack.push(Node { fixings: zero, bound: node_obj });
                stack.push(Node { fixings: one, bound: node_obj });
            }
        }
    }
    let (status, lb) = if timed_out {
        (BcStatus::Gap, open_bound.max(warm.lower_bound).min(ub))
    } else if ub.is_finite() {
        (BcStatus::Optimal, ub)
    } else {
        (BcStatus::Infeasible, f64::INFINITY)
    };
    let status = if status == BcStatus::Gap && ub - lb <= PRUNE_EPS { BcStatus::Optimal } else { status };
    Ok(BcResult {
        solution: best,
        lower_bound: lb,
        upper_bound: ub,
        root_bound: if root_bound.is_finite() { root_bound } else { warm.lower_bound },
        nodes,
        status,
        cuts: pool.len() + pair_rows.len(),
        fixed_arcs,
        t_flow,
        t_root,
        t_total: started.elapsed().as_secs_f64(),
    })
}
