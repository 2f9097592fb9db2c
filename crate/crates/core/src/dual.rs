//! Dual ascent on the directed cut formulation.
//!
//! Every unbalanced vertex set `S` owns a dual `π_S`; each arc pays for the
//! duals of the cuts it crosses in the required direction, and what remains of
//! its cost is its reduced cost. Ascent repeatedly raises the dual of an
//! unbalanced component of the saturated-arc graph until one of its boundary
//! arcs saturates, merging that component with a neighbour.

use std::collections::HashMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bc::cuts::Cut;
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rng;

/// Reduced costs at or below this value count as saturated.
const SAT_EPS: f64 = 1e-12;
/// Slack added to the fixing threshold.
pub const FIX_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Raise the component owning the cheapest boundary arc.
    MinRc,
    /// Raise a uniformly chosen unbalanced component.
    Random,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min_rc" | "min-rc" => Ok(Strategy::MinRc),
            "random" => Ok(Strategy::Random),
            other => Err(Error::arg(format!("unknown dual strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Arcs leaving the set (positive charge).
    Out,
    /// Arcs entering the set (negative charge).
    In,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCut {
    pub set: Vec<usize>,
    pub orientation: Orientation,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub cuts: Vec<DualCut>,
    /// Duals of the opposite-arc pair rows; kept at zero.
    pub lambda: Vec<f64>,
    pub reduced_cost: Vec<f64>,
    pub lower_bound: f64,
    pub iterations: usize,
    pub strategy: Strategy,
}

impl DualSolution {
    /// True when no reduced cost is negative.
    pub fn is_feasible(&self) -> bool {
        self.reduced_cost.iter().all(|&r| r >= -FIX_EPS)
    }

    /// Canonical cuts of the strictly positive duals.
    pub fn positive_cuts(&self, inst: &Instance) -> Vec<Cut> {
        let mut cuts: Vec<Cut> =
            self.cuts.iter().filter(|c| c.value > 0.0).filter_map(|c| Cut::for_set(inst, &c.set)).collect();
        cuts.sort();
        cuts.dedup();
        cuts
    }

    /// Reduced costs recomputed from the cut duals; used to audit the incremental values.
    pub fn recompute_reduced_costs(&self, inst: &Instance) -> Vec<f64> {
        let n = inst.len();
        let mut rc: Vec<f64> = (0..inst.arc_count()).map(|a| inst.arc_cost(a)).collect();
        for c in &self.cuts {
            let mut member = vec![false; n];
            for &v in &c.set {
                member[v] = true;
            }
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let crosses = match c.orientation {
                        Orientation::Out => member[i] && !member[j],
                        Orientation::In => !member[i] && member[j],
                    };
                    if crosses {
                        rc[inst.arc_index(i, j)] -= c.value;
                    }
                }
            }
        }
        rc
    }
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

fn start(inst: &Instance, strategy: Strategy) -> DualSolution {
    let m = inst.arc_count();
    DualSolution {
        cuts: Vec::new(),
        lambda: vec![0.0; m],
        reduced_cost: (0..m).map(|a| inst.arc_cost(a)).collect(),
        lower_bound: 0.0,
        iterations: 0,
        strategy,
    }
}

/// Continues ascent from a feasible dual until every saturated component is balanced.
fn ascend(inst: &Instance, mut ds: DualSolution, rng: &mut rng::Rng) -> DualSolution {
    let n = inst.len();
    let m = inst.arc_count();
    let mut index: HashMap<(Vec<usize>, Orientation), usize> =
        ds.cuts.iter().enumerate().map(|(k, c)| ((c.set.clone(), c.orientation), k)).collect();
    loop {
        let mut parent: Vec<usize> = (0..n).collect();
        for a in 0..m {
            if ds.reduced_cost[a] <= SAT_EPS {
                let (i, j) = inst.arc_endpoints(a);
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
        let root: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
        let mut charge = vec![0i32; n];
        for v in 0..n {
            charge[root[v]] += inst.charge(v);
        }
        // roots are component minima, so ascending order is by smallest member
        let violated: Vec<usize> = (0..n).filter(|&r| root[r] == r && charge[r] != 0).collect();
        if violated.is_empty() {
            break;
        }
        let mut best = vec![(f64::INFINITY, usize::MAX); n];
        for a in 0..m {
            let (i, j) = inst.arc_endpoints(a);
            let (ri, rj) = (root[i], root[j]);
            if ri == rj {
                continue;
            }
            let rc = ds.reduced_cost[a];
            if charge[ri] > 0 && rc < best[ri].0 {
                best[ri] = (rc, a);
            }
            if charge[rj] < 0 && rc < best[rj].0 {
                best[rj] = (rc, a);
            }
        }
        let chosen = match ds.strategy {
            Strategy::MinRc => {
                *violated.iter().min_by(|&&a, &&b| best[a].0.total_cmp(&best[b].0).then(a.cmp(&b))).unwrap()
            }
            Strategy::Random => violated[rng.gen_range(0..violated.len())],
        };
        let delta = best[chosen].0;
        if !delta.is_finite() {
            break;
        }
        let orientation = if charge[chosen] > 0 { Orientation::Out } else { Orientation::In };
        let set: Vec<usize> = (0..n).filter(|&v| root[v] == chosen).collect();
        for a in 0..m {
            let (i, j) = inst.arc_endpoints(a);
            let crosses = match orientation {
                Orientation::Out => root[i] == chosen && root[j] != chosen,
                Orientation::In => root[i] != chosen && root[j] == chosen,
            };
            if crosses {
                ds.reduced_cost[a] = (ds.reduced_cost[a] - delta).max(0.0);
            }
        }
        ds.reduced_cost[best[chosen].1] = 0.0;
        match index.get(&(set.clone(), orientation)) {
            Some(&k) => ds.cuts[k].value += delta,
            None => {
                index.insert((set.clone(), orientation), ds.cuts.len());
                ds.cuts.push(DualCut { set, orientation, value: delta });
            }
        }
        ds.lower_bound += delta;
        ds.iterations += 1;
        debug_assert!(ds.is_feasible());
    }
    ds
}

fn strategy_stream(strategy: Strategy) -> u64 {
    match strategy {
        Strategy::MinRc => 0x4441_0001,
        Strategy::Random => 0x4441_0002,
    }
}

/// Runs dual ascent from `π = 0`.
pub fn dual_ascent(inst: &Instance, strategy: Strategy, seed: u64) -> DualSolution {
    let mut rng = rng::stream(seed, strategy_stream(strategy));
    ascend(inst, start(inst, strategy), &mut rng)
}

/// Scales all duals by `alpha` and re-ascends, up to `it_ds` times.
///
/// Each trial starts from the previous trial's dual. Returns the first trial
/// whose bound beats `ds`, or `ds` itself when none does.
pub fn dual_scaling(inst: &Instance, ds: &DualSolution, alpha: f64, it_ds: usize, seed: u64) -> Result<DualSolution> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::arg(format!("scaling factor must lie in (0, 1), got {alpha}")));
    }
    if it_ds == 0 {
        return Err(Error::arg("at least one scaling trial is required"));
    }
    let mut rng = rng::stream(seed, strategy_stream(ds.strategy) + 0x100);
    let mut cur = ds.clone();
    for _ in 0..it_ds {
        let mut scaled = cur.clone();
        for c in &mut scaled.cuts {
            c.value *= alpha;
        }
        for (a, rc) in scaled.reduced_cost.iter_mut().enumerate() {
            let d = inst.arc_cost(a);
            *rc = ((1.0 - alpha) * d + alpha * *rc).max(0.0);
        }
        scaled.lower_bound = scaled.cuts.iter().map(|c| c.value).sum();
        let trial = ascend(inst, scaled, &mut rng);
        if trial.lower_bound > ds.lower_bound + crate::model::COST_EPS {
            return Ok(trial);
        }
        cur = trial;
    }
    Ok(ds.clone())
}

/// Arcs whose reduced cost exceeds the optimality gap; no optimal solution uses them.
pub fn fix_by_reduced_cost(ds: &DualSolution, upper_bound: f64) -> Result<Vec<usize>> {
    if upper_bound < ds.lower_bound - FIX_EPS {
        return Err(Error::arg(format!("upper bound {upper_bound} is below the lower bound {}", ds.lower_bound)));
    }
    let gap = upper_bound - ds.lower_bound + FIX_EPS;
    Ok(ds.reduced_cost.iter().enumerate().filter(|&(_, &rc)| rc > gap).map(|(a, _)| a).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::generate_puc;
    use crate::model::Vertex;

    fn pair(d: f64) -> Instance {
        let v = |id, x, charge| Vertex { id, x, y: 0.0, charge, is_border: false };
        Instance::new("pair", vec![v(0, 0.0, 1), v(1, d, -1)], vec![f64::INFINITY; 2]).unwrap()
    }

    #[test]
    fn pair_bound_is_distance() {
        for s in [Strategy::MinRc, Strategy::Random] {
            let ds = dual_ascent(&pair(5.0), s, 1);
            assert!((ds.lower_bound - 5.0).abs() < 1e-12);
            assert_eq!(ds.iterations, 1);
        }
    }

    #[test]
    fn zero_cost_pair_needs_no_iteration() {
        let ds = dual_ascent(&pair(0.0), Strategy::MinRc, 1);
        assert_eq!(ds.lower_bound, 0.0);
        assert_eq!(ds.iterations, 0);
    }

    #[test]
    fn ascent_is_feasible_and_bounded_in_iterations() {
        for seed in 0..10 {
            let inst = generate_puc(16, seed).unwrap();
            for s in [Strategy::MinRc, Strategy::Random] {
                let ds = dual_ascent(&inst, s, seed);
                assert!(ds.is_feasible());
                assert!(ds.iterations < inst.len());
                let sum: f64 = ds.cuts.iter().map(|c| c.value).sum();
                assert!((sum - ds.lower_bound).abs() < 1e-9);
                let rc = ds.recompute_reduced_costs(&inst);
                for (a, b) in rc.iter().zip(&ds.reduced_cost) {
                    assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn scaling_keeps_feasibility() {
        let inst = generate_puc(20, 3).unwrap();
        let ds = dual_ascent(&inst, Strategy::Random, 3);
        let sc = dual_scaling(&inst, &ds, 0.9, 10, 3).unwrap();
        assert!(sc.lower_bound >= ds.lower_bound);
        assert!(sc.is_feasible());
        let rc = sc.recompute_reduced_costs(&inst);
        for (a, b) in rc.iter().zip(&sc.reduced_cost) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(dual_scaling(&inst, &ds, 1.0, 10, 3).is_err());
    }

    #[test]
    fn fixing_thresholds() {
        let inst = generate_puc(10, 2).unwrap();
        let ds = dual_ascent(&inst, Strategy::MinRc, 0);
        assert!(fix_by_reduced_cost(&ds, f64::INFINITY).unwrap().is_empty());
        let all = fix_by_reduced_cost(&ds, ds.lower_bound).unwrap();
        let positive = ds.reduced_cost.iter().filter(|&&r| r > FIX_EPS).count();
        assert_eq!(all.len(), positive);
        assert!(fix_by_reduced_cost(&ds, ds.lower_bound - 1.0).is_err());
    }
}
