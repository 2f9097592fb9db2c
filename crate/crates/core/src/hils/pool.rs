//! Column pool of recent local-minimum components and the set-partitioning step.

use std::collections::{HashSet, VecDeque};
use std::time::Instant;

use crate::lp::{LpModel, LpStatus, Row, Sense, INT_TOL};
use crate::model::{Instance, Partition, COST_EPS};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    /// Sorted vertex ids.
    pub vertices: Vec<usize>,
    pub cost: f64,
}

/// FIFO pool of distinct components, evicting the oldest beyond capacity.
#[derive(Debug, Clone)]
pub struct ColumnPool {
    capacity: usize,
    columns: VecDeque<Column>,
    seen: HashSet<Vec<usize>>,
}

impl ColumnPool {
    pub fn new(capacity: usize) -> Self {
        ColumnPool { capacity, columns: VecDeque::new(), seen: HashSet::new() }
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn columns(&self) -> impl Iterator<Item = &Column> {
        self.columns.iter()
    }

    /// Inserts a component; duplicates are ignored. Returns true when added.
    pub fn add(&mut self, mut vertices: Vec<usize>, cost: f64) -> bool {
        vertices.sort_unstable();
        if self.capacity == 0 || self.seen.contains(&vertices) {
            return false;
        }
        if self.columns.len() == self.capacity {
            if let Some(old) = self.columns.pop_front() {
                self.seen.remove(&old.vertices);
            }
        }
        self.seen.insert(vertices.clone());
        self.columns.push_back(Column { vertices, cost });
        true
    }

    pub fn contains(&self, vertices: &[usize]) -> bool {
        let mut v = vertices.to_vec();
        v.sort_unstable();
        self.seen.contains(&v)
    }
}

/// Best exact cover of `V` by pool columns, if cheaper than `incumbent_cost`.
///
/// Branch-and-bound over the LP relaxation: depth first, branching on the most
/// fractional column with the `x = 1` child first. Stops at the time limit
/// and returns the best cover found so far.
pub fn set_partitioning(
    inst: &Instance,
    pool: &ColumnPool,
    incumbent_cost: f64,
    time_limit_seconds: f64,
) -> Option<(Partition, f64)> {
    let started = Instant::now();
    let n = inst.len();
    let cols: Vec<&Column> = pool.columns().collect();
    let mut covered = vec![false; n];
    for c in &cols {
        for &v in &c.vertices {
            covered[v] = true;
        }
    }
    if cols.is_empty() || covered.iter().any(|&c| !c) {
        return None;
    }
    let mut lp = LpModel::new(cols.len());
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (p, c) in cols.iter().enumerate() {
        lp.set_objective(p, c.cost);
        for &v in &c.vertices {
            rows[v].push((p, 1.0));
        }
    }
    lp.add_rows(rows.into_iter().map(|r| Row::new(r, Sense::Eq, 1.0)));

    let mut best_cost = incumbent_cost;
    let mut best: Option<Vec<usize>> = None;
    let mut stack: Vec<(Vec<(usize, f64)>, f64)> = vec![(Vec::new(), f64::NEG_INFINITY)];
    let mut applied: Vec<(usize, f64)> = Vec::new();
    while let Some((fixings, bound)) = stack.pop() {
        if bound >= best_cost - COST_EPS {
            continue;
        }
        if started.elapsed().as_secs_f64() > time_limit_seconds {
            break;
        }
        for &(p, _) in &applied {
            lp.set_bounds(p, 0.0, 1.0);
        }
        for &(p, v) in &fixings {
            lp.set_bounds(p, v, v);
        }
        applied.clone_from(&fixings);
        let sol = match lp.solve() {
            Ok(s) => s,
            Err(_) => continue,
        };
        if sol.status != LpStatus::Optimal || sol.objective >= best_cost - COST_EPS {
            continue;
        }
        let frac = sol
            .x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > INT_TOL && v < 1.0 - INT_TOL)
            .min_by(|a, b| (a.1 - 0.5).abs().total_cmp(&(b.1 - 0.5).abs()).then(a.0.cmp(&b.0)))
            .map(|(p, _)| p);
        match frac {
            None => {
                let chosen: Vec<usize> = (0..cols.len()).filter(|&p| sol.x[p] > 0.5).collect();
                let cost: f64 = chosen.iter().map(|&p| cols[p].cost).sum();
                if cost < best_cost - COST_EPS {
                    best_cost = cost;
                    best = Some(chosen);
                }
            }
            Some(p) => {
                let mut zero = fixings.clone();
                zero.push((p, 0.0));
                let mut one = fixings;
                one.push((p, 1.0));
                stack.push((zero, sol.objective));
                stack.push((one, sol.objective));
            }
        }
    }
    best.map(|chosen| {
        let comps = chosen.iter().map(|&p| cols[p].vertices.clone()).collect();
        (Partition::new(comps), best_cost)
    })
}
