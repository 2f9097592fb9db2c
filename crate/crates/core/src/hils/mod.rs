//! Hybrid iterated local search over vertex partitions.
//!
//! A partition is scored by the MST cost of each component plus an imbalance
//! penalty. The search alternates local search, random perturbation of the
//! current or best partition, and a periodic set-partitioning step that
//! recombines components of recent local minima.

mod pool;
mod search;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng as _;

pub use pool::{set_partitioning, Column, ColumnPool};
pub use search::{
    break_tree, c_relocate, c_relocate_out, c_swap, improve_pair, insert1_break1, merge, relocate, swap, Closeness,
    Move, Neighborhood, IMPROVE_EPS,
};

use crate::error::{Error, Result};
use crate::model::{charge_of, component_mst, evaluate, ForestSolution, Instance, Partition};
use crate::rng::{self, Rng};
use search::{Memo, Working};

#[derive(Debug, Clone)]
pub struct HilsConfig {
    /// Consecutive non-improving iterations before stopping.
    pub it_max: usize,
    pub t_max_seconds: f64,
    /// Iterations between set-partitioning calls; `None` means `it_max / 3`.
    pub it_sp: Option<usize>,
    pub p_size: usize,
    pub sp_time_limit_seconds: f64,
    /// MST edges longer than this are cut in the initial solution; `None` means the average distance.
    pub d_max: Option<f64>,
    /// Closeness radius of a vertex is its nearest-neighbour distance divided by this.
    pub radius_fraction: f64,
    pub perturb_fraction: f64,
    /// Nearest same-component partners considered by the pair moves.
    pub close_candidates: usize,
    pub seed: u64,
}

impl Default for HilsConfig {
    fn default() -> Self {
        HilsConfig {
            it_max: 100,
            t_max_seconds: 3600.0,
            it_sp: None,
            p_size: 1000,
            sp_time_limit_seconds: 300.0,
            d_max: None,
            radius_fraction: 0.25,
            perturb_fraction: 0.15,
            close_candidates: 5,
            seed: 0,
        }
    }
}

impl HilsConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn effective_it_sp(&self) -> usize {
        self.it_sp.unwrap_or(self.it_max / 3)
    }

    pub fn validate(&self) -> Result<()> {
        let it_sp = self.effective_it_sp();
        if it_sp > self.it_max {
            return Err(Error::arg(format!("it_sp {it_sp} exceeds it_max {}", self.it_max)));
        }
        let positive = [
            ("t_max_seconds", self.t_max_seconds),
            ("sp_time_limit_seconds", self.sp_time_limit_seconds),
            ("radius_fraction", self.radius_fraction),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::arg(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&self.perturb_fraction) {
            return Err(Error::arg(format!("perturb_fraction must lie in [0, 1], got {}", self.perturb_fraction)));
        }
        if let Some(d) = self.d_max {
            if d.is_nan() || d < 0.0 {
                return Err(Error::arg(format!("d_max must be non-negative, got {d}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HilsResult {
    pub best: ForestSolution,
    pub iterations: usize,
    pub sp_calls: usize,
    pub sp_improvements: usize,
    /// Best cost after each iteration (non-increasing).
    pub history: Vec<f64>,
    pub elapsed_seconds: f64,
}

/// Smallest upper end of the perturbation range, so small forests still get shaken.
pub const MIN_PERTURB_EDGES: usize = 2;

/// Global MST with every edge longer than `d_max` removed.
pub fn initial_solution(inst: &Instance, d_max: f64) -> Partition {
    let n = inst.len();
    let all: Vec<usize> = (0..n).collect();
    let (edges, _) = component_mst(inst, &all);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for (u, v) in edges {
        if inst.d(u, v) <= d_max {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[slot[r]].push(v);
    }
    Partition::new(comps)
}

/// Local search from `p` to a local optimum of all seven neighbourhoods.
pub fn local_search(inst: &Instance, p: &Partition, cfg: &HilsConfig) -> Result<Partition> {
    p.validate(inst.len())?;
    let cl = Closeness::new(inst, cfg.radius_fraction, cfg.close_candidates);
    let mut w = Working::new(inst, p);
    let mut rng = rng::stream(cfg.seed, 0x4c53);
    search::local_search(inst, &cl, &mut w, &mut Memo::default(), &mut rng, None);
    Ok(w.partition())
}

/// Removes `k` random MST edges, then merges the resulting fragments in random pairs
/// taken from different source trees; a fragment left without such a partner stays alone.
///
/// `k` is uniform on `0..=max(floor(perturb_fraction * T), MIN_PERTURB_EDGES)` for `T` components.
pub fn perturb(inst: &Instance, p: &Partition, perturb_fraction: f64, rng: &mut Rng) -> Partition {
    let t = p.components.len();
    let k_max = ((perturb_fraction * t as f64).floor() as usize).max(MIN_PERTURB_EDGES);
    let k = rng.gen_range(0..=k_max);
    perturb_k(inst, p, k, rng)
}

/// Perturbation with a fixed number of removed edges.
pub fn perturb_k(inst: &Instance, p: &Partition, k: usize, rng: &mut Rng) -> Partition {
    if k == 0 {
        return p.clone();
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    // (component slot, edge) for every MST edge
    let mut trees: Vec<Vec<(usize, usize)>> = Vec::new();
    for c in &p.components {
        trees.push(component_mst(inst, c).0);
        comps.push(c.clone());
    }
    let mut all_edges: Vec<(usize, usize)> = Vec::new();
    for (s, e) in trees.iter().enumerate() {
        for idx in 0..e.len() {
            all_edges.push((s, idx));
        }
    }
    let k = k.min(all_edges.len());
    let removed: Vec<(usize, usize)> = all_edges.choose_multiple(rng, k).copied().collect();
    let mut fragments: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for (s, comp) in comps.into_iter().enumerate() {
        let cut: Vec<usize> = removed.iter().filter(|r| r.0 == s).map(|r| r.1).collect();
        if cut.is_empty() {
            kept.push(comp);
            continue;
        }
        // connected pieces of the tree minus the cut edges
        let edges: Vec<(usize, usize)> =
            trees[s].iter().enumerate().filter(|(i, _)| !cut.contains(i)).map(|(_, &e)| e).collect();
        let mut label: Vec<usize> = comp.clone();
        let pos = |v: usize| comp.iter().position(|&x| x == v).unwrap();
        let mut changed = true;
        while changed {
            changed = false;
            for &(u, v) in &edges {
                let (pu, pv) = (pos(u), pos(v));
                let l = label[pu].min(label[pv]);
                if label[pu] != l || label[pv] != l {
                    label[pu] = l;
                    label[pv] = l;
                    changed = true;
                }
            }
        }
        let mut roots: Vec<usize> = label.clone();
        roots.sort_unstable();
        roots.dedup();
        for r in roots {
            fragments.push((s, comp.iter().zip(&label).filter(|(_, &l)| l == r).map(|(&v, _)| v).collect()));
        }
    }
    // pair fragments across different source trees; unmatched ones stay apart
    fragments.shuffle(rng);
    while let Some((origin, mut a)) = fragments.pop() {
        if let Some(i) = fragments.iter().rposition(|f| f.0 != origin) {
            a.extend(fragments.swap_remove(i).1);
        }
        kept.push(a);
    }
    Partition::new(kept)
}

/// Joins every unbalanced component of an image-derived partition into one tree.
///
/// A residue reaches a border vertex at its border distance, which never exceeds
/// the component's penalty, so the joined tree costs at most the sum it replaces.
/// A balanced component holding a border vertex is added when no unbalanced one
/// has one. Other instances, and partitions without a border vertex, are returned unchanged.
pub fn repair_balance(inst: &Instance, p: &Partition) -> Partition {
    if !inst.is_image_derived() {
        return p.clone();
    }
    let has_border = |c: &Vec<usize>| c.iter().any(|&v| inst.vertex(v).is_border);
    let (mut bad, mut good): (Vec<Vec<usize>>, Vec<Vec<usize>>) =
        p.components.iter().cloned().partition(|c| charge_of(inst, c) != 0);
    if bad.is_empty() {
        return p.clone();
    }
    if !bad.iter().any(has_border) {
        let Some(i) = good.iter().position(has_border) else {
            return p.clone();
        };
        bad.push(good.swap_remove(i));
    }
    good.push(bad.concat());
    Partition::new(good)
}

/// Runs the hybrid iterated local search.
///
/// An unbalanced best partition is reported through `repair_balance` when that does not cost more.
pub fn run_hils(inst: &Instance, cfg: &HilsConfig) -> Result<HilsResult> {
    cfg.validate()?;
    let started = Instant::now();
    let deadline = started + Duration::from_secs_f64(cfg.t_max_seconds.min(1e9));
    let cl = Closeness::new(inst, cfg.radius_fraction, cfg.close_candidates);
    let mut rng = rng::stream(cfg.seed, 0x4849_4c53);
    let mut memo = Memo::default();
    let mut pool = ColumnPool::new(cfg.p_size);
    let it_sp = cfg.effective_it_sp();

    let d_max = cfg.d_max.unwrap_or_else(|| inst.average_distance());
    let mut w = Working::new(inst, &initial_solution(inst, d_max));
    search::local_search(inst, &cl, &mut w, &mut memo, &mut rng, Some(deadline));
    let mut best = w.clone();
    let mut history = Vec::new();
    let (mut it_shak, mut since_sp, mut iterations, mut sp_calls, mut sp_improvements) = (0, 0, 0, 0, 0);
    while it_shak < cfg.it_max && Instant::now() < deadline {
        search::local_search(inst, &cl, &mut w, &mut memo, &mut rng, Some(deadline));
        for c in &w.comps {
            pool.add(c.verts.clone(), c.cost);
        }
        if it_sp > 0 && since_sp == it_sp {
            since_sp = 0;
            sp_calls += 1;
            for c in &best.comps {
                pool.add(c.verts.clone(), c.cost);
            }
            let remaining = deadline.saturating_duration_since(Instant::now()).as_secs_f64();
            let limit = cfg.sp_time_limit_seconds.min(remaining);
            let reference = w.cost().min(best.cost());
            if let Some((p, _)) = set_partitioning(inst, &pool, reference, limit) {
                w = Working::new(inst, &p);
                sp_improvements += 1;
            }
        }
        if w.cost() < best.cost() - IMPROVE_EPS {
            best = w.clone();
            it_shak = 0;
        }
        history.push(best.cost());
        let base = if rng.gen_bool(0.5) { &w } else { &best };
        let p = perturb(inst, &base.partition(), cfg.perturb_fraction, &mut rng);
        w = Working::new(inst, &p);
        it_shak += 1;
        since_sp += 1;
        iterations += 1;
    }
    let mut best_sol = evaluate(inst, &best.partition())?;
    debug_assert!((best_sol.total_cost - best.cost()).abs() < 1e-6);
    if !best_sol.is_feasible() {
        let repaired = evaluate(inst, &repair_balance(inst, &best.partition()))?;
        if repaired.total_cost <= best_sol.total_cost + IMPROVE_EPS {
            best_sol = repaired;
        }
    }
    Ok(HilsResult {
        best: best_sol,
        iterations,
        sp_calls,
        sp_improvements,
        history,
        elapsed_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Best of `runs` independent runs seeded `cfg.seed, cfg.seed + 1, ...`, plus every run's result.
pub fn run_hils_multi(inst: &Instance, cfg: &HilsConfig, runs: usize) -> Result<(ForestSolution, Vec<HilsResult>)> {
    if runs == 0 {
        return Err(Error::arg("at least one run is required"));
    }
    let mut results = Vec::with_capacity(runs);
    for r in 0..runs {
        let c = cfg.clone().with_seed(cfg.seed.wrapping_add(r as u64));
        results.push(run_hils(inst, &c)?);
    }
    let best = results
        .iter()
        .map(|r| &r.best)
        .min_by(|a, b| (!a.is_feasible(), a.total_cost).partial_cmp(&(!b.is_feasible(), b.total_cost)).unwrap())
        .unwrap()
        .clone();
    Ok((best, results))
}
