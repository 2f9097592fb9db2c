//! Unbalanced directed cuts and their separation.
//!
//! A set `S` with positive charge needs a selected arc leaving it; a set with
//! negative charge needs one entering it. Entering `S` is leaving `V \ S`, so
//! every cut is stored in the out-arc form of its positive-charge side.

use std::collections::BTreeSet;

use crate::bc::flow::FlowNetwork;
use crate::lp::{Row, CUT_TOL};
use crate::model::Instance;

/// Support threshold for building the capacity graph.
pub const SUPPORT_EPS: f64 = 1e-9;

/// Directed cut `x(δ+(S)) >= 1` for a vertex set `S` of positive charge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    set: Vec<usize>,
}

impl Cut {
    /// Canonical cut required by `set`, or None when `set` is balanced, empty or everything.
    pub fn for_set(inst: &Instance, set: &[usize]) -> Option<Cut> {
        let n = inst.len();
        let mut member = vec![false; n];
        for &v in set {
            member[v] = true;
        }
        let size = member.iter().filter(|&&m| m).count();
        if size == 0 || size == n {
            return None;
        }
        let w: i32 = (0..n).filter(|&v| member[v]).map(|v| inst.charge(v)).sum();
        let side: Vec<usize> = match w.signum() {
            1 => (0..n).filter(|&v| member[v]).collect(),
            -1 => (0..n).filter(|&v| !member[v]).collect(),
            _ => return None,
        };
        Some(Cut { set: side })
    }

    /// Vertex set whose out-arcs form the cut (sorted, positive charge).
    pub fn set(&self) -> &[usize] {
        &self.set
    }

    pub fn membership(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.set {
            m[v] = true;
        }
        m
    }

    /// Arc indices leaving the set.
    pub fn arcs(&self, inst: &Instance) -> Vec<usize> {
        let n = inst.len();
        let m = self.membership(n);
        let mut out = Vec::new();
        for &i in &self.set {
            for j in 0..n {
                if !m[j] {
                    out.push(inst.arc_index(i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Left-hand side `x(δ+(S))` for an arc-indexed point.
    pub fn value(&self, inst: &Instance, x: &[f64]) -> f64 {
        self.arcs(inst).iter().map(|&a| x[a]).sum()
    }

    /// Covering row over LP columns; `column_of[a]` maps arcs to columns (None when removed).
    pub fn row(&self, inst: &Instance, column_of: &[Option<usize>]) -> Row {
        Row::cover(self.arcs(inst).into_iter().filter_map(|a| column_of[a]))
    }
}

fn components(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut comp = vec![usize::MAX; n];
    let mut out = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        comp[s] = id;
        let mut members = vec![s];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if comp[v] == usize::MAX {
                    comp[v] = id;
                    members.push(v);
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Weakly connected components of the support graph `{a : x_a > SUPPORT_EPS}`.
pub fn support_components(inst: &Instance, x: &[f64]) -> Vec<Vec<usize>> {
    let n = inst.len();
    let mut adj = vec![Vec::new(); n];
    for (a, &v) in x.iter().enumerate() {
        if v > SUPPORT_EPS {
            let (i, j) = inst.arc_endpoints(a);
            adj[i].push(j);
            adj[j].push(i);
        }
    }
    components(n, &adj)
}

/// Finds unbalanced directed cuts violated by `x` (arc-indexed, values in [0,1]).
///
/// Unbalanced support components are cut directly. Inside balanced components a
/// positive/negative pair is separated by max flow and both sides of every
/// violated minimum cut are emitted; the procedure then recurses on each side.
pub fn separate(inst: &Instance, x: &[f64]) -> Vec<Cut> {
    assert_eq!(x.len(), inst.arc_count(), "point length must equal the arc count");
    let mut found = BTreeSet::new();
    for comp in support_components(inst, x) {
        if let Some(cut) = Cut::for_set(inst, &comp) {
            found.insert(cut);
            continue;
        }
        if comp.len() < 2 {
            continue;
        }
        separate_component(inst, x, &comp, &mut found);
    }
    found.into_iter().collect()
}

fn separate_component(inst: &Instance, x: &[f64], comp: &[usize], found: &mut BTreeSet<Cut>) {
    let k = comp.len();
    let mut net = FlowNetwork::new(k);
    for (p, &i) in comp.iter().enumerate() {
        for (q, &j) in comp.iter().enumerate() {
            if p != q {
                let v = x[inst.arc_index(i, j)];
                if v > SUPPORT_EPS {
                    net.add_arc(p, q, v.min(1.0));
                }
            }
        }
    }
    let mut work: Vec<Vec<usize>> = vec![(0..k).collect()];
    while let Some(part) = work.pop() {
        let Some(&s) = part.iter().find(|&&p| inst.charge(comp[p]) > 0) else {
            continue;
        };
        let t = part
            .iter()
            .copied()
            .filter(|&p| inst.charge(comp[p]) < 0)
            .min_by(|&a, &b| inst.d(comp[s], comp[a]).total_cmp(&inst.d(comp[s], comp[b])).then(a.cmp(&b)));
        let Some(t) = t else {
            continue;
        };
        let flow = net.max_flow(s, t);
        if flow.value < 1.0 - CUT_TOL {
            for side in [&flow.source_side, &flow.max_source_side] {
                let inside: Vec<usize> = (0..k).filter(|&p| side[p]).map(|p| comp[p]).collect();
                let outside: Vec<usize> = (0..k).filter(|&p| !side[p]).map(|p| comp[p]).collect();
                for set in [inside, outside] {
                    if let Some(cut) = Cut::for_set(inst, &set) {
                        if cut.value(inst, x) < 1.0 - CUT_TOL {
                            found.insert(cut);
                        }
                    }
                }
            }
        }
        let side = &flow.source_side;
        let (a, b): (Vec<usize>, Vec<usize>) = part.iter().partition(|&&p| side[p]);
        debug_assert!(!a.is_empty() && !b.is_empty());
        work.push(b);
        work.push(a);
    }
}

/// Exact separation by enumerating every vertex subset; only for small instances.
pub fn separate_exhaustive(inst: &Instance, x: &[f64], limit: usize) -> Vec<Cut> {
    let n = inst.len();
    assert!(n <= 20, "exhaustive separation is limited to 20 vertices");
    let mut scored: Vec<(f64, Cut)> = Vec::new();
    let full = 1u32 << n;
    for mask in 1..full - 1 {
        let w: i32 = (0..n).filter(|&v| mask >> v & 1 == 1).map(|v| inst.charge(v)).sum();
        if w <= 0 {
            continue;
        }
        let mut lhs = 0.0;
        for i in (0..n).filter(|&v| mask >> v & 1 == 1) {
            for j in (0..n).filter(|&v| mask >> v & 1 == 0) {
                lhs += x[inst.arc_index(i, j)];
            }
        }
        if lhs < 1.0 - CUT_TOL {
            let set = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            scored.push((lhs, Cut { set }));
        }
    }
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    scored.truncate(limit);
    scored.into_iter().map(|(_, c)| c).collect()
}
