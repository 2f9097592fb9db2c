//! Cut relaxations of the forest problem solved to optimality by lazy separation.
//!
//! Instances with at most [`EXACT_SEPARATION_LIMIT`] vertices are separated by
//! enumerating every vertex subset, so the returned value is the exact optimum
//! of the relaxation. Larger instances fall back to max-flow separation, which
//! can stop early and then yields a weaker (still valid) bound.

use std::collections::HashSet;

use crate::bc::cuts::{separate, separate_exhaustive, support_components, Cut, SUPPORT_EPS};
use crate::bc::flow::FlowNetwork;
use crate::error::{Error, Result};
use crate::lp::{LpModel, LpStatus, Row, Sense, CUT_TOL};
use crate::model::Instance;

pub const EXACT_SEPARATION_LIMIT: usize = 16;
/// Rows added per exhaustive separation round.
const ROUND_LIMIT: usize = 30;

fn optimum(lp: &mut LpModel) -> Result<(f64, Vec<f64>)> {
    let s = lp.solve()?;
    match s.status {
        LpStatus::Optimal => Ok((s.objective, s.x)),
        other => Err(Error::Lp(format!("relaxation ended {other:?}"))),
    }
}

/// Optimum of the directed cut relaxation with opposite-arc pair rows.
pub fn lp_bound_directed(inst: &Instance) -> Result<f64> {
    let n = inst.len();
    let arcs = inst.arc_count();
    let column_of: Vec<Option<usize>> = (0..arcs).map(Some).collect();
    let mut lp = LpModel::new(arcs);
    for a in 0..arcs {
        lp.set_objective(a, inst.arc_cost(a));
    }
    let mut pool: HashSet<Cut> = HashSet::new();
    let mut rows = Vec::new();
    for v in 0..n {
        if let Some(c) = Cut::for_set(inst, &[v]) {
            if pool.insert(c.clone()) {
                rows.push(c.row(inst, &column_of));
            }
        }
    }
    lp.add_rows(rows);
    let mut pairs = HashSet::new();
    loop {
        let (obj, x) = optimum(&mut lp)?;
        let cuts =
            if n <= EXACT_SEPARATION_LIMIT { separate_exhaustive(inst, &x, ROUND_LIMIT) } else { separate(inst, &x) };
        let mut rows = Vec::new();
        for c in cuts {
            if c.value(inst, &x) < 1.0 - CUT_TOL && pool.insert(c.clone()) {
                rows.push(c.row(inst, &column_of));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (inst.arc_index(i, j), inst.arc_index(j, i));
                if x[a] + x[b] > 1.0 + CUT_TOL && pairs.insert((i, j)) {
                    rows.push(Row::new(vec![(a, 1.0), (b, 1.0)], Sense::Le, 1.0));
                }
            }
        }
        if rows.is_empty() {
            return Ok(obj);
        }
        lp.add_rows(rows);
    }
}

/// Index of undirected edge `{i, j}`, `i < j`, in row-major upper-triangular order.
fn edge_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

fn undirected_row(n: usize, member: &[bool]) -> Row {
    let mut vars = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if member[i] != member[j] {
                vars.push(edge_index(n, i, j));
            }
        }
    }
    Row::cover(vars)
}

fn undirected_value(n: usize, member: &[bool], x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            if member[i] != member[j] {
                s += x[edge_index(n, i, j)];
            }
        }
    }
    s
}

fn canonical_mask(n: usize, member: &[bool]) -> Vec<bool> {
    // store the side that excludes the last vertex
    if member[n - 1] {
        member.iter().map(|&m| !m).collect()
    } else {
        member.to_vec()
    }
}

fn separate_undirected(inst: &Instance, x: &[f64]) -> Vec<Vec<bool>> {
    let n = inst.len();
    let charge_of = |m: &[bool]| -> i32 { (0..n).filter(|&v| m[v]).map(|v| inst.charge(v)).sum() };
    if n <= EXACT_SEPARATION_LIMIT {
        let mut scored = Vec::new();
        for mask in 1u32..(1 << (n - 1)) {
            let member: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
            if charge_of(&member) == 0 {
                continue;
            }
            let val = undirected_value(n, &member, x);
            if val < 1.0 - CUT_TOL {
                scored.push((val, member));
            }
        }
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        scored.truncate(ROUND_LIMIT);
        return scored.into_iter().map(|(_, m)| m).collect();
    }
    // support components of the symmetric point
    let mut arc_x = vec![0.0; inst.arc_count()];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = x[edge_index(n, i, j)];
            arc_x[inst.arc_index(i, j)] = v;
        }
    }
    let mut out = Vec::new();
    for comp in support_components(inst, &arc_x) {
        let mut member = vec![false; n];
        for &v in &comp {
            member[v] = true;
        }
        if charge_of(&member) != 0 {
            out.push(canonical_mask(n, &member));
            continue;
        }
        let k = comp.len();
        let mut net = FlowNetwork::new(k);
        for p in 0..k {
            for q in (p + 1)..k {
                let v = x[edge_index(n, comp[p], comp[q])];
                if v > SUPPORT_EPS {
                    net.add_arc(p, q, v);
                    net.add_arc(q, p, v);
                }
            }
        }
        let mut work = vec![(0..k).collect::<Vec<_>>()];
        while let Some(part) = work.pop() {
            let Some(&s) = part.iter().find(|&&p| inst.charge(comp[p]) > 0) else { continue };
            let Some(&t) = part.iter().find(|&&p| inst.charge(comp[p]) < 0) else { continue };
            let f = net.max_flow(s, t);
            if f.value < 1.0 - CUT_TOL {
                for side in [&f.source_side, &f.max_source_side] {
                    let mut m = vec![false; n];
                    for p in 0..k {
                        m[comp[p]] = side[p];
                    }
                    if charge_of(&m) != 0 {
                        out.push(canonical_mask(n, &m));
                    }
                }
            }
            let (a, b): (Vec<usize>, Vec<usize>) = part.iter().partition(|&&p| f.source_side[p]);
            work.push(a);
            work.push(b);
        }
    }
    out
}

/// Optimum of the undirected cut relaxation `x(δ(S)) >= 1` for every unbalanced `S`.
pub fn lp_bound_undirected(inst: &Instance) -> Result<f64> {
    let n = inst.len();
    if n < 2 {
        return Ok(0.0);
    }
    let edges = n * (n - 1) / 2;
    let mut lp = LpModel::new(edges);
    for i in 0..n {
        for j in (i + 1)..n {
            lp.set_objective(edge_index(n, i, j), inst.d(i, j));
        }
    }
    let mut pool: HashSet<Vec<bool>> = HashSet::new();
    let mut rows = Vec::new();
    for v in 0..n {
        let mut m = vec![false; n];
        m[v] = true;
        if pool.insert(canonical_mask(n, &m)) {
            rows.push(undirected_row(n, &m));
        }
    }
    lp.add_rows(rows);
    loop {
        let (obj, x) = optimum(&mut lp)?;
        let mut rows = Vec::new();
        for m in separate_undirected(inst, &x) {
            if undirected_value(n, &m, &x) < 1.0 - CUT_TOL && pool.insert(m.clone()) {
                rows.push(undirected_row(n, &m));
            }
        }
        if rows.is_empty() {
            return Ok(obj);
        }
        lp.add_rows(rows);
    }
}
