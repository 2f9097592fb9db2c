//! Classical branch-cut placements: minimum-cost matching and Goldstein's growing boxes.

use crate::error::{Error, Result};
use crate::model::{ForestSolution, Instance, Tree, Vertex};
use crate::phase::ResidueMap;

/// Minimum-cost perfect assignment on a square cost matrix.
///
/// Shortest augmenting paths with row/column potentials, O(n^3). Returns the
/// column assigned to each row and the total cost.
pub fn assignment(cost: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = cost.len();
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    assert!(cost.iter().all(|row| row.len() == n), "cost matrix must be square");
    // 1-based with column 0 as the virtual source
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0; n];
    for j in 1..=n {
        col_of[owner[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| cost[i][col_of[i]]).sum();
    (col_of, total)
}

/// Pairs every positive vertex with a negative one at minimum total distance.
///
/// Border vertices take part like any other vertex, so border capacity is
/// exactly what the instance provides.
pub fn mcm(inst: &Instance) -> Result<ForestSolution> {
    let pos: Vec<usize> = (0..inst.len()).filter(|&v| inst.charge(v) > 0).collect();
    let neg: Vec<usize> = (0..inst.len()).filter(|&v| inst.charge(v) < 0).collect();
    if pos.len() != neg.len() {
        return Err(Error::arg(format!(
            "matching needs a balanced instance, got {} positive and {} negative vertices",
            pos.len(),
            neg.len()
        )));
    }
    let cost: Vec<Vec<f64>> = pos.iter().map(|&p| neg.iter().map(|&q| inst.d(p, q)).collect()).collect();
    let (col_of, total) = assignment(&cost);
    let trees = pos
        .iter()
        .zip(&col_of)
        .zip(&cost)
        .map(|((&p, &j), row)| Tree {
            vertices: vec![p, neg[j]],
            edges: vec![(p, neg[j])],
            charge: 0,
            cost: row[j],
            penalty: 0.0,
        })
        .collect();
    Ok(ForestSolution { trees, total_cost: total })
}

/// Goldstein's cuts together with the instance they live on.
///
/// Every border discharge adds border vertices, so the instance differs from
/// [`ResidueMap::instance`]. Tree costs are cut lengths, not MST costs.
#[derive(Debug, Clone)]
pub struct GoldsteinResult {
    pub instance: Instance,
    pub solution: ForestSolution,
}

/// Growing-box branch cuts: each residue in raster order seeds a set that
/// collects unclaimed residues within boxes of half-size 1, 2, ... around its
/// members until the charge cancels or a box reaches the image edge.
pub fn goldstein(residues: &ResidueMap, rows: usize, cols: usize) -> Result<GoldsteinResult> {
    if rows < 2 || cols < 2 {
        return Err(Error::arg(format!("image {rows}x{cols} has no residue loops")));
    }
    let (lr, lc) = (rows as i64 - 1, cols as i64 - 1);
    let mut at = vec![usize::MAX; (lr * lc) as usize];
    let mut loops = Vec::with_capacity(residues.len());
    for (k, res) in residues.residues.iter().enumerate() {
        let (r, c) = ((res.row - 0.5).round() as i64, (res.col - 0.5).round() as i64);
        if r < 0 || c < 0 || r >= lr || c >= lc {
            return Err(Error::arg(format!("residue {k} at ({}, {}) is outside the image", res.row, res.col)));
        }
        if at[(r * lc + c) as usize] != usize::MAX {
            return Err(Error::arg(format!("two residues share loop ({r}, {c})")));
        }
        at[(r * lc + c) as usize] = k;
        loops.push((r, c));
    }
    let mut order: Vec<usize> = (0..loops.len()).collect();
    order.sort_by_key(|&k| loops[k]);

    let charge = |k: usize| residues.residues[k].charge as i32;
    let mut claimed = vec![false; loops.len()];
    // (members, edges, border charge to discharge)
    let mut sets: Vec<(Vec<usize>, Vec<(usize, usize)>, Option<(usize, i32)>)> = Vec::new();
    for &seed in &order {
        if claimed[seed] {
            continue;
        }
        claimed[seed] = true;
        let mut members = vec![seed];
        let mut edges = Vec::new();
        let mut net = charge(seed);
        let mut border = None;
        let mut k = 1;
        'grow: while net != 0 {
            let mut idx = 0;
            while idx < members.len() {
                let m = members[idx];
                let (r, c) = loops[m];
                for rr in (r - k).max(0)..=(r + k).min(lr - 1) {
                    for cc in (c - k).max(0)..=(c + k).min(lc - 1) {
                        let other = at[(rr * lc + cc) as usize];
                        if other == usize::MAX || claimed[other] {
                            continue;
                        }
                        claimed[other] = true;
                        members.push(other);
                        edges.push((m, other));
                        net += charge(other);
                        if net == 0 {
                            break 'grow;
                        }
                    }
                }
                if r < k || c < k || r + k > lr - 1 || c + k > lc - 1 {
                    border = Some((m, net));
                    break 'grow;
                }
                idx += 1;
            }
            k += 1;
        }
        sets.push((members, edges, border));
    }

    let (max_x, max_y) = ((cols - 1) as f64, (rows - 1) as f64);
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut bd = Vec::new();
    for (k, res) in residues.residues.iter().enumerate() {
        vertices.push(Vertex { id: k, x: res.col, y: res.row, charge: res.charge, is_border: false });
        bd.push(res.col.min(res.row).min(max_x - res.col).min(max_y - res.row).max(0.0));
    }
    let mut shapes = Vec::with_capacity(sets.len());
    for (mut members, mut edges, border) in sets {
        if let Some((m, net)) = border {
            let mut prev = m;
            for _ in 0..net.unsigned_abs() {
                let id = vertices.len();
                vertices.push(Vertex { id, x: 0.0, y: 0.0, charge: -(net.signum() as i8), is_border: true });
                bd.push(0.0);
                members.push(id);
                edges.push((prev, id));
                prev = id;
            }
        }
        shapes.push((members, edges));
    }
    let instance = Instance::new("goldstein", vertices, bd)?;
    let mut total = 0.0;
    let trees = shapes
        .into_iter()
        .map(|(vertices, edges)| {
            let cost: f64 = edges.iter().map(|&(a, b)| instance.d(a, b)).sum();
            total += cost;
            Tree { vertices, edges, charge: 0, cost, penalty: 0.0 }
        })
        .collect();
    Ok(GoldsteinResult { instance, solution: ForestSolution { trees, total_cost: total } })
}
