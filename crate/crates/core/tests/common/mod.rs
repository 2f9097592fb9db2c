//! Independent brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use phaseforest::Instance;

/// Kruskal over the complete subgraph on `comp` using a plain edge sort.
pub fn kruskal(inst: &Instance, comp: &[usize]) -> f64 {
    let mut edges = Vec::new();
    for (p, &i) in comp.iter().enumerate() {
        for &j in &comp[p + 1..] {
            edges.push((inst.distance(i, j).unwrap(), i, j));
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut label: Vec<usize> = (0..inst.len()).collect();
    let mut total = 0.0;
    for (d, i, j) in edges {
        let (a, b) = (label[i], label[j]);
        if a != b {
            total += d;
            for l in label.iter_mut() {
                if *l == b {
                    *l = a;
                }
            }
        }
    }
    total
}

/// Optimal balanced-forest cost by dynamic programming over vertex subsets.
pub fn oracle_optimum(inst: &Instance) -> f64 {
    let n = inst.len();
    assert!(n <= 16, "oracle limited to 16 vertices");
    let full = (1usize << n) - 1;
    let mut block = vec![f64::INFINITY; full + 1];
    for mask in 1..=full {
        let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let w: i32 = members.iter().map(|&v| inst.charge(v)).sum();
        if w == 0 {
            block[mask] = kruskal(inst, &members);
        }
    }
    let mut best = vec![f64::INFINITY; full + 1];
    best[0] = 0.0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        // enumerate subsets of rest, each joined with the lowest vertex
        let mut sub = rest;
        loop {
            let b = sub | low;
            if block[b].is_finite() {
                let cand = block[b] + best[mask ^ b];
                if cand < best[mask] {
                    best[mask] = cand;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    best[full]
}

/// Spanning-tree cost by enumerating all Prüfer sequences.
pub fn enumerate_spanning_trees(inst: &Instance, comp: &[usize]) -> (usize, f64) {
    let k = comp.len();
    if k < 2 {
        return (1, 0.0);
    }
    if k == 2 {
        return (1, inst.distance(comp[0], comp[1]).unwrap());
    }
    let total = k.pow((k - 2) as u32);
    let mut best = f64::INFINITY;
    for code in 0..total {
        let mut seq = Vec::with_capacity(k - 2);
        let mut c = code;
        for _ in 0..k - 2 {
            seq.push(c % k);
            c /= k;
        }
        let mut degree = vec![1usize; k];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut cost = 0.0;
        for &s in &seq {
            let leaf = (0..k).find(|&v| degree[v] == 1).unwrap();
            cost += inst.distance(comp[leaf], comp[s]).unwrap();
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..k).filter(|&v| degree[v] == 1).collect();
        cost += inst.distance(comp[rest[0]], comp[rest[1]]).unwrap();
        best = best.min(cost);
    }
    (total, best)
}

/// Every positive-charge subset whose out-arc sum is below `1 - tol`, as sorted vertex lists.
pub fn violated_subsets(inst: &Instance, x: &[f64], tol: f64) -> Vec<Vec<usize>> {
    let n = inst.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        let inside: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let w: i32 = inside.iter().map(|&v| inst.charge(v)).sum();
        if w <= 0 {
            continue;
        }
        let mut lhs = 0.0;
        for &i in &inside {
            for j in (0..n).filter(|&v| mask >> v & 1 == 0) {
                lhs += x[inst.arc_index(i, j)];
            }
        }
        if lhs < 1.0 - tol {
            out.push(inside);
        }
    }
    out.sort();
    out
}

/// Minimum assignment cost by trying every permutation.
pub fn brute_assignment(cost: &[Vec<f64>]) -> f64 {
    fn rec(cost: &[Vec<f64>], row: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if row == cost.len() {
            *best = best.min(acc);
            return;
        }
        for c in 0..cost.len() {
            if !used[c] {
                used[c] = true;
                rec(cost, row + 1, used, acc + cost[row][c], best);
                used[c] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(cost, 0, &mut vec![false; cost.len()], 0.0, &mut best);
    best
}

/// The oracle instance family: ten seeds for each of n = 4, 6, 8, 10, 12.
pub fn oracle_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for n in [4, 6, 8, 10, 12] {
        for seed in 0..10 {
            out.push(phaseforest::generate_puc(n, 1000 + seed).unwrap());
        }
    }
    out
}
