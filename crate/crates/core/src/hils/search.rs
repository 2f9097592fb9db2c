//! Local search over vertex partitions with seven neighbourhoods.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::SliceRandom;

use crate::model::{component_cost, component_mst, Instance, Partition};
use crate::rng::Rng;

/// Minimum cost decrease for a move to count as improving.
pub const IMPROVE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Neighborhood {
    Relocate,
    CRelocate,
    Swap,
    CSwap,
    Merge,
    Break,
    Insert1Break1,
}

#[derive(Debug, Clone)]
pub(crate) struct Comp {
    pub id: u64,
    pub verts: Vec<usize>,
    pub cost: f64,
}

/// An improving rewrite of one or two components.
#[derive(Debug, Clone)]
pub struct Move {
    pub kind: Neighborhood,
    /// Replacement components with their costs (empty parts dropped).
    pub parts: Vec<(Vec<usize>, f64)>,
    /// New cost minus old cost of the involved components.
    pub delta: f64,
}

pub(crate) fn set_cost(inst: &Instance, set: &[usize]) -> f64 {
    if set.is_empty() {
        0.0
    } else {
        component_cost(inst, set)
    }
}

/// Closeness structure: `near(u, v)` iff `d(u, v) <= max(r(u), r(v))`.
#[derive(Debug, Clone)]
pub struct Closeness {
    radius: Vec<f64>,
    candidates: usize,
}

impl Closeness {
    /// Radius of each vertex is its nearest-neighbour distance divided by `fraction`.
    pub fn new(inst: &Instance, fraction: f64, candidates: usize) -> Self {
        let n = inst.len();
        let radius = (0..n)
            .map(|u| {
                let nn = (0..n).filter(|&v| v != u).map(|v| inst.d(u, v)).fold(f64::INFINITY, f64::min);
                if nn.is_finite() {
                    nn / fraction
                } else {
                    0.0
                }
            })
            .collect();
        Closeness { radius, candidates }
    }

    /// Every pair counts as close.
    pub fn unrestricted(n: usize, candidates: usize) -> Self {
        Closeness { radius: vec![f64::INFINITY; n], candidates }
    }

    pub fn radius(&self, v: usize) -> f64 {
        self.radius[v]
    }

    #[inline]
    pub fn near(&self, inst: &Instance, u: usize, v: usize) -> bool {
        inst.d(u, v) <= self.radius[u].max(self.radius[v])
    }

    fn near_set(&self, inst: &Instance, v: usize, set: &[usize]) -> bool {
        set.iter().any(|&w| w != v && self.near(inst, v, w))
    }

    fn sets_near(&self, inst: &Instance, a: &[usize], b: &[usize]) -> bool {
        a.iter().any(|&u| self.near_set(inst, u, b))
    }

    /// Pairs `(u, u')` inside `set` with `u'` among the nearest `candidates` of `u`.
    fn close_pairs(&self, inst: &Instance, set: &[usize]) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &u in set {
            let mut others: Vec<usize> = set.iter().copied().filter(|&w| w != u).collect();
            others.sort_by(|&a, &b| inst.d(u, a).total_cmp(&inst.d(u, b)).then(a.cmp(&b)));
            for &w in others.iter().take(self.candidates) {
                out.push((u, w));
            }
        }
        out
    }
}

fn without(set: &[usize], skip: &[usize]) -> Vec<usize> {
    set.iter().copied().filter(|v| !skip.contains(v)).collect()
}

fn with(set: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut s = set.to_vec();
    s.extend_from_slice(extra);
    s
}

fn candidate(kind: Neighborhood, inst: &Instance, parts: Vec<Vec<usize>>, old: f64) -> Option<Move> {
    let parts: Vec<(Vec<usize>, f64)> = parts
        .into_iter()
        .filter(|p| !p.is_empty())
        .map(|p| {
            let c = set_cost(inst, &p);
            (p, c)
        })
        .collect();
    let new: f64 = parts.iter().map(|p| p.1).sum();
    let delta = new - old;
    (delta < -IMPROVE_EPS).then_some(Move { kind, parts, delta })
}

pub fn relocate(inst: &Instance, cl: &Closeness, a: &[usize], b: &[usize], old: f64) -> Option<Move> {
    for &v in a {
        if !cl.near_set(inst, v, b) {
            continue;
        }
        let m = candidate(Neighborhood::Relocate, inst, vec![without(a, &[v]), with(b, &[v])], old);
        if m.is_some() {
            return m;
        }
    }
    None
}

pub fn c_relocate(inst: &Instance, cl: &Closeness, a: &[usize], b: &[usize], old: f64) -> Option<Move> {
    if a.len() < 2 {
        return None;
    }
    for (u, w) in cl.close_pairs(inst, a) {
        if !cl.near_set(inst, u, b) {
            continue;
        }
        let m = candidate(Neighborhood::CRelocate, inst, vec![without(a, &[u, w]), with(b, &[u, w])], old);
        if m.is_some() {
            return m;
        }
    }
    None
}

pub fn swap(inst: &Instance, cl: &Closeness, a: &[usize], b: &[usize], old: f64) -> Option<Move> {
    for &u in a {
        if !cl.near_set(inst, u, b) {
            continue;
        }
        for &v in b {
            if inst.charge(u) != inst.charge(v) || !cl.near_set(inst, v, a) {
                continue;
            }
            let na = with(&without(a, &[u]), &[v]);
            let nb = with(&without(b, &[v]), &[u]);
            let m = candidate(Neighborhood::Swap, inst, vec![na, nb], old);
            if m.is_some() {
                return m;
            }
        }
    }
    None
}

/// C-Relocate with an empty target: a close opposite-charge pair leaves as its own tree.
pub fn c_relocate_out(inst: &Instance, cl: &Closeness, a: &[usize], old: f64) -> Option<Move> {
    if a.len() < 4 {
        return None;
    }
    for (u, w) in cl.close_pairs(inst, a) {
        if u > w || inst.charge(u) + inst.charge(w) != 0 {
            continue;
        }
        let m = candidate(Neighborhood::CRelocate, inst, vec![without(a, &[u, w]), vec![u, w]], old);
        if m.is_some() {
            return m;
        }
    }
    None
}

pub fn c_swap(inst: &Instance, cl: &Closeness, a: &[usize], b: &[usize], old: f64) -> Option<Move> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let pb = cl.close_pairs(inst, b);
    for (u, u2) in cl.close_pairs(inst, a) {
        if !cl.near_set(inst, u, b) {
            continue;
        }
        for &(v, v2) in &pb {
            if !cl.near_set(inst, v, a) {
                continue;
            }
            let na = with(&without(a, &[u, u2]), &[v, v2]);
            let nb = with(&without(b, &[v, v2]), &[u, u2]);
            let m = candidate(Neighborhood::CSwap, inst, vec![na, nb], old);
            if m.is_some() {
                return m;
            }
        }
    }
    None
}

pub fn merge(inst: &Instance, a: &[usize], b: &[usize], old: f64) -> Option<Move> {
    candidate(Neighborhood::Merge, inst, vec![with(a, b)], old)
}

/// Splits `set` along its MST with `edge` removed.
fn split(set: &[usize], edges: &[(usize, usize)], skip: usize) -> (Vec<usize>, Vec<usize>) {
    let (root, _) = edges[skip];
    let mut side = vec![root];
    let mut frontier = vec![root];
    let mut used = vec![false; edges.len()];
    used[skip] = true;
    while let Some(u) = frontier.pop() {
        for (k, &(p, q)) in edges.iter().enumerate() {
            if used[k] {
                continue;
            }
            let other = if p == u {
                q
            } else if q == u {
                p
            } else {
                continue;
            };
            used[k] = true;
            side.push(other);
            frontier.push(other);
        }
    }
    let rest = without(set, &side);
    let mut inside: Vec<usize> = set.iter().copied().filter(|v| side.contains(v)).collect();
    inside.shrink_to_fit();
    (inside, rest)
}

pub fn break_tree(inst: &Instance, a: &[usize], old: f64) -> Option<Move> {
    if a.len() < 2 {
        return None;
    }
    let (edges, _) = component_mst(inst, a);
    for k in 0..edges.len() {
        let (p, q) = split(a, &edges, k);
        let m = candidate(Neighborhood::Break, inst, vec![p, q], old);
        if m.is_some() {
            return m;
        }
    }
    break_at_border(inst, a, &edges, old)
}

/// Border vertices are interchangeable, so any assignment of the residue subtrees
/// to them gives a minimum spanning tree. These splits remove the border link of
/// a co-optimal tree where one subtree hangs from border vertex `b` alone.
fn break_at_border(inst: &Instance, a: &[usize], edges: &[(usize, usize)], old: f64) -> Option<Move> {
    let border: Vec<usize> = a.iter().copied().filter(|&v| inst.vertex(v).is_border).collect();
    if border.len() < 2 {
        return None;
    }
    let residues: Vec<usize> = a.iter().copied().filter(|&v| !inst.vertex(v).is_border).collect();
    let inner: Vec<(usize, usize)> =
        edges.iter().copied().filter(|&(p, q)| !inst.vertex(p).is_border && !inst.vertex(q).is_border).collect();
    let mut seen = vec![false; residues.len()];
    for start in 0..residues.len() {
        if seen[start] {
            continue;
        }
        let mut piece = vec![residues[start]];
        seen[start] = true;
        let mut k = 0;
        while k < piece.len() {
            let u = piece[k];
            for &(p, q) in &inner {
                let other = if p == u {
                    q
                } else if q == u {
                    p
                } else {
                    continue;
                };
                let pos = residues.iter().position(|&r| r == other).unwrap();
                if !seen[pos] {
                    seen[pos] = true;
                    piece.push(other);
                }
            }
            k += 1;
        }
        for &b in &border {
            let mut side = piece.clone();
            side.push(b);
            let rest = without(a, &side);
            let m = candidate(Neighborhood::Break, inst, vec![side, rest], old);
            if m.is_some() {
                return m;
            }
        }
    }
    None
}

pub fn insert1_break1(inst: &Instance, a: &[usize], b: &[usize], old: f64) -> Option<Move> {
    let merged = with(a, b);
    let (edges, _) = component_mst(inst, &merged);
    if edges.is_empty() {
        return None;
    }
    let mut longest = 0;
    for (k, &(p, q)) in edges.iter().enumerate() {
        let (lp, lq) = edges[longest];
        if inst.d(p, q) > inst.d(lp, lq) {
            longest = k;
        }
    }
    let (p, q) = split(&merged, &edges, longest);
    candidate(Neighborhood::Insert1Break1, inst, vec![p, q], old)
}

/// First improving move between two components, neighbourhoods in fixed order.
pub fn improve_pair(inst: &Instance, cl: &Closeness, a: &[usize], b: &[usize], old: f64) -> Option<Move> {
    relocate(inst, cl, a, b, old)
        .or_else(|| relocate(inst, cl, b, a, old))
        .or_else(|| c_relocate(inst, cl, a, b, old))
        .or_else(|| c_relocate(inst, cl, b, a, old))
        .or_else(|| swap(inst, cl, a, b, old))
        .or_else(|| c_swap(inst, cl, a, b, old))
        .or_else(|| merge(inst, a, b, old))
        .or_else(|| insert1_break1(inst, a, b, old))
}

/// Mutable partition with per-component costs and content-versioned ids.
#[derive(Debug, Clone)]
pub(crate) struct Working {
    pub comps: Vec<Comp>,
    next_id: u64,
}

impl Working {
    pub fn new(inst: &Instance, p: &Partition) -> Self {
        let mut w = Working { comps: Vec::new(), next_id: 0 };
        for c in &p.components {
            w.push(c.clone(), set_cost(inst, c));
        }
        w
    }

    fn push(&mut self, verts: Vec<usize>, cost: f64) {
        self.comps.push(Comp { id: self.next_id, verts, cost });
        self.next_id += 1;
    }

    pub fn cost(&self) -> f64 {
        self.comps.iter().map(|c| c.cost).sum()
    }

    pub fn partition(&self) -> Partition {
        Partition::new(self.comps.iter().map(|c| c.verts.clone()).collect())
    }

    fn apply(&mut self, slots: &[usize], mv: Move) {
        let mut slots = slots.to_vec();
        slots.sort_unstable_by(|a, b| b.cmp(a));
        for s in slots {
            self.comps.swap_remove(s);
        }
        for (verts, cost) in mv.parts {
            self.push(verts, cost);
        }
    }
}

/// Memo of component pairs (and singles) known to admit no improving move.
#[derive(Debug, Default)]
pub(crate) struct Memo {
    keys: HashSet<(u64, u64)>,
}

const MEMO_LIMIT: usize = 2_000_000;

impl Memo {
    fn check(&self, a: u64, b: u64) -> bool {
        self.keys.contains(&(a.min(b), a.max(b)))
    }

    fn insert(&mut self, a: u64, b: u64) {
        if self.keys.len() >= MEMO_LIMIT {
            self.keys.clear();
        }
        self.keys.insert((a.min(b), a.max(b)));
    }
}

#[derive(Clone, Copy)]
enum Item {
    Single(usize),
    Pair(usize, usize),
}

/// Applies improving moves until none remains or the deadline passes.
pub(crate) fn local_search(
    inst: &Instance,
    cl: &Closeness,
    w: &mut Working,
    memo: &mut Memo,
    rng: &mut Rng,
    deadline: Option<Instant>,
) {
    loop {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return;
        }
        let k = w.comps.len();
        let mut items = Vec::new();
        for i in 0..k {
            let id = w.comps[i].id;
            if w.comps[i].verts.len() >= 2 && !memo.check(id, id) {
                items.push(Item::Single(i));
            }
            for j in (i + 1)..k {
                if !memo.check(id, w.comps[j].id) {
                    items.push(Item::Pair(i, j));
                }
            }
        }
        items.shuffle(rng);
        let mut applied = false;
        for item in items {
            match item {
                Item::Single(i) => {
                    let c = &w.comps[i];
                    let mv = break_tree(inst, &c.verts, c.cost).or_else(|| c_relocate_out(inst, cl, &c.verts, c.cost));
                    match mv {
                        Some(mv) => {
                            w.apply(&[i], mv);
                            applied = true;
                            break;
                        }
                        None => memo.insert(c.id, c.id),
                    }
                }
                Item::Pair(i, j) => {
                    let (a, b) = (&w.comps[i], &w.comps[j]);
                    let mv = if cl.sets_near(inst, &a.verts, &b.verts) {
                        improve_pair(inst, cl, &a.verts, &b.verts, a.cost + b.cost)
                    } else {
                        None
                    };
                    match mv {
                        Some(mv) => {
                            w.apply(&[i, j], mv);
                            applied = true;
                            break;
                        }
                        None => memo.insert(a.id, b.id),
                    }
                }
            }
        }
        if !applied {
            return;
        }
    }
}
