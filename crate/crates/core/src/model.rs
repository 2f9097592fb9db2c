//! Instance and solution representations for balanced spanning forests.
//!
//! An [`Instance`] is a complete graph over charged vertices. Border vertices
//! stand in for the image boundary: two border vertices are at distance zero,
//! and a border vertex sits at `border_distance(i)` from any other vertex `i`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for cost comparisons.
pub const COST_EPS: f64 = 1e-9;

/// Instances up to this size keep a dense distance matrix.
const DENSE_DISTANCE_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub charge: i8,
    pub is_border: bool,
}

/// A charged point before border vertices are attached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChargedPoint {
    pub x: f64,
    pub y: f64,
    pub charge: i8,
}

#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    vertices: Vec<Vertex>,
    border_distance: Vec<f64>,
    fixed_penalty: f64,
    image_derived: bool,
    dense: Option<Vec<f64>>,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.vertices == other.vertices && self.border_distance == other.border_distance
    }
}

impl Instance {
    /// Builds and validates an instance. Vertex ids must equal their position.
    pub fn new(name: impl Into<String>, vertices: Vec<Vertex>, border_distance: Vec<f64>) -> Result<Self> {
        if vertices.len() != border_distance.len() {
            return Err(Error::Validation(format!(
                "{} vertices but {} border distances",
                vertices.len(),
                border_distance.len()
            )));
        }
        let mut total = 0i64;
        for (k, v) in vertices.iter().enumerate() {
            if v.id != k {
                return Err(Error::Validation(format!("vertex at position {k} has id {}", v.id)));
            }
            if v.charge != 1 && v.charge != -1 {
                return Err(Error::Validation(format!("vertex {k} has charge {}", v.charge)));
            }
            if !v.x.is_finite() || !v.y.is_finite() {
                return Err(Error::Validation(format!("vertex {k} has non-finite coordinates")));
            }
            let bd = border_distance[k];
            if bd.is_nan() || bd < 0.0 {
                return Err(Error::Validation(format!("vertex {k} has border distance {bd}")));
            }
            total += v.charge as i64;
        }
        if total != 0 {
            return Err(Error::Validation(format!("charges sum to {total}, expected 0")));
        }
        let mut inst = Instance {
            name: name.into(),
            vertices,
            border_distance,
            fixed_penalty: 0.0,
            image_derived: false,
            dense: None,
        };
        inst.image_derived =
            inst.vertices.iter().zip(&inst.border_distance).all(|(v, bd)| v.is_border || bd.is_finite());
        let n = inst.len();
        if n <= DENSE_DISTANCE_LIMIT {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = inst.raw_distance(i, j);
                    m[i * n + j] = d;
                    m[j * n + i] = d;
                }
            }
            inst.dense = Some(m);
        }
        let mut max_d: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = inst.d(i, j);
                if d.is_finite() {
                    max_d = max_d.max(d);
                }
            }
        }
        inst.fixed_penalty = max_d;
        Ok(inst)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn charge(&self, i: usize) -> i32 {
        self.vertices[i].charge as i32
    }

    pub fn border_distance(&self, i: usize) -> f64 {
        self.border_distance[i]
    }

    pub fn border_distances(&self) -> &[f64] {
        &self.border_distance
    }

    /// True when every non-border vertex has a finite distance to the image border.
    pub fn is_image_derived(&self) -> bool {
        self.image_derived
    }

    /// Penalty per unit of imbalance for abstract instances.
    pub fn fixed_penalty(&self) -> f64 {
        self.fixed_penalty
    }

    /// Checked edge cost between two distinct vertices.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        let n = self.len();
        if i >= n || j >= n {
            return Err(Error::arg(format!("vertex id out of range ({i}, {j}) for {n} vertices")));
        }
        if i == j {
            return Err(Error::arg(format!("distance requires distinct vertices, got {i} twice")));
        }
        Ok(self.d(i, j))
    }

    /// Unchecked edge cost, zero on the diagonal.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        match &self.dense {
            Some(m) => m[i * self.vertices.len() + j],
            None => self.raw_distance(i, j),
        }
    }

    fn raw_distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = (&self.vertices[i], &self.vertices[j]);
        match (a.is_border, b.is_border) {
            (true, true) => 0.0,
            (true, false) => self.border_distance[j],
            (false, true) => self.border_distance[i],
            (false, false) => (a.x - b.x).hypot(a.y - b.y),
        }
    }

    /// Number of arcs of the derived complete digraph.
    pub fn arc_count(&self) -> usize {
        let n = self.len();
        n * n.saturating_sub(1)
    }

    /// Index of arc `(i, j)`, `i != j`, in row-major order skipping the diagonal.
    #[inline]
    pub fn arc_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j);
        let n = self.len();
        i * (n - 1) + if j < i { j } else { j - 1 }
    }

    #[inline]
    pub fn arc_endpoints(&self, a: usize) -> (usize, usize) {
        let n1 = self.len() - 1;
        let i = a / n1;
        let r = a % n1;
        (i, if r < i { r } else { r + 1 })
    }

    pub fn arc_cost(&self, a: usize) -> f64 {
        let (i, j) = self.arc_endpoints(a);
        self.d(i, j)
    }

    /// Mean cost over all undirected edges.
    pub fn average_distance(&self) -> f64 {
        let n = self.len();
        if n < 2 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += self.d(i, j);
            }
        }
        s / (n * (n - 1) / 2) as f64
    }

    pub fn positive_count(&self) -> usize {
        self.vertices.iter().filter(|v| v.charge > 0).count()
    }
}

/// Attaches border vertices to a residue set extracted from a `width x height` image.
///
/// Border lines are `x = 0`, `y = 0`, `x = width - 1` and `y = height - 1`.
pub fn add_border_vertices(residues: &[ChargedPoint], width: usize, height: usize) -> Instance {
    assert!(width > 0 && height > 0, "image dimensions must be positive");
    let max_x = (width - 1) as f64;
    let max_y = (height - 1) as f64;
    with_border_rect(residues, max_x, max_y, "image").expect("residue charges are validated by construction")
}

/// Attaches border vertices for residues inside the rectangle `[0, max_x] x [0, max_y]`.
pub(crate) fn with_border_rect(residues: &[ChargedPoint], max_x: f64, max_y: f64, name: &str) -> Result<Instance> {
    let mut vertices = Vec::with_capacity(residues.len() + 2);
    let mut bd = Vec::with_capacity(residues.len() + 2);
    let mut w = 0i64;
    for (k, r) in residues.iter().enumerate() {
        if r.charge != 1 && r.charge != -1 {
            return Err(Error::arg(format!("residue {k} has charge {}", r.charge)));
        }
        w += r.charge as i64;
        vertices.push(Vertex { id: k, x: r.x, y: r.y, charge: r.charge, is_border: false });
        let d = r.x.min(r.y).min(max_x - r.x).min(max_y - r.y).max(0.0);
        bd.push(d);
    }
    let fill = -(w.signum() as i8);
    let mut charges: Vec<i8> = (0..w.unsigned_abs()).map(|_| fill).collect();
    charges.extend([1, -1]);
    for c in charges {
        let id = vertices.len();
        vertices.push(Vertex { id, x: 0.0, y: 0.0, charge: c, is_border: true });
        bd.push(0.0);
    }
    Instance::new(name, vertices, bd)
}

/// A partition of the vertex set into disjoint components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub components: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(components: Vec<Vec<usize>>) -> Self {
        Partition { components }
    }

    pub fn singletons(n: usize) -> Self {
        Partition::new((0..n).map(|i| vec![i]).collect())
    }

    /// Checks cover and disjointness over `0..n`; empty components are rejected.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for (k, comp) in self.components.iter().enumerate() {
            if comp.is_empty() {
                return Err(Error::arg(format!("component {k} is empty")));
            }
            for &v in comp {
                if v >= n {
                    return Err(Error::arg(format!("vertex {v} out of range in component {k}")));
                }
                if seen[v] {
                    return Err(Error::arg(format!("vertex {v} appears twice")));
                }
                seen[v] = true;
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::arg(format!("vertex {v} is not covered")));
        }
        Ok(())
    }

    /// Sorted copy with sorted components; used to compare partitions.
    pub fn canonical(&self) -> Partition {
        let mut comps: Vec<Vec<usize>> = self
            .components
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.sort_unstable();
                c
            })
            .collect();
        comps.sort();
        Partition::new(comps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub charge: i32,
    pub cost: f64,
    pub penalty: f64,
}

impl Tree {
    pub fn is_balanced(&self) -> bool {
        self.charge == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestSolution {
    pub trees: Vec<Tree>,
    pub total_cost: f64,
}

impl ForestSolution {
    pub fn partition(&self) -> Partition {
        Partition::new(self.trees.iter().map(|t| t.vertices.clone()).collect())
    }

    pub fn is_feasible(&self) -> bool {
        self.trees.iter().all(Tree::is_balanced)
    }

    pub fn total_penalty(&self) -> f64 {
        self.trees.iter().map(|t| t.penalty).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.trees.iter().map(|t| t.edges.len()).sum()
    }
}

/// Minimum spanning tree over the complete subgraph induced by `comp` (Prim, O(k^2)).
pub fn component_mst(inst: &Instance, comp: &[usize]) -> (Vec<(usize, usize)>, f64) {
    let k = comp.len();
    if k <= 1 {
        return (Vec::new(), 0.0);
    }
    let mut in_tree = vec![false; k];
    let mut key = vec![f64::INFINITY; k];
    let mut parent = vec![usize::MAX; k];
    key[0] = 0.0;
    let mut edges = Vec::with_capacity(k - 1);
    let mut cost = 0.0;
    for _ in 0..k {
        let mut best = usize::MAX;
        let mut best_key = f64::INFINITY;
        for t in 0..k {
            if !in_tree[t] && (best == usize::MAX || key[t] < best_key) {
                best = t;
                best_key = key[t];
            }
        }
        in_tree[best] = true;
        if parent[best] != usize::MAX {
            edges.push((comp[parent[best]], comp[best]));
            cost += best_key;
        }
        let u = comp[best];
        for t in 0..k {
            if !in_tree[t] {
                let d = inst.d(u, comp[t]);
                if d < key[t] {
                    key[t] = d;
                    parent[t] = best;
                }
            }
        }
    }
    (edges, cost)
}

/// Cost of the minimum spanning tree only.
pub fn mst_cost(inst: &Instance, comp: &[usize]) -> f64 {
    let k = comp.len();
    if k <= 1 {
        return 0.0;
    }
    if k == 2 {
        return inst.d(comp[0], comp[1]);
    }
    let mut in_tree = vec![false; k];
    let mut key = vec![f64::INFINITY; k];
    key[0] = 0.0;
    let mut cost = 0.0;
    for _ in 0..k {
        let mut best = usize::MAX;
        let mut best_key = f64::INFINITY;
        for t in 0..k {
            if !in_tree[t] && (best == usize::MAX || key[t] < best_key) {
                best = t;
                best_key = key[t];
            }
        }
        in_tree[best] = true;
        cost += best_key;
        let u = comp[best];
        for t in 0..k {
            if !in_tree[t] {
                let d = inst.d(u, comp[t]);
                if d < key[t] {
                    key[t] = d;
                }
            }
        }
    }
    cost
}

pub fn charge_of(inst: &Instance, comp: &[usize]) -> i32 {
    comp.iter().map(|&v| inst.charge(v)).sum()
}

/// Imbalance penalty of a component with net charge `charge`.
///
/// Image-derived instances charge the distance from the component's closest
/// residue to the border per unit of imbalance. Components made only of border
/// vertices, and abstract instances, use the instance's fixed penalty.
pub fn penalty(inst: &Instance, comp: &[usize], charge: i32) -> f64 {
    if charge == 0 {
        return 0.0;
    }
    let unit = if inst.is_image_derived() {
        comp.iter()
            .filter(|&&v| !inst.vertex(v).is_border)
            .map(|&v| inst.border_distance(v))
            .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
            .unwrap_or(inst.fixed_penalty())
    } else {
        inst.fixed_penalty()
    };
    charge.unsigned_abs() as f64 * unit
}

/// MST cost plus imbalance penalty.
pub fn component_cost(inst: &Instance, comp: &[usize]) -> f64 {
    mst_cost(inst, comp) + penalty(inst, comp, charge_of(inst, comp))
}

pub fn evaluate(inst: &Instance, p: &Partition) -> Result<ForestSolution> {
    p.validate(inst.len())?;
    let mut trees = Vec::with_capacity(p.components.len());
    let mut total = 0.0;
    for comp in &p.components {
        let (edges, cost) = component_mst(inst, comp);
        let charge = charge_of(inst, comp);
        let pen = penalty(inst, comp, charge);
        total += cost + pen;
        trees.push(Tree { vertices: comp.clone(), edges, charge, cost, penalty: pen });
    }
    Ok(ForestSolution { trees, total_cost: total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(id: usize, x: f64, y: f64, charge: i8) -> Vertex {
        Vertex { id, x, y, charge, is_border: false }
    }

    fn abstract_instance(pts: &[(f64, f64, i8)]) -> Instance {
        let vs = pts.iter().enumerate().map(|(k, &(x, y, c))| v(k, x, y, c)).collect();
        Instance::new("t", vs, vec![f64::INFINITY; pts.len()]).unwrap()
    }

    #[test]
    fn euclidean_distance() {
        let inst = abstract_instance(&[(0.0, 0.0, 1), (3.0, 4.0, -1)]);
        assert_eq!(inst.distance(0, 1).unwrap(), 5.0);
        assert_eq!(inst.distance(1, 0).unwrap(), 5.0);
    }

    #[test]
    fn border_distances() {
        let vs = vec![
            v(0, 5.0, 5.0, 1),
            Vertex { id: 1, x: 0.0, y: 0.0, charge: 1, is_border: true },
            Vertex { id: 2, x: 0.0, y: 0.0, charge: -1, is_border: true },
            v(3, 9.0, 9.0, -1),
        ];
        let inst = Instance::new("b", vs, vec![7.2, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(inst.distance(1, 2).unwrap(), 0.0);
        assert_eq!(inst.distance(0, 1).unwrap(), 7.2);
        assert_eq!(inst.distance(2, 0).unwrap(), 7.2);
    }

    #[test]
    fn distance_rejects_bad_ids() {
        let inst = abstract_instance(&[(0.0, 0.0, 1), (3.0, 4.0, -1)]);
        assert!(matches!(inst.distance(0, 2), Err(Error::InvalidArgument(_))));
        assert!(matches!(inst.distance(1, 1), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn unbalanced_instance_rejected() {
        let vs = vec![v(0, 0.0, 0.0, 1), v(1, 1.0, 0.0, 1)];
        assert!(matches!(Instance::new("x", vs, vec![1.0, 1.0]), Err(Error::Validation(_))));
    }

    #[test]
    fn arc_index_roundtrip() {
        let inst = abstract_instance(&[(0.0, 0.0, 1), (1.0, 0.0, -1), (2.0, 0.0, 1), (3.0, 0.0, -1)]);
        assert_eq!(inst.arc_count(), 12);
        let mut seen = [false; 12];
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let a = inst.arc_index(i, j);
                    assert!(!seen[a]);
                    seen[a] = true;
                    assert_eq!(inst.arc_endpoints(a), (i, j));
                }
            }
        }
    }

    #[test]
    fn mst_simple_cases() {
        let inst = abstract_instance(&[(0.0, 0.0, 1), (3.0, 4.0, -1)]);
        let (e, c) = component_mst(&inst, &[0, 1]);
        assert_eq!(e, vec![(0, 1)]);
        assert_eq!(c, 5.0);
        let (e, c) = component_mst(&inst, &[1]);
        assert!(e.is_empty());
        assert_eq!(c, 0.0);
    }

    #[test]
    fn evaluate_pairs_and_penalty() {
        let inst = abstract_instance(&[
            (0.0, 0.0, 1),
            (1.0, 0.0, -1),
            (10.0, 0.0, 1),
            (10.0, 2.0, -1),
            (20.0, 0.0, 1),
            (23.0, 4.0, -1),
        ]);
        let p = Partition::new(vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        let s = evaluate(&inst, &p).unwrap();
        assert!(s.is_feasible());
        assert!((s.total_cost - 8.0).abs() < 1e-12);
        assert_eq!(s.total_penalty(), 0.0);

        // {+,+} with fixed penalty P pays 2P on top of its edge.
        let p = Partition::new(vec![vec![0, 2], vec![1, 3], vec![4, 5]]);
        let s = evaluate(&inst, &p).unwrap();
        let big = inst.fixed_penalty();
        assert!((big - 23.0f64.hypot(4.0)).abs() < 1e-12);
        assert!((s.trees[0].penalty - 2.0 * big).abs() < 1e-12);
        assert!(!s.is_feasible());
    }

    #[test]
    fn evaluate_rejects_bad_partition() {
        let inst = abstract_instance(&[(0.0, 0.0, 1), (3.0, 4.0, -1)]);
        assert!(evaluate(&inst, &Partition::new(vec![vec![0]])).is_err());
        assert!(evaluate(&inst, &Partition::new(vec![vec![0, 1], vec![1]])).is_err());
    }

    #[test]
    fn border_vertices_balanced_input() {
        let res: Vec<ChargedPoint> = (0..8)
            .map(|k| ChargedPoint { x: 10.0 + k as f64, y: 20.0, charge: if k % 2 == 0 { 1 } else { -1 } })
            .collect();
        let inst = add_border_vertices(&res, 100, 100);
        assert_eq!(inst.len(), 10);
        assert_eq!(inst.arc_count(), 90);
    }

    #[test]
    fn border_vertices_unbalanced_input() {
        let res = vec![ChargedPoint { x: 5.0, y: 5.0, charge: 1 }, ChargedPoint { x: 7.0, y: 5.0, charge: 1 }];
        let inst = add_border_vertices(&res, 20, 20);
        assert_eq!(inst.len(), 6);
        let border: Vec<i8> = inst.vertices().iter().filter(|v| v.is_border).map(|v| v.charge).collect();
        assert_eq!(border, vec![-1, -1, 1, -1]);
        let total: i32 = (0..inst.len()).map(|i| inst.charge(i)).sum();
        assert_eq!(total, 0);
    }

    #[test]
    fn border_distance_convention() {
        let res = vec![ChargedPoint { x: 3.0, y: 10.0, charge: 1 }, ChargedPoint { x: 50.0, y: 50.0, charge: -1 }];
        let inst = add_border_vertices(&res, 100, 100);
        assert_eq!(inst.border_distance(0), 3.0);
        assert_eq!(inst.border_distance(1), 49.0);
    }
}
