//! Blocking-flow (Dinic) maximum flow on real capacities.

use std::collections::VecDeque;

const FLOW_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    n: usize,
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MaxFlow {
    pub value: f64,
    /// Vertices reachable from the source in the final residual graph (smallest min cut).
    pub source_side: Vec<bool>,
    /// Vertices that cannot reach the sink in the residual graph (largest min cut).
    pub max_source_side: Vec<bool>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork { n, adj: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn add_arc(&mut self, u: usize, v: usize, cap: f64) {
        assert!(u < self.n && v < self.n, "arc endpoint out of range");
        assert!(cap >= 0.0 && cap.is_finite(), "capacity must be finite and non-negative");
        self.adj[u].push(self.to.len());
        self.to.push(v);
        self.cap.push(cap);
        self.adj[v].push(self.to.len());
        self.to.push(u);
        self.cap.push(0.0);
    }

    /// Capacity of the arcs leaving `side`.
    pub fn cut_capacity(&self, side: &[bool]) -> f64 {
        let mut total = 0.0;
        for e in (0..self.to.len()).step_by(2) {
            let u = self.to[e ^ 1];
            let v = self.to[e];
            if side[u] && !side[v] {
                total += self.cap[e];
            }
        }
        total
    }

    pub fn max_flow(&self, s: usize, t: usize) -> MaxFlow {
        assert!(s != t, "source equals sink");
        let mut res = self.cap.clone();
        let mut level = vec![usize::MAX; self.n];
        let mut next = vec![0usize; self.n];
        let mut value = 0.0;
        loop {
            level.fill(usize::MAX);
            level[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &e in &self.adj[u] {
                    let v = self.to[e];
                    if res[e] > FLOW_EPS && level[v] == usize::MAX {
                        level[v] = level[u] + 1;
                        q.push_back(v);
                    }
                }
            }
            if level[t] == usize::MAX {
                break;
            }
            next.fill(0);
            loop {
                let f = self.augment(s, t, f64::INFINITY, &mut res, &level, &mut next);
                if f <= FLOW_EPS {
                    break;
                }
                value += f;
            }
        }
        let source_side = self.reach(s, &res, false);
        let reaches_t = self.reach(t, &res, true);
        let max_source_side = reaches_t.iter().map(|&r| !r).collect();
        debug_assert!((self.cut_capacity(&source_side) - value).abs() < 1e-7);
        MaxFlow { value, source_side, max_source_side }
    }

    fn augment(&self, u: usize, t: usize, limit: f64, res: &mut [f64], level: &[usize], next: &mut [usize]) -> f64 {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let v = self.to[e];
            if res[e] > FLOW_EPS && level[v] == level[u] + 1 {
                let f = self.augment(v, t, limit.min(res[e]), res, level, next);
                if f > FLOW_EPS {
                    res[e] -= f;
                    res[e ^ 1] += f;
                    return f;
                }
            }
            next[u] += 1;
        }
        0.0
    }

    /// Forward reachability from `start` in the residual graph, or backward
    /// (vertices that can reach `start`) when `reverse` is set.
    fn reach(&self, start: usize, res: &[f64], reverse: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                // backward search walks residual arcs v -> u, i.e. the partner of e
                let r = if reverse { res[e ^ 1] } else { res[e] };
                if r > FLOW_EPS && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}
