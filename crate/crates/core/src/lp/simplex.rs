//! Bounded-variable simplex over a dense explicit basis inverse.
//!
//! Every row `a_i x (>=|<=|=) b_i` gets an activity variable `y_i = a_i x`
//! bounded by the row sense, so the constraint matrix is `[A | -I]` with a zero
//! right-hand side. The slack basis `B = -I` is dual feasible whenever every
//! structural variable sits at the bound matching the sign of its cost, which
//! is the normal state of the minimisation models built by the solvers here.
//! Reoptimisation after adding rows or changing bounds runs the dual simplex;
//! a primal pass removes any dual infeasibility left by refactorisation drift.

use std::fmt::Write as _;

use crate::error::{Error, Result};

pub const PRIMAL_TOL: f64 = 1e-7;
pub const DUAL_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;
const ARTIFICIAL_BOUND: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Row {
    pub fn new(coeffs: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> Self {
        Row { coeffs, sense, rhs }
    }

    /// Row `sum_{j in vars} x_j >= 1`.
    pub fn cover(vars: impl IntoIterator<Item = usize>) -> Self {
        Row::new(vars.into_iter().map(|j| (j, 1.0)).collect(), Sense::Ge, 1.0)
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row (0 when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Ge => (self.rhs - act).max(0.0),
            Sense::Le => (act - self.rhs).max(0.0),
            Sense::Eq => (act - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    /// One dual per row; non-negative on binding `>=` rows of a minimisation.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    Lower,
    Upper,
    Free,
}

/// Linear program `min c x` over bounded variables and sparse rows.
#[derive(Debug, Clone)]
pub struct LpModel {
    n: usize,
    obj: Vec<f64>,
    cols: Vec<Vec<(usize, f64)>>,
    rows: Vec<Row>,
    // bounds for n structurals followed by one activity variable per row
    lower: Vec<f64>,
    upper: Vec<f64>,
    // user bounds before artificial boxing
    user_lower: Vec<f64>,
    user_upper: Vec<f64>,
    state: Vec<VarState>,
    x: Vec<f64>,
    d: Vec<f64>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    has_basis: bool,
    dirty_primal: bool,
    since_refactor: usize,
    total_iterations: usize,
}

impl LpModel {
    /// `n` variables with zero cost and bounds `[0, 1]`.
    pub fn new(n: usize) -> Self {
        LpModel {
            n,
            obj: vec![0.0; n],
            cols: vec![Vec::new(); n],
            rows: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![1.0; n],
            user_lower: vec![0.0; n],
            user_upper: vec![1.0; n],
            state: vec![VarState::Lower; n],
            x: vec![0.0; n],
            d: vec![0.0; n],
            basis: Vec::new(),
            binv: Vec::new(),
            has_basis: false,
            dirty_primal: true,
            since_refactor: 0,
            total_iterations: 0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective_coeffs(&self) -> &[f64] {
        &self.obj
    }

    pub fn set_objective(&mut self, j: usize, c: f64) {
        assert!(c.is_finite(), "objective coefficient must be finite");
        self.obj[j] = c;
        // costs feed every reduced cost; rebuild from a slack basis
        self.has_basis = false;
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.user_lower[j], self.user_upper[j])
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        assert!(!lower.is_nan() && !upper.is_nan() && lower <= upper, "bad bounds [{lower}, {upper}]");
        self.user_lower[j] = lower;
        self.user_upper[j] = upper;
        self.lower[j] = lower;
        self.upper[j] = upper;
        if self.has_basis && self.state[j] != VarState::Basic {
            self.place_nonbasic(j);
            self.dirty_primal = true;
        }
    }

    /// Appends a row and returns its index. Coefficients must reference existing variables.
    pub fn add_row(&mut self, row: Row) -> usize {
        self.add_rows(std::iter::once(row));
        self.rows.len() - 1
    }

    pub fn add_rows(&mut self, rows: impl IntoIterator<Item = Row>) {
        let old_m = self.rows.len();
        for mut row in rows {
            row.coeffs.retain(|&(_, a)| a != 0.0);
            for &(j, a) in &row.coeffs {
                assert!(j < self.n, "row references variable {j} of {}", self.n);
                assert!(a.is_finite() && row.rhs.is_finite(), "row coefficients must be finite");
            }
            let i = self.rows.len();
            for &(j, a) in &row.coeffs {
                self.cols[j].push((i, a));
            }
            let (l, u) = match row.sense {
                Sense::Ge => (row.rhs, f64::INFINITY),
                Sense::Le => (f64::NEG_INFINITY, row.rhs),
                Sense::Eq => (row.rhs, row.rhs),
            };
            self.lower.push(l);
            self.upper.push(u);
            self.user_lower.push(l);
            self.user_upper.push(u);
            self.state.push(VarState::Basic);
            self.x.push(0.0);
            self.d.push(0.0);
            self.rows.push(row);
        }
        let new_m = self.rows.len();
        if new_m == old_m {
            return;
        }
        if !self.has_basis {
            return;
        }
        // B' = [[B, 0], [G, -I]]  =>  B'^-1 = [[B^-1, 0], [G B^-1, -I]]
        let mut binv = vec![0.0; new_m * new_m];
        for i in 0..old_m {
            binv[i * new_m..i * new_m + old_m].copy_from_slice(&self.binv[i * old_m..(i + 1) * old_m]);
        }
        let mut pos_of = vec![usize::MAX; self.n];
        for (p, &v) in self.basis.iter().enumerate() {
            if v < self.n {
                pos_of[v] = p;
            }
        }
        for r in old_m..new_m {
            let base = r * new_m;
            for &(j, a) in &self.rows[r].coeffs {
                let p = pos_of[j];
                if p != usize::MAX {
                    for k in 0..old_m {
                        binv[base + k] += a * self.binv[p * old_m + k];
                    }
                }
            }
            binv[base + r] = -1.0;
            let slack = self.n + r;
            self.basis.push(slack);
            self.x[slack] = self.rows[r].activity(&self.x[..self.n]);
        }
        self.binv = binv;
    }

    fn m(&self) -> usize {
        self.rows.len()
    }

    fn col_dot(&self, k: usize, v: &[f64]) -> f64 {
        if k < self.n {
            self.cols[k].iter().map(|&(i, a)| a * v[i]).sum()
        } else {
            -v[k - self.n]
        }
    }

    /// `B^-1 a_k`.
    fn ftran(&self, k: usize) -> Vec<f64> {
        let m = self.m();
        let mut w = vec![0.0; m];
        if k < self.n {
            for &(i, a) in &self.cols[k] {
                for (r, wr) in w.iter_mut().enumerate() {
                    *wr += self.binv[r * m + i] * a;
                }
            }
        } else {
            let i = k - self.n;
            for (r, wr) in w.iter_mut().enumerate() {
                *wr = -self.binv[r * m + i];
            }
        }
        w
    }

    fn place_nonbasic(&mut self, j: usize) {
        let (l, u) = (self.lower[j], self.upper[j]);
        let d = self.d[j];
        let st = if l == u {
            VarState::Lower
        } else if d > DUAL_TOL {
            if l.is_finite() {
                VarState::Lower
            } else {
                self.lower[j] = -ARTIFICIAL_BOUND;
                VarState::Lower
            }
        } else if d < -DUAL_TOL {
            if u.is_finite() {
                VarState::Upper
            } else {
                self.upper[j] = ARTIFICIAL_BOUND;
                VarState::Upper
            }
        } else {
            match self.state[j] {
                VarState::Upper if u.is_finite() => VarState::Upper,
                _ if l.is_finite() => VarState::Lower,
                _ if u.is_finite() => VarState::Upper,
                _ => VarState::Free,
            }
        };
        self.state[j] = st;
        self.x[j] = match st {
            VarState::Lower => self.lower[j],
            VarState::Upper => self.upper[j],
            VarState::Free => 0.0,
            VarState::Basic => unreachable!(),
        };
    }

    fn slack_basis(&mut self) {
        let m = self.m();
        let total = self.n + m;
        self.lower.clone_from(&self.user_lower);
        self.upper.clone_from(&self.user_upper);
        self.basis = (self.n..total).collect();
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            self.binv[i * m + i] = -1.0;
        }
        for j in 0..total {
            self.d[j] = if j < self.n { self.obj[j] } else { 0.0 };
        }
        for j in 0..self.n {
            self.state[j] = VarState::Lower;
            self.place_nonbasic(j);
        }
        for j in self.n..total {
            self.state[j] = VarState::Basic;
        }
        self.has_basis = true;
        self.dirty_primal = true;
        self.since_refactor = 0;
    }

    fn recompute_primal(&mut self) {
        let m = self.m();
        let mut rhs = vec![0.0; m];
        for j in 0..self.n + m {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let xj = self.x[j];
            if xj == 0.0 {
                continue;
            }
            if j < self.n {
                for &(i, a) in &self.cols[j] {
                    rhs[i] -= a * xj;
                }
            } else {
                rhs[j - self.n] += xj;
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            let v: f64 = row.iter().zip(&rhs).map(|(b, c)| b * c).sum();
            self.x[self.basis[r]] = v;
        }
        self.dirty_primal = false;
    }

    fn cost(&self, k: usize) -> f64 {
        if k < self.n {
            self.obj[k]
        } else {
            0.0
        }
    }

    fn row_duals(&self) -> Vec<f64> {
        let m = self.m();
        let mut pi = vec![0.0; m];
        for r in 0..m {
            let c = self.cost(self.basis[r]);
            if c != 0.0 {
                for k in 0..m {
                    pi[k] += c * self.binv[r * m + k];
                }
            }
        }
        pi
    }

    fn recompute_duals(&mut self) {
        let pi = self.row_duals();
        for j in 0..self.n + self.m() {
            self.d[j] = if self.state[j] == VarState::Basic { 0.0 } else { self.cost(j) - self.col_dot(j, &pi) };
        }
    }

    /// Rebuilds `B^-1` by Gauss-Jordan elimination. Returns false when singular.
    fn refactor(&mut self) -> bool {
        let m = self.m();
        let mut a = vec![0.0; m * m];
        for (p, &k) in self.basis.iter().enumerate() {
            if k < self.n {
                for &(i, v) in &self.cols[k] {
                    a[i * m + p] = v;
                }
            } else {
                a[(k - self.n) * m + p] = -1.0;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for c in 0..m {
            let mut piv = c;
            let mut best = a[c * m + c].abs();
            for r in (c + 1)..m {
                let v = a[r * m + c].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-11 {
                return false;
            }
            if piv != c {
                for k in 0..m {
                    a.swap(c * m + k, piv * m + k);
                    inv.swap(c * m + k, piv * m + k);
                }
            }
            let p = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= p;
                inv[c * m + k] /= p;
            }
            for r in 0..m {
                if r == c {
                    continue;
                }
                let f = a[r * m + c];
                if f != 0.0 {
                    for k in 0..m {
                        a[r * m + k] -= f * a[c * m + k];
                        inv[r * m + k] -= f * inv[c * m + k];
                    }
                }
            }
        }
        // rows of inv correspond to basis positions since A = B (columns = positions)
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_primal();
        self.recompute_duals();
        true
    }

    fn pivot_binv(&mut self, r: usize, w: &[f64]) {
        let m = self.m();
        let piv = w[r];
        let (head, rest) = self.binv.split_at_mut(r * m);
        let (prow, tail) = rest.split_at_mut(m);
        for v in prow.iter_mut() {
            *v /= piv;
        }
        for (i, &wi) in w.iter().enumerate() {
            if i == r || wi == 0.0 {
                continue;
            }
            let row = if i < r { &mut head[i * m..(i + 1) * m] } else { &mut tail[(i - r - 1) * m..(i - r) * m] };
            for (v, &p) in row.iter_mut().zip(prow.iter()) {
                *v -= wi * p;
            }
        }
    }

    fn objective_value(&self) -> f64 {
        (0..self.n).map(|j| self.obj[j] * self.x[j]).sum()
    }

    fn infeasibility(&self, k: usize) -> f64 {
        let v = self.x[k];
        if v < self.lower[k] - PRIMAL_TOL {
            self.lower[k] - v
        } else if v > self.upper[k] + PRIMAL_TOL {
            v - self.upper[k]
        } else {
            0.0
        }
    }

    /// Dual simplex until primal feasible. Returns Ok(false) on proven infeasibility.
    fn dual_phase(&mut self, iters: &mut usize, limit: usize) -> Result<bool> {
        let mut stall = 0usize;
        let mut bland = false;
        let mut last_obj = self.objective_value();
        let mut alpha = vec![0.0; self.n + self.m()];
        loop {
            let m = self.m();
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                self.slack_basis();
                self.recompute_primal();
            }
            // leaving row
            let mut r = usize::MAX;
            let mut best = 0.0;
            for p in 0..m {
                let k = self.basis[p];
                let inf = self.infeasibility(k);
                if inf > 0.0 {
                    if bland {
                        if r == usize::MAX || k < self.basis[r] {
                            r = p;
                        }
                    } else if inf > best {
                        best = inf;
                        r = p;
                    }
                }
            }
            if r == usize::MAX {
                return Ok(true);
            }
            *iters += 1;
            if *iters > limit {
                return Err(Error::Lp(format!("dual simplex exceeded {limit} iterations")));
            }
            let leaving = self.basis[r];
            let below = self.x[leaving] < self.lower[leaving];
            let rho: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();

            // ratio test (Harris two-pass, Bland when stalled)
            let mut theta_max = f64::INFINITY;
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            for j in 0..self.n + m {
                let st = self.state[j];
                if st == VarState::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let a = self.col_dot(j, &rho);
                alpha[j] = a;
                if a.abs() <= PIVOT_TOL {
                    continue;
                }
                let ok = match st {
                    VarState::Lower => (below && a < 0.0) || (!below && a > 0.0),
                    VarState::Upper => (below && a > 0.0) || (!below && a < 0.0),
                    VarState::Free => true,
                    VarState::Basic => false,
                };
                if !ok {
                    continue;
                }
                let dj = match st {
                    VarState::Lower => self.d[j].max(0.0),
                    VarState::Upper => (-self.d[j]).max(0.0),
                    _ => self.d[j].abs(),
                };
                let ratio = dj / a.abs();
                theta_max = theta_max.min((dj + DUAL_TOL) / a.abs());
                cands.push((j, ratio, a));
            }
            if cands.is_empty() {
                return Ok(false);
            }
            let q = if bland {
                let min_ratio = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                cands.iter().filter(|c| c.1 <= min_ratio + 1e-12).map(|c| c.0).min().unwrap()
            } else {
                cands
                    .iter()
                    .filter(|c| c.1 <= theta_max)
                    .max_by(|a, b| a.2.abs().total_cmp(&b.2.abs()).then(b.0.cmp(&a.0)))
                    .map(|c| c.0)
                    .unwrap()
            };
            let aq = alpha[q];
            let theta_d = self.d[q] / aq;
            for j in 0..self.n + m {
                if self.state[j] != VarState::Basic && j != q && self.lower[j] != self.upper[j] {
                    self.d[j] -= theta_d * alpha[j];
                } else if self.state[j] != VarState::Basic && j != q {
                    // fixed variables keep exact reduced costs via the row
                    self.d[j] -= theta_d * self.col_dot(j, &rho);
                }
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta_d;

            let w = self.ftran(q);
            let target = if below { self.lower[leaving] } else { self.upper[leaving] };
            let delta = (self.x[leaving] - target) / w[r];
            self.x[q] += delta;
            for (p, &wp) in w.iter().enumerate() {
                if wp != 0.0 {
                    let k = self.basis[p];
                    self.x[k] -= delta * wp;
                }
            }
            self.x[leaving] = target;
            self.state[leaving] = if below { VarState::Lower } else { VarState::Upper };
            self.state[q] = VarState::Basic;
            self.basis[r] = q;
            self.pivot_binv(r, &w);
            self.since_refactor += 1;

            let obj = self.objective_value();
            if obj > last_obj + 1e-12 * (1.0 + last_obj.abs()) {
                stall = 0;
                bland = false;
                last_obj = obj;
            } else {
                stall += 1;
                if stall > 10 * m.max(1) {
                    bland = true;
                }
            }
        }
    }

    /// Primal simplex from a primal feasible basis. Returns Ok(false) when unbounded.
    fn primal_phase(&mut self, iters: &mut usize, limit: usize) -> Result<bool> {
        let mut stall = 0usize;
        let mut bland = false;
        let mut last_obj = self.objective_value();
        loop {
            let m = self.m();
            if self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                return Err(Error::Lp("singular basis in primal phase".into()));
            }
            let mut q = usize::MAX;
            let mut best = 0.0;
            for j in 0..self.n + m {
                let st = self.state[j];
                if st == VarState::Basic || self.lower[j] == self.upper[j] {
                    continue;
                }
                let dj = self.d[j];
                let viol = match st {
                    VarState::Lower => -dj,
                    VarState::Upper => dj,
                    VarState::Free => dj.abs(),
                    VarState::Basic => 0.0,
                };
                if viol > DUAL_TOL * 10.0 {
                    if bland {
                        if q == usize::MAX {
                            q = j;
                        }
                    } else if viol > best {
                        best = viol;
                        q = j;
                    }
                }
            }
            if q == usize::MAX {
                return Ok(true);
            }
            *iters += 1;
            if *iters > limit {
                return Err(Error::Lp(format!("primal simplex exceeded {limit} iterations")));
            }
            let dir = if self.d[q] < 0.0 { 1.0 } else { -1.0 };
            let w = self.ftran(q);
            let mut step = self.upper[q] - self.lower[q];
            let mut r = usize::MAX;
            let mut r_to_lower = false;
            for (p, &wp) in w.iter().enumerate() {
                let rate = -wp * dir;
                if rate.abs() <= PIVOT_TOL {
                    continue;
                }
                let k = self.basis[p];
                let lim = if rate < 0.0 {
                    if self.lower[k].is_finite() {
                        ((self.x[k] - self.lower[k]).max(0.0)) / -rate
                    } else {
                        continue;
                    }
                } else if self.upper[k].is_finite() {
                    ((self.upper[k] - self.x[k]).max(0.0)) / rate
                } else {
                    continue;
                };
                let better = lim < step - 1e-12 || (lim <= step + 1e-12 && r != usize::MAX && wp.abs() > w[r].abs());
                if better || (r == usize::MAX && lim < step) {
                    step = lim;
                    r = p;
                    r_to_lower = rate < 0.0;
                }
            }
            if !step.is_finite() {
                return Ok(false);
            }
            for (p, &wp) in w.iter().enumerate() {
                if wp != 0.0 {
                    let k = self.basis[p];
                    self.x[k] -= wp * dir * step;
                }
            }
            self.x[q] += dir * step;
            if r == usize::MAX {
                // bound flip
                self.state[q] = if dir > 0.0 { VarState::Upper } else { VarState::Lower };
                self.x[q] = if dir > 0.0 { self.upper[q] } else { self.lower[q] };
            } else {
                let leaving = self.basis[r];
                let rho: Vec<f64> = self.binv[r * m..(r + 1) * m].to_vec();
                let theta = self.d[q] / w[r];
                for j in 0..self.n + m {
                    if self.state[j] != VarState::Basic && j != q {
                        self.d[j] -= theta * self.col_dot(j, &rho);
                    }
                }
                self.d[q] = 0.0;
                self.d[leaving] = -theta;
                self.x[leaving] = if r_to_lower { self.lower[leaving] } else { self.upper[leaving] };
                self.state[leaving] = if r_to_lower { VarState::Lower } else { VarState::Upper };
                self.state[q] = VarState::Basic;
                self.basis[r] = q;
                self.pivot_binv(r, &w);
                self.since_refactor += 1;
            }
            let obj = self.objective_value();
            if obj < last_obj - 1e-12 * (1.0 + last_obj.abs()) {
                stall = 0;
                bland = false;
                last_obj = obj;
            } else {
                stall += 1;
                if stall > 10 * m.max(1) {
                    bland = true;
                }
            }
        }
    }

    /// Flips boxed nonbasic variables whose reduced cost has the wrong sign.
    /// Returns true when an unboxed variable remains dual infeasible.
    fn repair_dual(&mut self) -> bool {
        let mut unfixable = false;
        for j in 0..self.n + self.m() {
            let st = self.state[j];
            if st == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let dj = self.d[j];
            match st {
                VarState::Lower if dj < -DUAL_TOL => {
                    if self.upper[j].is_finite() {
                        self.state[j] = VarState::Upper;
                        self.x[j] = self.upper[j];
                        self.dirty_primal = true;
                    } else {
                        unfixable = true;
                    }
                }
                VarState::Upper if dj > DUAL_TOL => {
                    if self.lower[j].is_finite() {
                        self.state[j] = VarState::Lower;
                        self.x[j] = self.lower[j];
                        self.dirty_primal = true;
                    } else {
                        unfixable = true;
                    }
                }
                VarState::Free if dj.abs() > DUAL_TOL => unfixable = true,
                _ => {}
            }
        }
        unfixable
    }

    /// Solves from the current basis (slack basis on first call).
    pub fn solve(&mut self) -> Result<LpSolution> {
        if !self.has_basis {
            self.slack_basis();
        }
        let m = self.m();
        let limit = 20_000 + 50 * (self.n + m);
        let mut iters = 0usize;
        let mut result = None;
        for _round in 0..50 {
            if self.since_refactor > 0 && !self.refactor() {
                self.slack_basis();
            }
            let unfixable = self.repair_dual();
            if self.dirty_primal {
                self.recompute_primal();
            }
            if !unfixable {
                if !self.dual_phase(&mut iters, limit)? {
                    result = Some(LpStatus::Infeasible);
                    break;
                }
            } else if (0..m).any(|p| self.infeasibility(self.basis[p]) > 0.0) {
                // no dual feasible start: restart from a boxed slack basis
                self.slack_basis();
                continue;
            }
            if self.since_refactor > 0 && !self.refactor() {
                self.slack_basis();
                continue;
            }
            let primal_ok = (0..m).all(|p| self.infeasibility(self.basis[p]) == 0.0);
            if !primal_ok {
                continue;
            }
            if !self.primal_phase(&mut iters, limit)? {
                result = Some(LpStatus::Unbounded);
                break;
            }
            if self.since_refactor > 0 && !self.refactor() {
                self.slack_basis();
                continue;
            }
            let dual_ok = !self.dual_infeasible();
            let primal_ok = (0..m).all(|p| self.infeasibility(self.basis[p]) == 0.0);
            if dual_ok && primal_ok {
                result = Some(LpStatus::Optimal);
                break;
            }
        }
        let mut status = result.ok_or_else(|| Error::Lp("simplex failed to converge".into()))?;
        if status == LpStatus::Optimal {
            let at_artificial = (0..self.n + m).any(|j| {
                self.state[j] != VarState::Basic
                    && ((self.lower[j] != self.user_lower[j] && self.x[j] == self.lower[j])
                        || (self.upper[j] != self.user_upper[j] && self.x[j] == self.upper[j]))
            }) || (0..self.n + m).any(|j| {
                self.state[j] == VarState::Basic
                    && (self.x[j] > ARTIFICIAL_BOUND * 0.5 || self.x[j] < -ARTIFICIAL_BOUND * 0.5)
            });
            if at_artificial {
                status = LpStatus::Unbounded;
            }
        }
        self.total_iterations += iters;
        let x: Vec<f64> = self.x[..self.n].to_vec();
        Ok(LpSolution {
            status,
            objective: self.objective_value(),
            duals: self.row_duals(),
            reduced_costs: self.d[..self.n].to_vec(),
            x,
            iterations: iters,
        })
    }

    fn dual_infeasible(&self) -> bool {
        (0..self.n + self.m()).any(|j| {
            let st = self.state[j];
            if st == VarState::Basic || self.lower[j] == self.upper[j] {
                return false;
            }
            let dj = self.d[j];
            match st {
                VarState::Lower => dj < -DUAL_TOL * 10.0,
                VarState::Upper => dj > DUAL_TOL * 10.0,
                VarState::Free => dj.abs() > DUAL_TOL * 10.0,
                VarState::Basic => false,
            }
        })
    }

    /// Appends rows and reoptimises from the previous basis with the dual simplex.
    pub fn add_rows_and_reoptimize(&mut self, rows: impl IntoIterator<Item = Row>) -> Result<LpSolution> {
        self.add_rows(rows);
        self.solve()
    }

    /// Lagrangian bound `sum_j min_{x_j in [l_j,u_j]} d_j x_j` for the current duals.
    pub fn dual_objective(&self) -> f64 {
        let pi = self.row_duals();
        let mut total = 0.0;
        for j in 0..self.n + self.m() {
            let dj = self.cost(j) - self.col_dot(j, &pi);
            if dj.abs() <= DUAL_TOL {
                continue;
            }
            let b = if dj > 0.0 { self.user_lower[j] } else { self.user_upper[j] };
            total += dj * b;
        }
        total
    }

    pub fn total_iterations(&self) -> usize {
        self.total_iterations
    }

    /// Text dump for failure triage: `obj`, `bound` and `row` records.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "lp vars {} rows {}", self.n, self.m());
        for j in 0..self.n {
            let _ = writeln!(s, "var {j} obj {} bound {} {}", self.obj[j], self.user_lower[j], self.user_upper[j]);
        }
        for (i, r) in self.rows.iter().enumerate() {
            let sense = match r.sense {
                Sense::Ge => ">=",
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            let terms: Vec<String> = r.coeffs.iter().map(|(j, a)| format!("{a}*x{j}")).collect();
            let _ = writeln!(s, "row {i} {} {sense} {}", terms.join(" + "), r.rhs);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bound_row() {
        let mut lp = LpModel::new(1);
        lp.set_objective(0, 1.0);
        lp.add_row(Row::new(vec![(0, 1.0)], Sense::Ge, 1.0));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.objective - 1.0).abs() < 1e-9);
        assert!((s.duals[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cheapest_arc_of_a_pair() {
        // arcs (+ -> -) and (- -> +); only the out-arc of {+} covers the cut
        let mut lp = LpModel::new(2);
        lp.set_objective(0, 5.0);
        lp.set_objective(1, 5.0);
        lp.add_row(Row::cover([0]));
        let s = lp.solve().unwrap();
        assert!((s.x[0] - 1.0).abs() < 1e-9 && s.x[1].abs() < 1e-9);
        assert!((s.objective - 5.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        let mut lp = LpModel::new(2);
        lp.set_objective(0, 1.0);
        lp.add_row(Row::new(vec![(0, 1.0), (1, 1.0)], Sense::Ge, 3.0));
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LpModel::new(2);
        lp.set_objective(0, -1.0);
        lp.set_bounds(0, 0.0, f64::INFINITY);
        lp.add_row(Row::new(vec![(0, 1.0), (1, -1.0)], Sense::Le, 1.0));
        lp.set_bounds(1, 0.0, f64::INFINITY);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_negative_costs() {
        // max x0 + 2 x1 s.t. x0 + x1 = 1.5, x in [0,1]
        let mut lp = LpModel::new(2);
        lp.set_objective(0, -1.0);
        lp.set_objective(1, -2.0);
        lp.add_row(Row::new(vec![(0, 1.0), (1, 1.0)], Sense::Eq, 1.5));
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 0.5).abs() < 1e-9 && (s.x[1] - 1.0).abs() < 1e-9);
        assert!((s.objective + 2.5).abs() < 1e-9);
    }

    #[test]
    fn non_violated_row_keeps_solution() {
        let mut lp = LpModel::new(3);
        for j in 0..3 {
            lp.set_objective(j, (j + 1) as f64);
        }
        lp.add_row(Row::cover([0, 1, 2]));
        let a = lp.solve().unwrap();
        let b = lp.add_rows_and_reoptimize([Row::cover([0, 2])]).unwrap();
        assert_eq!(a.x, b.x);
        assert!((a.objective - b.objective).abs() < 1e-12);
        let c = lp.add_rows_and_reoptimize([Row::cover([1, 2])]).unwrap();
        assert!(c.objective > b.objective + 1e-9);
    }

    #[test]
    fn bound_changes_warm() {
        let mut lp = LpModel::new(3);
        for j in 0..3 {
            lp.set_objective(j, (j + 1) as f64);
        }
        lp.add_row(Row::new(vec![(0, 1.0), (1, 1.0), (2, 1.0)], Sense::Ge, 2.0));
        let s = lp.solve().unwrap();
        assert!((s.objective - 3.0).abs() < 1e-9);
        lp.set_bounds(0, 0.0, 0.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 5.0).abs() < 1e-9);
        lp.set_bounds(0, 0.0, 1.0);
        lp.set_bounds(2, 1.0, 1.0);
        let s = lp.solve().unwrap();
        assert!((s.objective - 4.0).abs() < 1e-9);
    }

    #[test]
    fn dump_lists_rows() {
        let mut lp = LpModel::new(2);
        lp.add_row(Row::cover([0, 1]));
        let d = lp.dump();
        assert!(d.contains("row 0 1*x0 + 1*x1 >= 1"));
    }
}
