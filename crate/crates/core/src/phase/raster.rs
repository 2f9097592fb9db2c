use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ForestSolution, Instance};

/// Gradients severed by branch cuts.
///
/// `horizontal(r, c)` is the gradient between pixels `(r, c)` and `(r, c + 1)`,
/// `vertical(r, c)` the one between `(r, c)` and `(r + 1, c)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchCutMask {
    rows: usize,
    cols: usize,
    blocked_horizontal: Vec<bool>,
    blocked_vertical: Vec<bool>,
}

impl BranchCutMask {
    pub fn new(rows: usize, cols: usize) -> Self {
        BranchCutMask {
            rows,
            cols,
            blocked_horizontal: vec![false; rows * cols.saturating_sub(1)],
            blocked_vertical: vec![false; rows.saturating_sub(1) * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn horizontal(&self, r: usize, c: usize) -> bool {
        self.blocked_horizontal[r * (self.cols - 1) + c]
    }

    pub fn vertical(&self, r: usize, c: usize) -> bool {
        self.blocked_vertical[r * self.cols + c]
    }

    pub fn block_horizontal(&mut self, r: usize, c: usize) {
        self.blocked_horizontal[r * (self.cols - 1) + c] = true;
    }

    pub fn block_vertical(&mut self, r: usize, c: usize) {
        self.blocked_vertical[r * self.cols + c] = true;
    }

    pub fn blocked_count(&self) -> usize {
        self.blocked_horizontal.iter().chain(&self.blocked_vertical).filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.blocked_count() == 0
    }

    /// Blocks whatever gradient the unit dual step from loop `(r, c)` to
    /// loop `(r + dr, c + dc)` crosses. Loop indices may be -1 or
    /// `rows - 1` / `cols - 1` (just outside the loop grid).
    fn block_dual_step(&mut self, r: i64, c: i64, dr: i64, dc: i64) {
        let (rows, cols) = (self.rows as i64, self.cols as i64);
        if dr == 0 {
            // crossing the pixel column c' = max(c, c + dc), between rows r and r + 1
            let pc = c.max(c + dc);
            if r >= 0 && r < rows - 1 && pc >= 0 && pc < cols {
                self.block_vertical(r as usize, pc as usize);
            }
        } else {
            let pr = r.max(r + dr);
            if pr >= 0 && pr < rows && c >= 0 && c < cols - 1 {
                self.block_horizontal(pr as usize, c as usize);
            }
        }
    }

    /// 4-connected staircase along the segment between two loops.
    fn block_segment(&mut self, a: (i64, i64), b: (i64, i64)) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let (dr, dc) = (b.0 - a.0, b.1 - a.1);
        let (nr, nc) = (dr.abs(), dc.abs());
        let (sr, sc) = (dr.signum(), dc.signum());
        let (mut r, mut c) = a;
        let (mut ir, mut ic) = (0, 0);
        while ir < nr || ic < nc {
            // step along the axis whose next grid crossing comes first; ties go horizontal
            let horizontal = ir == nr || (ic < nc && (1 + 2 * ic) * nr <= (1 + 2 * ir) * nc);
            if horizontal {
                self.block_dual_step(r, c, 0, sc);
                c += sc;
                ic += 1;
            } else {
                self.block_dual_step(r, c, sr, 0);
                r += sr;
                ir += 1;
            }
        }
    }

    /// Straight run from a loop to the nearest image edge; ties prefer left, top, right, bottom.
    fn block_to_border(&mut self, (r, c): (i64, i64)) {
        let (rows, cols) = (self.rows as i64, self.cols as i64);
        let options = [
            (c, (0, -1), c + 1),
            (r, (-1, 0), r + 1),
            (cols - 2 - c, (0, 1), cols - 1 - c),
            (rows - 2 - r, (1, 0), rows - 1 - r),
        ];
        let &(_, (dr, dc), steps) = options.iter().min_by_key(|o| o.0).unwrap();
        let (mut r, mut c) = (r, c);
        for _ in 0..steps {
            self.block_dual_step(r, c, dr, dc);
            r += dr;
            c += dc;
        }
    }
}

/// Loop index of a residue vertex.
fn loop_of(inst: &Instance, v: usize, rows: usize, cols: usize) -> Result<(i64, i64)> {
    let vx = inst.vertex(v);
    let (r, c) = (vx.y - 0.5, vx.x - 0.5);
    let (ri, ci) = (r.round(), c.round());
    if (r - ri).abs() > 1e-9 || (c - ci).abs() > 1e-9 {
        return Err(Error::arg(format!("vertex {v} at ({}, {}) is not a loop centre", vx.y, vx.x)));
    }
    if ri < 0.0 || ci < 0.0 || ri > rows as f64 - 2.0 || ci > cols as f64 - 2.0 {
        return Err(Error::arg(format!("vertex {v} at ({}, {}) lies outside the {rows}x{cols} image", vx.y, vx.x)));
    }
    Ok((ri as i64, ci as i64))
}

/// Blocks every gradient crossed by a tree edge; border edges run straight to the nearest edge.
pub fn rasterize_branch_cuts(sol: &ForestSolution, inst: &Instance, rows: usize, cols: usize) -> Result<BranchCutMask> {
    if !inst.is_image_derived() {
        return Err(Error::arg("branch cuts need an image-derived instance"));
    }
    let mut mask = BranchCutMask::new(rows, cols);
    for tree in &sol.trees {
        for &(u, v) in &tree.edges {
            let (bu, bv) = (inst.vertex(u).is_border, inst.vertex(v).is_border);
            match (bu, bv) {
                (true, true) => {}
                (false, false) => mask.block_segment(loop_of(inst, u, rows, cols)?, loop_of(inst, v, rows, cols)?),
                (false, true) => mask.block_to_border(loop_of(inst, u, rows, cols)?),
                (true, false) => mask.block_to_border(loop_of(inst, v, rows, cols)?),
            }
        }
    }
    Ok(mask)
}
