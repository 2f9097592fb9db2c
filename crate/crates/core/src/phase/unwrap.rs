use std::collections::VecDeque;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{wrap_finite, BranchCutMask, WrappedImage};
use crate::error::{Error, Result};
use crate::model::{ForestSolution, Instance};

#[derive(Debug, Clone, PartialEq)]
pub struct UnwrappedImage {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
    /// Connected region of each pixel under the mask, numbered in discovery order.
    pub region_label: Vec<usize>,
    pub regions: usize,
}

impl UnwrappedImage {
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }

    pub fn label(&self, r: usize, c: usize) -> usize {
        self.region_label[r * self.cols + c]
    }
}

/// Breadth-first Itoh integration across unblocked gradients.
///
/// Each region's seed pixel keeps its wrapped value.
pub fn unwrap_2d(img: &WrappedImage, mask: &BranchCutMask) -> Result<UnwrappedImage> {
    let (rows, cols) = (img.rows(), img.cols());
    if mask.rows() != rows || mask.cols() != cols {
        return Err(Error::arg(format!("mask is {}x{} but image is {rows}x{cols}", mask.rows(), mask.cols())));
    }
    let psi = img.values();
    let mut values = vec![0.0; rows * cols];
    let mut label = vec![usize::MAX; rows * cols];
    let mut regions = 0;
    let mut queue = VecDeque::new();
    for seed in 0..rows * cols {
        if label[seed] != usize::MAX {
            continue;
        }
        label[seed] = regions;
        values[seed] = psi[seed];
        queue.push_back(seed);
        while let Some(p) = queue.pop_front() {
            let (r, c) = (p / cols, p % cols);
            let mut visit = |q: usize, open: bool| {
                if open && label[q] == usize::MAX {
                    label[q] = regions;
                    values[q] = values[p] + wrap_finite(psi[q] - psi[p]);
                    queue.push_back(q);
                }
            };
            if c + 1 < cols {
                visit(p + 1, !mask.horizontal(r, c));
            }
            if c > 0 {
                visit(p - 1, !mask.horizontal(r, c - 1));
            }
            if r + 1 < rows {
                visit(p + cols, !mask.vertical(r, c));
            }
            if r > 0 {
                visit(p - cols, !mask.vertical(r - 1, c));
            }
        }
        regions += 1;
    }
    Ok(UnwrappedImage { rows, cols, values, region_label: label, regions })
}

/// Quality figures of an unwrapping: changed gradients, cut length, trees, isolated regions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(rename = "I")]
    pub i: usize,
}

/// `T` counts trees holding at least one residue; border-only leftovers carry no cut.
pub fn metrics(img: &WrappedImage, inst: &Instance, sol: &ForestSolution, unwrapped: &UnwrappedImage) -> Metrics {
    let (rows, cols) = (img.rows(), img.cols());
    let psi = img.values();
    let u = &unwrapped.values;
    let mut n = 0;
    let mut check = |p: usize, q: usize| {
        if ((u[q] - u[p]) - wrap_finite(psi[q] - psi[p])).abs() > PI {
            n += 1;
        }
    };
    for r in 0..rows {
        for c in 0..cols {
            let p = r * cols + c;
            if c + 1 < cols {
                check(p, p + 1);
            }
            if r + 1 < rows {
                check(p, p + cols);
            }
        }
    }
    let l = sol.trees.iter().flat_map(|t| &t.edges).map(|&(a, b)| inst.d(a, b)).sum();
    let t = sol
        .trees
        .iter()
        .filter(|t| t.vertices.len() >= 2 && t.vertices.iter().any(|&v| !inst.vertex(v).is_border))
        .count();
    Metrics { n, l, t, i: unwrapped.regions.saturating_sub(1) }
}
