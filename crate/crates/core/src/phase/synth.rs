//! Synthetic wrapped images and residue layouts for tests and demos.

use std::collections::BTreeSet;

use rand::Rng as _;

use super::{wrap_finite, Residue, ResidueMap, WrappedImage};
use crate::rng;

/// Planar phase `ay * r + ax * c`; also returns the continuous phase.
pub fn ramp(rows: usize, cols: usize, ay: f64, ax: f64) -> (WrappedImage, Vec<f64>) {
    let phase: Vec<f64> = (0..rows * cols).map(|p| ay * (p / cols) as f64 + ax * (p % cols) as f64).collect();
    let img = WrappedImage::from_phase(rows, cols, &phase).expect("finite ramp");
    (img, phase)
}

/// Single phase vortex `atan2(r - cy, c - cx)`, one positive residue at the loop containing the centre.
pub fn vortex(rows: usize, cols: usize, cy: f64, cx: f64) -> WrappedImage {
    let values: Vec<f64> = (0..rows * cols)
        .map(|p| {
            let (r, c) = ((p / cols) as f64, (p % cols) as f64);
            wrap_finite((r - cy).atan2(c - cx))
        })
        .collect();
    WrappedImage::new(rows, cols, values).expect("wrapped vortex")
}

/// Smooth surface plus uniform noise of amplitude `noise`, wrapped.
pub fn noisy_surface(rows: usize, cols: usize, noise: f64, seed: u64) -> WrappedImage {
    let mut rng = rng::stream(seed, 0x4e53);
    let (h, w) = (rows as f64, cols as f64);
    let values: Vec<f64> = (0..rows * cols)
        .map(|p| {
            let (r, c) = ((p / cols) as f64, (p % cols) as f64);
            let smooth = 6.0 * ((r / h - 0.5).powi(2) + (c / w - 0.5).powi(2)) * std::f64::consts::TAU
                + 2.0 * (3.0 * c / w).sin();
            wrap_finite(smooth + noise * rng.gen_range(-1.0..=1.0))
        })
        .collect();
    WrappedImage::new(rows, cols, values).expect("wrapped surface")
}

/// Residues in `clusters` tight groups of `per_cluster` loops each, random charges.
pub fn clustered_residues(
    rows: usize,
    cols: usize,
    clusters: usize,
    per_cluster: usize,
    spread: usize,
    seed: u64,
) -> ResidueMap {
    assert!(rows >= 2 && cols >= 2, "image too small for residues");
    let mut rng = rng::stream(seed, 0x434c);
    let (lr, lc) = (rows - 1, cols - 1);
    let mut taken = BTreeSet::new();
    let mut residues = Vec::new();
    for _ in 0..clusters {
        let (cr, cc) = (rng.gen_range(0..lr), rng.gen_range(0..lc));
        let mut placed = 0;
        let mut attempts = 0;
        while placed < per_cluster && attempts < 100 * per_cluster {
            attempts += 1;
            let s = spread as i64;
            let r = (cr as i64 + rng.gen_range(-s..=s)).clamp(0, lr as i64 - 1) as usize;
            let c = (cc as i64 + rng.gen_range(-s..=s)).clamp(0, lc as i64 - 1) as usize;
            if taken.insert((r, c)) {
                residues.push((r, c, if rng.gen_bool(0.5) { 1 } else { -1 }));
                placed += 1;
            }
        }
    }
    residues.sort_unstable();
    ResidueMap {
        residues: residues
            .into_iter()
            .map(|(r, c, charge)| Residue { row: r as f64 + 0.5, col: c as f64 + 0.5, charge })
            .collect(),
    }
}
