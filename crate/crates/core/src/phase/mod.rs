//! Wrapped phase images: residues, branch cuts and masked integration.
//!
//! Pixel `(r, c)` sits at `x = c, y = r`. The residue of the 2x2 loop with
//! top-left pixel `(r, c)` sits at the loop centre `(r + 0.5, c + 0.5)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{add_border_vertices, ChargedPoint, Instance};

pub mod io;
mod raster;
pub mod synth;
mod unwrap;

pub use raster::{rasterize_branch_cuts, BranchCutMask};
pub use unwrap::{metrics, unwrap_2d, Metrics, UnwrappedImage};

const TWO_PI: f64 = 2.0 * PI;

/// Maps `phi` into `(-pi, pi]`.
pub fn wrap(phi: f64) -> Result<f64> {
    if !phi.is_finite() {
        return Err(Error::arg(format!("cannot wrap non-finite phase {phi}")));
    }
    Ok(wrap_finite(phi))
}

pub(crate) fn wrap_finite(phi: f64) -> f64 {
    let k = ((PI - phi) / TWO_PI).floor();
    let mut v = phi + TWO_PI * k;
    // rounding can land a hair outside the half-open interval
    if v <= -PI {
        v += TWO_PI;
    } else if v > PI {
        v -= TWO_PI;
    }
    v
}

/// One-dimensional Itoh unwrapping starting from `phi0`.
pub fn itoh_unwrap_1d(psi: &[f64], phi0: f64) -> Result<Vec<f64>> {
    if psi.is_empty() {
        return Err(Error::arg("cannot unwrap an empty sequence"));
    }
    let mut out = Vec::with_capacity(psi.len());
    out.push(phi0);
    for m in 1..psi.len() {
        let step = wrap(psi[m] - psi[m - 1])?;
        out.push(out[m - 1] + step);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrappedImage {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl WrappedImage {
    /// Row-major values, each already in `(-pi, pi]`.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::arg(format!("{} values for a {rows}x{cols} image", values.len())));
        }
        if let Some((k, v)) = values.iter().enumerate().find(|(_, v)| !(**v > -PI && **v <= PI)) {
            return Err(Error::Validation(format!("pixel {k} has value {v} outside (-pi, pi]")));
        }
        Ok(WrappedImage { rows, cols, values })
    }

    /// Wraps arbitrary finite phase values.
    pub fn from_phase(rows: usize, cols: usize, phase: &[f64]) -> Result<Self> {
        let values = phase.iter().map(|&p| wrap(p)).collect::<Result<Vec<_>>>()?;
        WrappedImage::new(rows, cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.values[r * self.cols + c]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residue {
    pub row: f64,
    pub col: f64,
    pub charge: i8,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidueMap {
    pub residues: Vec<Residue>,
}

impl ResidueMap {
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn total_charge(&self) -> i64 {
        self.residues.iter().map(|r| r.charge as i64).sum()
    }

    pub fn points(&self) -> Vec<ChargedPoint> {
        self.residues.iter().map(|r| ChargedPoint { x: r.col, y: r.row, charge: r.charge }).collect()
    }

    /// Forest instance with border vertices for a `rows x cols` image.
    pub fn instance(&self, rows: usize, cols: usize) -> Instance {
        add_border_vertices(&self.points(), cols, rows)
    }
}

/// Sum of wrapped gradients around the loop with top-left pixel `(r, c)`.
pub fn loop_sum(img: &WrappedImage, r: usize, c: usize) -> f64 {
    let a = img.get(r, c);
    let b = img.get(r, c + 1);
    let d = img.get(r + 1, c + 1);
    let e = img.get(r + 1, c);
    wrap_finite(b - a) + wrap_finite(d - b) + wrap_finite(e - d) + wrap_finite(a - e)
}

/// Residues of every 2x2 loop, in row-major loop order.
pub fn detect_residues(img: &WrappedImage) -> Result<ResidueMap> {
    if img.rows < 2 || img.cols < 2 {
        return Err(Error::arg(format!("residue detection needs at least 2x2 pixels, got {}x{}", img.rows, img.cols)));
    }
    let mut residues = Vec::new();
    for r in 0..img.rows - 1 {
        for c in 0..img.cols - 1 {
            let s = loop_sum(img, r, c);
            if s.abs() > PI {
                residues.push(Residue {
                    row: r as f64 + 0.5,
                    col: c as f64 + 0.5,
                    charge: if s > 0.0 { 1 } else { -1 },
                });
            }
        }
    }
    Ok(ResidueMap { residues })
}
