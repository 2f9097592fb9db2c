//! Image files: `WPH1` raw floats, 8-bit PGM (P5) and PPM (P6) overlays.
//!
//! `WPH1` layout: the magic bytes, `rows` and `cols` as little-endian `u32`,
//! then `rows * cols` little-endian `f32` values in row-major order.

use std::f64::consts::PI;
use std::path::Path;

use super::{ResidueMap, WrappedImage};
use crate::error::{Error, Result};
use crate::model::{ForestSolution, Instance};

const MAGIC: &[u8; 4] = b"WPH1";

fn perr(message: impl Into<String>) -> Error {
    Error::Parse { line: 0, message: message.into() }
}

pub fn encode_raw(rows: usize, cols: usize, values: &[f64]) -> Result<Vec<u8>> {
    if values.len() != rows * cols {
        return Err(Error::arg(format!("{} values for a {rows}x{cols} image", values.len())));
    }
    let dim = |d: usize| u32::try_from(d).map_err(|_| Error::arg(format!("dimension {d} too large")));
    let mut out = Vec::with_capacity(12 + 4 * values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&dim(rows)?.to_le_bytes());
    out.extend_from_slice(&dim(cols)?.to_le_bytes());
    for &v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    Ok(out)
}

/// Returns `(rows, cols, values)`.
pub fn decode_raw(bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(perr("missing WPH1 header"));
    }
    let rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected =
        rows.checked_mul(cols).and_then(|n| n.checked_mul(4)).ok_or_else(|| perr("image dimensions overflow"))?;
    if bytes.len() - 12 != expected {
        return Err(perr(format!("{rows}x{cols} image needs {expected} data bytes, found {}", bytes.len() - 12)));
    }
    let values = bytes[12..].chunks_exact(4).map(|b| f32::from_le_bytes(b.try_into().unwrap()) as f64).collect();
    Ok((rows, cols, values))
}

pub fn write_raw(path: impl AsRef<Path>, rows: usize, cols: usize, values: &[f64]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_raw(rows, cols, values)?).map_err(|e| Error::io(path, e))
}

pub fn read_raw(path: impl AsRef<Path>) -> Result<(usize, usize, Vec<f64>)> {
    let path = path.as_ref();
    decode_raw(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
}

/// Reads a `WPH1` file as a wrapped image, wrapping values that single precision pushed past pi.
pub fn read_wrapped_raw(path: impl AsRef<Path>) -> Result<WrappedImage> {
    let (rows, cols, values) = read_raw(path)?;
    WrappedImage::from_phase(rows, cols, &values)
}

pub fn gray_to_phase(g: u8) -> f64 {
    -PI + (g as f64 + 0.5) * 2.0 * PI / 256.0
}

pub fn phase_to_gray(v: f64) -> u8 {
    ((v + PI) / (2.0 * PI) * 256.0).floor().clamp(0.0, 255.0) as u8
}

pub fn encode_pgm(img: &WrappedImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(img.values().iter().map(|&v| phase_to_gray(v)));
    out
}

/// Splits off the next header token of a netpbm file, skipping comments.
fn header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Result<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    if start == *pos {
        return Err(perr("truncated netpbm header"));
    }
    Ok(&bytes[start..*pos])
}

fn header_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    let tok = header_token(bytes, pos)?;
    std::str::from_utf8(tok)
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| perr(format!("bad header field `{}`", String::from_utf8_lossy(tok))))
}

pub fn decode_pgm(bytes: &[u8]) -> Result<WrappedImage> {
    let mut pos = 0;
    if header_token(bytes, &mut pos)? != b"P5" {
        return Err(perr("not a binary PGM (P5) file"));
    }
    let cols = header_number(bytes, &mut pos)?;
    let rows = header_number(bytes, &mut pos)?;
    let maxval = header_number(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(perr(format!("only 8-bit PGM is supported, maxval {maxval}")));
    }
    pos += 1;
    let data = bytes.get(pos..).unwrap_or_default();
    if data.len() < rows * cols {
        return Err(perr(format!("{rows}x{cols} PGM truncated at {} bytes", data.len())));
    }
    let values = data[..rows * cols].iter().map(|&g| gray_to_phase(g)).collect();
    WrappedImage::new(rows, cols, values)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<WrappedImage> {
    let path = path.as_ref();
    decode_pgm(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_pgm(path: impl AsRef<Path>, img: &WrappedImage) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

/// Reads a wrapped image, choosing the format from the file's magic bytes.
pub fn read_wrapped(path: impl AsRef<Path>) -> Result<WrappedImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(MAGIC) {
        let (rows, cols, values) = decode_raw(&bytes)?;
        WrappedImage::from_phase(rows, cols, &values)
    } else {
        decode_pgm(&bytes)
    }
}

const POSITIVE: [u8; 3] = [230, 30, 30];
const NEGATIVE: [u8; 3] = [30, 80, 230];
const CUT: [u8; 3] = [250, 210, 0];

struct Canvas {
    rows: usize,
    cols: usize,
    rgb: Vec<u8>,
}

impl Canvas {
    fn put(&mut self, r: i64, c: i64, color: [u8; 3]) {
        if r >= 0 && c >= 0 && (r as usize) < self.rows && (c as usize) < self.cols {
            let p = 3 * (r as usize * self.cols + c as usize);
            self.rgb[p..p + 3].copy_from_slice(&color);
        }
    }

    fn line(&mut self, (r0, c0): (i64, i64), (r1, c1): (i64, i64), color: [u8; 3]) {
        let (dr, dc) = ((r1 - r0).abs(), -(c1 - c0).abs());
        let (sr, sc) = ((r1 - r0).signum(), (c1 - c0).signum());
        let (mut r, mut c, mut err) = (r0, c0, dr + dc);
        loop {
            self.put(r, c, color);
            if r == r1 && c == c1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dc {
                err += dc;
                r += sr;
            }
            if e2 <= dr {
                err += dr;
                c += sc;
            }
        }
    }
}

/// Grey phase image with branch cuts and residues drawn on top, as PPM (P6) bytes.
pub fn render_overlay(
    img: &WrappedImage,
    inst: &Instance,
    sol: Option<&ForestSolution>,
    residues: &ResidueMap,
) -> Vec<u8> {
    let (rows, cols) = (img.rows(), img.cols());
    let mut canvas = Canvas { rows, cols, rgb: img.values().iter().flat_map(|&v| [phase_to_gray(v); 3]).collect() };
    let at = |v: usize| {
        let x = inst.vertex(v);
        (x.y.floor() as i64, x.x.floor() as i64)
    };
    let border_point = |(r, c): (i64, i64)| {
        let (rr, cc) = (rows as i64 - 1, cols as i64 - 1);
        [(c, (r, 0)), (r, (0, c)), (cc - c, (r, cc)), (rr - r, (rr, c))].into_iter().min_by_key(|o| o.0).unwrap().1
    };
    for tree in sol.map(|s| s.trees.as_slice()).unwrap_or_default() {
        for &(u, v) in &tree.edges {
            match (inst.vertex(u).is_border, inst.vertex(v).is_border) {
                (true, true) => {}
                (false, false) => canvas.line(at(u), at(v), CUT),
                (false, true) => canvas.line(at(u), border_point(at(u)), CUT),
                (true, false) => canvas.line(at(v), border_point(at(v)), CUT),
            }
        }
    }
    for res in &residues.residues {
        let (r, c) = (res.row.floor() as i64, res.col.floor() as i64);
        let color = if res.charge > 0 { POSITIVE } else { NEGATIVE };
        for dr in 0..3 {
            for dc in 0..3 {
                canvas.put(r + dr - 1, c + dc - 1, color);
            }
        }
    }
    let mut out = format!("P6\n{cols} {rows}\n255\n").into_bytes();
    out.extend(canvas.rgb);
    out
}

pub fn write_bytes(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
