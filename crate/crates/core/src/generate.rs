//! Random benchmark instances and the `msfbcp 1` text format.
//!
//! ```text
//! msfbcp 1
//! n <count>
//! <id> <x> <y> <charge> <is_border:0|1> <border_distance|inf>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::model::{with_border_rect, ChargedPoint, Instance, Vertex};
use crate::rng;

/// `n/2` positive and `n/2` negative vertices uniform in `[0, 4n]^2`, plus one
/// border pair.
pub fn generate_puc(n: usize, seed: u64) -> Result<Instance> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::arg(format!("PUC size must be even and >= 2, got {n}")));
    }
    let side = 4.0 * n as f64;
    let mut rng = rng::stream(seed, 0x5055_4300 + n as u64);
    let pts: Vec<ChargedPoint> = (0..n)
        .map(|k| ChargedPoint {
            x: rng.gen_range(0.0..=side),
            y: rng.gen_range(0.0..=side),
            charge: if k < n / 2 { 1 } else { -1 },
        })
        .collect();
    with_border_rect(&pts, side, side, &format!("puc-{n}-{seed}"))
}

pub fn format_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str("msfbcp 1\n");
    let _ = writeln!(out, "n {}", inst.len());
    for v in inst.vertices() {
        let bd = inst.border_distance(v.id);
        let bd = if bd.is_finite() { format!("{bd}") } else { "inf".to_string() };
        let _ = writeln!(out, "{} {} {} {} {} {}", v.id, v.x, v.y, v.charge, u8::from(v.is_border), bd);
    }
    out
}

pub fn parse_instance(text: &str, name: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim_end_matches('\r')));
    let perr = |line: usize, message: String| Error::Parse { line, message };

    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty file".into()))?;
    let mut it = header.split_whitespace();
    if it.next() != Some("msfbcp") {
        return Err(perr(ln, format!("expected header `msfbcp 1`, got `{header}`")));
    }
    let version: u32 =
        it.next().and_then(|s| s.parse().ok()).ok_or_else(|| perr(ln, "missing format version".into()))?;
    if version != 1 {
        return Err(Error::UnsupportedVersion(version));
    }

    let (ln, count_line) = lines.next().ok_or_else(|| perr(2, "missing vertex count".into()))?;
    let mut it = count_line.split_whitespace();
    let count: usize = match (it.next(), it.next().and_then(|s| s.parse().ok())) {
        (Some("n"), Some(c)) => c,
        _ => return Err(perr(ln, format!("expected `n <count>`, got `{count_line}`"))),
    };

    let mut vertices = Vec::with_capacity(count);
    let mut bd = Vec::with_capacity(count);
    for (ln, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 6 {
            return Err(perr(ln, format!("expected 6 fields, got {}", f.len())));
        }
        let num = |s: &str, what: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| perr(ln, format!("bad {what} `{s}`")))
        };
        let id: usize = f[0].parse().map_err(|_| perr(ln, format!("bad id `{}`", f[0])))?;
        let charge: i8 = f[3].parse().map_err(|_| perr(ln, format!("bad charge `{}`", f[3])))?;
        let is_border = match f[4] {
            "0" => false,
            "1" => true,
            other => return Err(perr(ln, format!("bad border flag `{other}`"))),
        };
        let dist = if f[5] == "inf" { f64::INFINITY } else { num(f[5], "border distance")? };
        vertices.push(Vertex { id, x: num(f[1], "x")?, y: num(f[2], "y")?, charge, is_border });
        bd.push(dist);
    }
    if vertices.len() != count {
        return Err(Error::Validation(format!("header declares {count} vertices, found {}", vertices.len())));
    }
    Instance::new(name, vertices, bd)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "instance".into());
    parse_instance(&text, &name)
}

pub fn write_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, format_instance(inst)).map_err(|e| Error::io(path, e))
}
