//! Flat binary section layout, little-endian throughout.
//!
//! ```text
//! offset size field
//!  0      8   magic "SPLSECT1"
//!  8      1   u8  bytes per complex value: 8 (f32 pair) or 16 (f64 pair)
//!  9      1   u8  rep kind: 0 massive, 1 massless
//! 10      1   i8  spin (massive) or helicity (massless)
//! 11      1   u8  components per node d
//! 12      8   f64 mass
//! 20     12   u32 N_r, N_θ, N_φ
//! 32     16   f64 r_min, r_max
//! 48      .   body: (re, im) per component, component innermost,
//!             node (i_r * N_θ + i_θ) * N_φ + i_φ
//! ```

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex;

use super::{cst, make_grid, BundleError, Real, RepKind, RepSpec, Section};

pub const MAGIC: &[u8; 8] = b"SPLSECT1";
const HEADER: usize = 48;

pub fn section_bytes<T: Real>(s: &Section<T>) -> Vec<u8> {
    let width = 2 * std::mem::size_of::<T>();
    let g = &s.grid;
    let mut out = Vec::with_capacity(HEADER + s.data.len() * width);
    out.extend_from_slice(MAGIC);
    out.push(width as u8);
    let (kind, label) = match s.rep.kind {
        RepKind::Massive { spin } => (0u8, spin as i8),
        RepKind::Massless { helicity } => (1u8, helicity),
    };
    out.push(kind);
    out.push(label as u8);
    out.push(s.dim() as u8);
    out.extend_from_slice(&s.rep.mass.to_le_bytes());
    for n in [g.nr, g.nt, g.np] {
        out.extend_from_slice(&(n as u32).to_le_bytes());
    }
    out.extend_from_slice(&g.r_min.to_le_bytes());
    out.extend_from_slice(&g.r_max.to_le_bytes());
    for z in &s.data {
        for x in [z.re, z.im] {
            let v = x.to_f64().unwrap();
            if width == 8 {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            } else {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

fn take<const N: usize>(b: &[u8], at: usize) -> [u8; N] {
    b[at..at + N].try_into().expect("length checked")
}

pub fn read_section_bytes<T: Real>(b: &[u8]) -> Result<Section<T>, BundleError> {
    let fmt = |m: &str| BundleError::Format(m.to_string());
    if b.len() < HEADER || &b[..8] != MAGIC {
        return Err(fmt("missing magic"));
    }
    let width = b[8] as usize;
    if width != 8 && width != 16 {
        return Err(fmt("value width must be 8 or 16"));
    }
    let label = b[10] as i8;
    let mass = f64::from_le_bytes(take(b, 12));
    let rep = match b[9] {
        0 if label >= 0 => RepSpec::massive(label as u8, mass)?,
        1 => RepSpec::massless(label)?,
        _ => return Err(fmt("unknown rep kind")),
    };
    if mass != rep.mass {
        return Err(fmt("massless section with nonzero mass"));
    }
    if b[11] as usize != rep.fiber_dim() {
        return Err(fmt("component count does not match the rep"));
    }
    let dims: Vec<usize> = (0..3).map(|k| u32::from_le_bytes(take(b, 20 + 4 * k)) as usize).collect();
    let r_min = f64::from_le_bytes(take(b, 32));
    let r_max = f64::from_le_bytes(take(b, 40));
    let grid = Arc::new(make_grid::<T>(dims[0], dims[1], dims[2], r_min, r_max)?);
    let count = grid.len() * rep.fiber_dim();
    if b.len() != HEADER + count * width {
        return Err(fmt("body length does not match the header"));
    }
    let half = width / 2;
    let val = |k: usize| -> T {
        let at = HEADER + k * half;
        if width == 8 {
            cst(f32::from_le_bytes(take(b, at)) as f64)
        } else {
            cst(f64::from_le_bytes(take(b, at)))
        }
    };
    let data = (0..count).map(|k| Complex::new(val(2 * k), val(2 * k + 1))).collect();
    Section::from_data(rep, grid, data)
}

/// JSON description written next to the binary file.
pub fn sidecar_json<T: Real>(s: &Section<T>) -> serde_json::Value {
    let g = &s.grid;
    serde_json::json!({
        "format": "SPLSECT1",
        "value_bytes": 2 * std::mem::size_of::<T>(),
        "rep": s.rep,
        "components": s.dim(),
        "grid": {
            "nr": g.nr, "ntheta": g.nt, "nphi": g.np,
            "r_min": g.r_min, "r_max": g.r_max,
            "radial_nodes": "chebyshev-lobatto ascending",
            "theta_nodes": "(j+1/2)*pi/ntheta",
            "phi_nodes": "2*pi*l/nphi",
        },
        "node_order": "(ir*ntheta+itheta)*nphi+iphi, component innermost",
        "norm": s.norm().to_f64(),
    })
}

/// Writes `path` and `path.json`.
pub fn write_section<T: Real>(s: &Section<T>, path: &Path) -> Result<(), BundleError> {
    std::fs::write(path, section_bytes(s))?;
    let mut side = path.as_os_str().to_owned();
    side.push(".json");
    let text = serde_json::to_string_pretty(&sidecar_json(s)).map_err(|e| BundleError::Io(e.to_string()))?;
    std::fs::write(side, text)?;
    Ok(())
}

pub fn read_section<T: Real>(path: &Path) -> Result<Section<T>, BundleError> {
    read_section_bytes(&std::fs::read(path)?)
}
