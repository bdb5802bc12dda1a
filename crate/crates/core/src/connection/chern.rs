use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::Serialize;

use super::form::{helicity_eigenvector, transport, Path, TransportOptions};
use super::{ConnError, Connection};
use crate::bundle::{RepKind, RepSpec};

/// Lattice used for the first Chern number on one shell.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChernOptions {
    pub nt: usize,
    pub np: usize,
    pub radius: f64,
    /// A plaquette phase closer than this to ±π is unresolved.
    pub margin: f64,
}

impl Default for ChernOptions {
    fn default() -> Self {
        ChernOptions { nt: 48, np: 96, radius: 1.0, margin: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChernResult {
    pub integer: i64,
    /// Sum of plaquette phases over 2π before rounding.
    pub raw: f64,
    pub max_phase: f64,
    pub faces: usize,
}

/// Gauge vectors and link overlaps, normalized to unit modulus.
fn link(conn: &Connection, rep: &RepSpec, path: &Path, a: &[C], b: &[C], opts: &TransportOptions) -> Result<C, ConnError> {
    let d = rep.fiber_dim();
    let t = transport(conn, rep, path, opts)?;
    let mut z = C::new(0.0, 0.0);
    for i in 0..d {
        let ta: C = (0..d).map(|j| t[i * d + j] * a[j]).sum();
        z += b[i].conj() * ta;
    }
    if z.norm() < 1e-6 {
        return Err(ConnError::Resolution("link overlap vanishes; refine the lattice".into()));
    }
    Ok(z / z.norm())
}

/// First Chern number of the helicity line bundle on the shell `|k| = radius`
/// from gauge-invariant plaquette products of transported link variables.
/// Faces are oriented by `(e_θ, e_φ)`.
pub fn chern_number(conn: &Connection, rep: &RepSpec, opts: &ChernOptions) -> Result<ChernResult, ConnError> {
    let RepKind::Massless { helicity: h } = rep.kind else {
        return Err(ConnError::Unsupported("the Chern number is defined for the massless line bundles".into()));
    };
    let (nt, np, r) = (opts.nt, opts.np, opts.radius);
    if nt < 2 || np < 3 || !(r > 0.0) {
        return Err(ConnError::Resolution(format!("lattice {nt}x{np} at radius {r} is too small")));
    }
    let theta = |j: usize| j as f64 * PI / nt as f64;
    let phi = |l: usize| 2.0 * PI * l as f64 / np as f64;
    let point = |j: usize, l: usize| -> [f64; 3] {
        let (t, p) = (theta(j), phi(l));
        [r * t.sin() * p.cos(), r * t.sin() * p.sin(), r * t.cos()]
    };
    // vertex (j, l) for 0 < j < nt; the poles carry one vector each
    let vec_at = |j: usize, l: usize| helicity_eigenvector(rep, point(j, l), h as i32);
    let north = vec_at(0, 0);
    let south = vec_at(nt, 0);
    let vertex = |j: usize, l: usize| -> Vec<C> {
        match j {
            0 => north.clone(),
            j if j == nt => south.clone(),
            _ => vec_at(j, l % np),
        }
    };
    let spacing = (PI / nt as f64).min(2.0 * PI / np as f64);
    // links are phase-projected, so unitarity only guards the integrator
    let topts = TransportOptions { max_step: (spacing / 4.0).min(0.01), unitarity_tol: 1e-6 };

    // meridian link (j, l) -> (j + 1, l); latitude link (j, l) -> (j, l + 1)
    let merid: Vec<C> = (0..nt * np)
        .into_par_iter()
        .map(|n| {
            let (j, l) = (n / np, n % np);
            let path = Path::Meridian { r, phi: phi(l), theta0: theta(j), theta1: theta(j + 1) };
            link(conn, rep, &path, &vertex(j, l), &vertex(j + 1, l), &topts)
        })
        .collect::<Result<_, _>>()?;
    let lat: Vec<C> = (0..(nt - 1) * np)
        .into_par_iter()
        .map(|n| {
            let (j, l) = (n / np + 1, n % np);
            let path = Path::Latitude { r, theta: theta(j), phi0: phi(l), phi1: phi(l + 1) };
            link(conn, rep, &path, &vertex(j, l), &vertex(j, l + 1), &topts)
        })
        .collect::<Result<_, _>>()?;
    let m = |j: usize, l: usize| merid[j * np + l % np];
    let la = |j: usize, l: usize| lat[(j - 1) * np + l % np];

    let mut total = 0.0;
    let mut max_phase: f64 = 0.0;
    let mut faces = 0;
    for j in 0..nt {
        for l in 0..np {
            // (j,l) -> (j+1,l) -> (j+1,l+1) -> (j,l+1) -> (j,l)
            let mut w = m(j, l);
            if j + 1 < nt {
                w *= la(j + 1, l);
            }
            w *= m(j, l + 1).conj();
            if j > 0 {
                w *= la(j, l).conj();
            }
            let ph = w.arg();
            max_phase = max_phase.max(ph.abs());
            total += ph;
            faces += 1;
        }
    }
    if max_phase > PI - opts.margin {
        return Err(ConnError::Resolution(format!(
            "plaquette phase {max_phase:.3} is within {} of π; refine the lattice",
            opts.margin
        )));
    }
    let raw = total / (2.0 * PI);
    Ok(ChernResult { integer: raw.round() as i64, raw, max_phase, faces })
}
