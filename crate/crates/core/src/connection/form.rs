use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::Serialize;

use super::{ConnError, Connection, ConnectionKind, Perturbation};
use crate::bundle::RepSpec;

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn scaled(a: [f64; 3], s: f64) -> [f64; 3] {
    a.map(|x| x * s)
}

/// Coefficient `c(r)` in `A(X) = i c S·(k̂×X) − X·k/(2H²)`.
pub fn spin_coefficient(kind: &ConnectionKind, r: f64, m: f64) -> Result<f64, ConnError> {
    if matches!(kind, ConnectionKind::FlatMassive) && m <= 0.0 {
        return Err(ConnError::SingularLimit("the flat massive connection D+ does not exist at m = 0".into()));
    }
    let h = (r * r + m * m).sqrt();
    let f = kind.weight().expect("weight").eval(r, m)?;
    Ok(f * r / (h * (h + m)) + (1.0 - f) / r)
}

/// Pointwise connection form `A(X)` at momentum `k` as a row-major fiber
/// matrix, so that `D_X ψ = X·∇ψ + A(X) ψ` in the global fiber basis.
pub fn connection_form(conn: &Connection, rep: &RepSpec, k: [f64; 3], x: [f64; 3]) -> Result<Vec<C>, ConnError> {
    if conn.perturbation == Perturbation::DropCross {
        return Err(ConnError::Unsupported("the mutated rotation part has no connection form".into()));
    }
    let d = rep.fiber_dim();
    let m = rep.mass;
    let r = norm(k);
    let h2 = r * r + m * m;
    let c = spin_coefficient(&conn.kind, r, m)?;
    let v = cross(scaled(k, 1.0 / r), x);
    let s = rep.spin_matrices::<f64>();
    let mut a = vec![C::new(0.0, 0.0); d * d];
    for (i, slot) in a.iter_mut().enumerate() {
        let sv = s[0][i] * v[0] + s[1][i] * v[1] + s[2][i] * v[2];
        *slot = C::i() * c * sv;
    }
    let mut diag = C::new(-dot(x, k) / (2.0 * h2), 0.0);
    if let Perturbation::Constant { c, u } = conn.perturbation {
        diag += C::new(0.0, c * dot(x, u));
    }
    for i in 0..d {
        a[i * d + i] += diag;
    }
    Ok(a)
}

/// Smooth path parametrized on `t ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Path {
    /// Shorter great-circle arc between two points of equal norm.
    Geodesic { from: [f64; 3], to: [f64; 3] },
    Latitude { r: f64, theta: f64, phi0: f64, phi1: f64 },
    Meridian { r: f64, phi: f64, theta0: f64, theta1: f64 },
    /// Straight segment along the unit direction `dir`.
    Radial { dir: [f64; 3], r0: f64, r1: f64 },
}

fn spherical(r: f64, theta: f64, phi: f64) -> [f64; 3] {
    [r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos()]
}

impl Path {
    pub fn point(&self, t: f64) -> [f64; 3] {
        match *self {
            Path::Geodesic { from, to } => {
                let r = norm(from);
                let om = self.angle();
                if om < 1e-300 {
                    return from;
                }
                let (a, b) = (((1.0 - t) * om).sin() / om.sin(), (t * om).sin() / om.sin());
                let p: [f64; 3] = std::array::from_fn(|i| a * from[i] + b * to[i]);
                scaled(p, r / norm(p))
            }
            Path::Latitude { r, theta, phi0, phi1 } => spherical(r, theta, phi0 + t * (phi1 - phi0)),
            Path::Meridian { r, phi, theta0, theta1 } => spherical(r, theta0 + t * (theta1 - theta0), phi),
            Path::Radial { dir, r0, r1 } => scaled(dir, r0 + t * (r1 - r0)),
        }
    }

    pub fn velocity(&self, t: f64) -> [f64; 3] {
        match *self {
            Path::Geodesic { from, .. } => {
                // p rotated by 90° in the plane of the arc, towards `to`
                let n = cross(from, self.end());
                let nn = norm(n);
                if nn < 1e-300 {
                    return [0.0; 3];
                }
                scaled(cross(scaled(n, 1.0 / nn), self.point(t)), self.angle())
            }
            Path::Latitude { r, theta, phi0, phi1 } => {
                let phi = phi0 + t * (phi1 - phi0);
                scaled([-phi.sin(), phi.cos(), 0.0], r * theta.sin() * (phi1 - phi0))
            }
            Path::Meridian { r, phi, theta0, theta1 } => {
                let th = theta0 + t * (theta1 - theta0);
                scaled([th.cos() * phi.cos(), th.cos() * phi.sin(), -th.sin()], r * (theta1 - theta0))
            }
            Path::Radial { dir, r0, r1 } => scaled(dir, r1 - r0),
        }
    }

    fn end(&self) -> [f64; 3] {
        match *self {
            Path::Geodesic { to, .. } => to,
            _ => self.point(1.0),
        }
    }

    /// Swept angle on the shell; relative length for radial segments.
    pub fn angle(&self) -> f64 {
        match *self {
            Path::Geodesic { from, to } => norm(cross(from, to)).atan2(dot(from, to)),
            Path::Latitude { theta, phi0, phi1, .. } => (theta.sin() * (phi1 - phi0)).abs(),
            Path::Meridian { theta0, theta1, .. } => (theta1 - theta0).abs(),
            Path::Radial { r0, r1, .. } => (r1 - r0).abs() / r0.min(r1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransportOptions {
    /// Largest RK4 step, as an angle on the shell.
    pub max_step: f64,
    /// Allowed `max |U†U − 1|` for the transport map.
    pub unitarity_tol: f64,
}

impl Default for TransportOptions {
    fn default() -> Self {
        TransportOptions { max_step: 2.5e-3, unitarity_tol: 1e-8 }
    }
}

fn matmul(a: &[C], b: &[C], d: usize) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let aik = a[i * d + k];
            if aik == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += aik * b[k * d + j];
            }
        }
    }
    out
}

pub(crate) fn identity(d: usize) -> Vec<C> {
    let mut u = vec![C::new(0.0, 0.0); d * d];
    for i in 0..d {
        u[i * d + i] = C::new(1.0, 0.0);
    }
    u
}

/// `max |U†U − s·1|`.
fn unitarity_defect(u: &[C], d: usize, s2: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let mut s = C::new(0.0, 0.0);
            for k in 0..d {
                s += u[k * d + i].conj() * u[k * d + j];
            }
            let target = if i == j { s2 } else { 0.0 };
            worst = worst.max((s - target).norm());
        }
    }
    worst
}

/// Parallel-transport map along `path`: solves `dU/dt = −A(ṡ) U` by
/// classical RK4 with `ceil(angle / max_step)` steps. The map preserves the
/// fiber norm weighted by `1/H`, so `U†U = H(end)/H(start)`.
pub fn transport(conn: &Connection, rep: &RepSpec, path: &Path, opts: &TransportOptions) -> Result<Vec<C>, ConnError> {
    let d = rep.fiber_dim();
    let steps = ((path.angle() / opts.max_step).ceil() as usize).max(1);
    let dt = 1.0 / steps as f64;
    let rhs = |t: f64, u: &[C]| -> Result<Vec<C>, ConnError> {
        let a = connection_form(conn, rep, path.point(t), path.velocity(t))?;
        Ok(matmul(&a, u, d).into_iter().map(|z| -z).collect())
    };
    let axpy = |u: &[C], k: &[C], s: f64| -> Vec<C> { u.iter().zip(k).map(|(a, b)| a + b * s).collect() };
    let mut u = identity(d);
    for n in 0..steps {
        let t = n as f64 * dt;
        let k1 = rhs(t, &u)?;
        let k2 = rhs(t + 0.5 * dt, &axpy(&u, &k1, 0.5 * dt))?;
        let k3 = rhs(t + 0.5 * dt, &axpy(&u, &k2, 0.5 * dt))?;
        let k4 = rhs(t + dt, &axpy(&u, &k3, dt))?;
        for i in 0..u.len() {
            u[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    let energy = |p: [f64; 3]| (dot(p, p) + rep.mass * rep.mass).sqrt();
    let defect = unitarity_defect(&u, d, energy(path.point(1.0)) / energy(path.point(0.0)));
    if defect > opts.unitarity_tol {
        return Err(ConnError::Accuracy(format!(
            "transport map is non-unitary by {defect:.2e}; reduce the step"
        )));
    }
    Ok(u)
}

/// Closed convex geodesic polygon on one shell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyLoop {
    pub vertices: Vec<[f64; 3]>,
    /// Signed enclosed solid angle; positive when the loop runs
    /// counter-clockwise seen from outside the shell.
    pub solid_angle: f64,
}

fn interior_angle(a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> f64 {
    let bh = scaled(b, 1.0 / norm(b));
    let t1: [f64; 3] = std::array::from_fn(|i| a[i] - dot(a, bh) * bh[i]);
    let t2: [f64; 3] = std::array::from_fn(|i| c[i] - dot(c, bh) * bh[i]);
    norm(cross(t1, t2)).atan2(dot(t1, t2))
}

impl HolonomyLoop {
    pub fn new(vertices: Vec<[f64; 3]>) -> Result<Self, ConnError> {
        let n = vertices.len();
        if n < 2 {
            return Err(ConnError::InvalidLoop("need at least two vertices".into()));
        }
        let r = norm(vertices[0]);
        if !(r > 0.0) || vertices.iter().any(|v| (norm(*v) - r).abs() > 1e-12 * r) {
            return Err(ConnError::InvalidLoop("vertices must lie on one shell".into()));
        }
        if n == 2 {
            return Ok(HolonomyLoop { vertices, solid_angle: 0.0 });
        }
        let turns: Vec<f64> = (0..n)
            .map(|i| dot(cross(vertices[i], vertices[(i + 1) % n]), vertices[(i + 2) % n]))
            .collect();
        let sign = turns[0].signum();
        if turns.iter().any(|t| t.abs() < 1e-14 * r * r * r || t.signum() != sign) {
            return Err(ConnError::InvalidLoop("polygon must be convex and non-degenerate".into()));
        }
        let angles: f64 = (0..n).map(|i| interior_angle(vertices[(i + n - 1) % n], vertices[i], vertices[(i + 1) % n])).sum();
        let excess = angles - (n as f64 - 2.0) * PI;
        Ok(HolonomyLoop { vertices, solid_angle: sign * excess })
    }

    /// Regular quadrilateral about `center` (direction) on the shell of
    /// radius `r` with the given solid angle, counter-clockwise from outside.
    pub fn square(r: f64, center: [f64; 3], solid_angle: f64) -> Result<Self, ConnError> {
        if !(solid_angle > 0.0 && solid_angle < 2.0 * PI) {
            return Err(ConnError::InvalidLoop(format!("solid angle {solid_angle} out of range")));
        }
        let n = scaled(center, 1.0 / norm(center));
        let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = {
            let c = cross(n, seed);
            scaled(c, 1.0 / norm(c))
        };
        let w = cross(n, u);
        let verts = |rho: f64| -> Vec<[f64; 3]> {
            (0..4)
                .map(|j| {
                    let a = j as f64 * PI / 2.0;
                    std::array::from_fn(|i| r * (rho.cos() * n[i] + rho.sin() * (a.cos() * u[i] + a.sin() * w[i])))
                })
                .collect()
        };
        let (mut lo, mut hi) = (1e-9, PI / 2.0 - 1e-9);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if HolonomyLoop::new(verts(mid))?.solid_angle < solid_angle {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        HolonomyLoop::new(verts(0.5 * (lo + hi)))
    }

    /// Out-and-back loop along one arc; encloses nothing.
    pub fn degenerate(a: [f64; 3], b: [f64; 3]) -> Result<Self, ConnError> {
        HolonomyLoop::new(vec![a, b])
    }

    pub fn edges(&self) -> Vec<Path> {
        let n = self.vertices.len();
        (0..n)
            .map(|i| Path::Geodesic { from: self.vertices[i], to: self.vertices[(i + 1) % n] })
            .collect()
    }
}

/// End-to-start fiber map around a loop, based at its first vertex.
#[derive(Clone, Debug, Serialize)]
pub struct Holonomy {
    pub d: usize,
    pub base: [f64; 3],
    pub solid_angle: f64,
    /// Row-major `d x d`; maps a fiber vector at the base point to its
    /// parallel transport once around the loop.
    pub matrix: Vec<C>,
}

impl Holonomy {
    /// `max |U − 1|`.
    pub fn defect(&self) -> f64 {
        let id = identity(self.d);
        self.matrix.iter().zip(&id).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `arg ⟨v, U v⟩` for a unit fiber vector `v`.
    pub fn phase_on(&self, v: &[C]) -> f64 {
        let d = self.d;
        let mut s = C::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                s += v[i].conj() * self.matrix[i * d + j] * v[j];
            }
        }
        s.arg()
    }

    /// `F(e_θ, e_φ) ≈ −(U − 1) / (Ω r²)`; first order in the loop size.
    pub fn curvature_estimate(&self) -> Vec<C> {
        let area = self.solid_angle * dot(self.base, self.base);
        let id = identity(self.d);
        self.matrix.iter().zip(&id).map(|(u, e)| -(u - e) / area).collect()
    }

    /// Signed rotation angle about `k̂` at the base point: magnitude from the
    /// spin-`s` character `tr U = sin((2s+1)θ/2) / sin(θ/2)`, sign from the
    /// phase `−sθ` on the top `χ` eigenvector. Zero for a scalar fiber.
    pub fn rotation_angle(&self, rep: &RepSpec) -> f64 {
        let d = self.d;
        if d == 1 {
            return 0.0;
        }
        let tr: f64 = (0..d).map(|i| self.matrix[i * d + i].re).sum();
        let n = d as f64;
        let character = |t: f64| if t < 1e-12 { n } else { (n * t / 2.0).sin() / (t / 2.0).sin() };
        let (mut lo, mut hi) = (0.0, 2.0 * PI / n);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if character(mid) > tr {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let top = (d as i32 - 1) / 2;
        let v = helicity_eigenvector(rep, self.base, top);
        let sign = if self.phase_on(&v) > 0.0 { -1.0 } else { 1.0 };
        sign * 0.5 * (lo + hi)
    }
}

/// Unit eigenvector of the helicity `χ = k̂·S` at `k` for eigenvalue `eig`.
pub fn helicity_eigenvector(rep: &RepSpec, k: [f64; 3], eig: i32) -> Vec<C> {
    let d = rep.fiber_dim();
    let s = rep.spin_matrices::<f64>();
    let kh = scaled(k, 1.0 / norm(k));
    let chi: Vec<C> = (0..d * d).map(|i| s[0][i] * kh[0] + s[1][i] * kh[1] + s[2][i] * kh[2]).collect();
    let top = (d as i32 - 1) / 2;
    let levels: Vec<i32> = if d == 1 { vec![0] } else { (-top..=top).collect() };
    let seeds: Vec<Vec<C>> = (0..3)
        .map(|s| (0..d).map(|i| C::new(1.0 + (i + s) as f64 * 0.37, 0.21 * (i * (s + 1)) as f64 - 0.3)).collect())
        .collect();
    let mut best: Vec<C> = vec![C::new(1.0, 0.0); d];
    let mut best_norm = -1.0;
    for mut v in seeds {
        for &l in levels.iter().filter(|&&l| l != eig) {
            let mv: Vec<C> = (0..d).map(|i| (0..d).map(|j| chi[i * d + j] * v[j]).sum::<C>() - v[i] * l as f64).collect();
            v = mv.into_iter().map(|z| z / (eig - l) as f64).collect();
        }
        let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nv > best_norm {
            best_norm = nv;
            best = v.into_iter().map(|z| z / nv).collect();
        }
    }
    best
}

pub fn holonomy(conn: &Connection, rep: &RepSpec, lp: &HolonomyLoop, opts: &TransportOptions) -> Result<Holonomy, ConnError> {
    let d = rep.fiber_dim();
    let mut u = identity(d);
    for edge in lp.edges() {
        let t = transport(conn, rep, &edge, opts)?;
        u = matmul(&t, &u, d);
    }
    Ok(Holonomy { d, base: lp.vertices[0], solid_angle: lp.solid_angle, matrix: u })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_has_the_requested_area() {
        let lp = HolonomyLoop::square(1.5, [0.3, 0.4, 0.8], 0.05).unwrap();
        assert!((lp.solid_angle - 0.05).abs() < 1e-12);
        let mut rev = lp.vertices.clone();
        rev.reverse();
        assert!((HolonomyLoop::new(rev).unwrap().solid_angle + 0.05).abs() < 1e-12);
    }

    #[test]
    fn octant_triangle_area() {
        let lp = HolonomyLoop::new(vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!((lp.solid_angle - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn bad_loops_are_rejected() {
        assert!(HolonomyLoop::new(vec![[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]).is_err());
        let bowtie = vec![[1.0, 0.1, 0.1], [1.0, -0.1, -0.1], [1.0, 0.1, -0.1], [1.0, -0.1, 0.1]]
            .into_iter()
            .map(|v: [f64; 3]| scaled(v, 1.0 / norm(v)))
            .collect();
        assert!(HolonomyLoop::new(bowtie).is_err());
    }

    #[test]
    fn path_velocity_matches_finite_difference() {
        let paths = [
            Path::Geodesic { from: [1.0, 0.0, 0.0], to: [0.0, 0.6, 0.8] },
            Path::Latitude { r: 2.0, theta: 0.7, phi0: 0.1, phi1: 0.4 },
            Path::Meridian { r: 2.0, phi: 0.7, theta0: 0.1, theta1: 0.4 },
        ];
        for p in paths {
            let (t, e) = (0.37, 1e-6);
            let fd: Vec<f64> = (0..3).map(|i| (p.point(t + e)[i] - p.point(t - e)[i]) / (2.0 * e)).collect();
            let v = p.velocity(t);
            for i in 0..3 {
                assert!((fd[i] - v[i]).abs() < 1e-6, "{p:?}");
            }
        }
    }

    #[test]
    fn coarse_steps_are_reported() {
        let rep = RepSpec::massive(1, 1.0).unwrap();
        let path = Path::Latitude { r: 1.0, theta: 1.0, phi0: 0.0, phi1: 6.0 };
        let opts = TransportOptions { max_step: 3.0, unitarity_tol: 1e-8 };
        let err = transport(&Connection::new(ConnectionKind::Boost), &rep, &path, &opts).unwrap_err();
        assert!(matches!(err, ConnError::Accuracy(_)));
    }
}
