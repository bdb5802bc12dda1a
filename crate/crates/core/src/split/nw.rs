use std::sync::Arc;

use num_complex::{Complex, Complex64 as C};
use rayon::prelude::*;
use serde::Serialize;

use super::{rel, SplitOperators, Triple};
use crate::bundle::{apply_generator, apply_vector, cst, gradient, Gen, Grid, Real, RepSpec, Scheme, Section, VecGen};
use crate::connection::{
    components, curvature_commutator, holonomy, transport, ConnError, Connection, ConnectionKind, FProfile, HolonomyLoop,
    Path, TangentField, TransportOptions,
};

fn require_mass(rep: &RepSpec) -> Result<(), ConnError> {
    if rep.mass <= 0.0 {
        return Err(ConnError::SingularLimit("the Newton-Wigner construction needs m > 0".into()));
    }
    Ok(())
}

/// `Q = (1/H)(K − iP/(2H)) − P×(HJ + P×K) / (mH(H+m))` from the generator actions.
pub fn nw_closed_form<T: Real>(psi: &Section<T>, scheme: &Scheme) -> Result<Triple<T>, ConnError> {
    require_mass(&psi.rep)?;
    let k = apply_vector(VecGen::K, psi, scheme)?;
    let j = apply_vector(VecGen::J, psi, scheme)?;
    let g = psi.grid.clone();
    let d = psi.dim();
    let m = cst::<T>(psi.rep.mass);
    let half = cst::<T>(0.5);
    Ok([0, 1, 2].map(|a| {
        let data = (0..psi.data.len())
            .map(|i| {
                let n = i / d;
                let p = g.k_vec(n);
                let r = g.r[g.coords(n).0];
                let h = (r * r + m * m).sqrt();
                let kk = [k[0].data[i], k[1].data[i], k[2].data[i]];
                let jj = [j[0].data[i], j[1].data[i], j[2].data[i]];
                // v = HJ + P×K
                let v: [Complex<T>; 3] = std::array::from_fn(|c| {
                    let (b, e) = ((c + 1) % 3, (c + 2) % 3);
                    jj[c] * h + kk[e] * p[b] - kk[b] * p[e]
                });
                let (b, e) = ((a + 1) % 3, (a + 2) % 3);
                let pxv = v[e] * p[b] - v[b] * p[e];
                let shift = Complex::new(T::zero(), -(p[a] * half / h));
                (kk[a] + psi.data[i] * shift) / h - pxv / (m * h * (h + m))
            })
            .collect();
        psi.with_data(data)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NwMode {
    /// `i D⁺_{e_a}`.
    Affine,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NwOperator {
    pub mode: NwMode,
    pub scheme: Scheme,
}

impl NwOperator {
    pub fn apply<T: Real>(&self, psi: &Section<T>) -> Result<Triple<T>, ConnError> {
        match self.mode {
            NwMode::ClosedForm => nw_closed_form(psi, &self.scheme),
            NwMode::Affine => {
                require_mass(&psi.rep)?;
                let c = components(&Connection::new(ConnectionKind::FlatMassive), psi, &self.scheme)?;
                Ok(c.map(|s| s.scale(Complex::new(T::zero(), T::one()))))
            }
        }
    }
}

/// `max_a ‖(iD⁺_{e_a} − Q_a)ψ‖ / ‖ψ‖`.
pub fn nw_match_residual<T: Real>(psi: &Section<T>, scheme: &Scheme) -> Result<f64, ConnError> {
    let a = NwOperator { mode: NwMode::Affine, scheme: *scheme }.apply(psi)?;
    let b = NwOperator { mode: NwMode::ClosedForm, scheme: *scheme }.apply(psi)?;
    Ok((0..3).map(|i| rel(&a[i].sub(&b[i]), psi)).fold(0.0, f64::max))
}

/// `d` sections, parallel for `D⁺` along a spanning tree rooted at one node:
/// a radial spoke to every shell, meridians on each shell, then latitudes.
/// Orthonormal at every node in the fiber metric weighted by `H_ref/H`.
#[derive(Clone, Debug)]
pub struct ParallelFrame {
    pub rep: RepSpec,
    pub grid: Arc<Grid<f64>>,
    pub reference: usize,
    pub tree: &'static str,
    /// Frame vector `j` at every node.
    pub sections: Vec<Section<f64>>,
}

pub const FRAME_TREE: &str = "radial spoke from the reference node, then meridian, then latitude";

fn matmul(a: &[C], b: &[C], d: usize) -> Vec<C> {
    (0..d * d).map(|ij| (0..d).map(|k| a[ij / d * d + k] * b[k * d + ij % d]).sum()).collect()
}

pub fn parallel_frame(rep: RepSpec, grid: Arc<Grid<f64>>, reference: usize) -> Result<ParallelFrame, ConnError> {
    require_mass(&rep)?;
    let g = &*grid;
    let d = rep.fiber_dim();
    let conn = Connection::new(ConnectionKind::FlatMassive);
    let opts = TransportOptions { max_step: g.h_theta().min(g.h_phi()) / 4.0, unitarity_tol: 1e-8 };
    let (ir0, it0, ip0) = g.coords(reference);
    let dir = g.e_k(it0, ip0);
    let mut id = vec![C::new(0.0, 0.0); d * d];
    for i in 0..d {
        id[i * d + i] = C::new(1.0, 0.0);
    }
    let shells: Vec<Vec<Vec<C>>> = (0..g.nr)
        .into_par_iter()
        .map(|ir| -> Result<Vec<Vec<C>>, ConnError> {
            let spoke = if ir == ir0 {
                id.clone()
            } else {
                transport(&conn, &rep, &Path::Radial { dir, r0: g.r[ir0], r1: g.r[ir] }, &opts)?
            };
            let r = g.r[ir];
            let mut meridian = vec![Vec::new(); g.nt];
            meridian[it0] = spoke;
            for it in (it0 + 1)..g.nt {
                let p = Path::Meridian { r, phi: g.phi[ip0], theta0: g.theta[it - 1], theta1: g.theta[it] };
                meridian[it] = matmul(&transport(&conn, &rep, &p, &opts)?, &meridian[it - 1], d);
            }
            for it in (0..it0).rev() {
                let p = Path::Meridian { r, phi: g.phi[ip0], theta0: g.theta[it + 1], theta1: g.theta[it] };
                meridian[it] = matmul(&transport(&conn, &rep, &p, &opts)?, &meridian[it + 1], d);
            }
            let mut out = vec![Vec::new(); g.nt * g.np];
            for it in 0..g.nt {
                let mut u = meridian[it].clone();
                out[it * g.np + ip0] = u.clone();
                for step in 1..g.np {
                    let b = (ip0 + step) % g.np;
                    let phi0 = g.phi[ip0] + (step - 1) as f64 * g.h_phi();
                    let p = Path::Latitude { r, theta: g.theta[it], phi0, phi1: phi0 + g.h_phi() };
                    u = matmul(&transport(&conn, &rep, &p, &opts)?, &u, d);
                    out[it * g.np + b] = u.clone();
                }
            }
            Ok(out)
        })
        .collect::<Result<_, _>>()?;
    let maps: Vec<&Vec<C>> = shells.iter().flatten().collect();
    let sections = (0..d)
        .map(|j| {
            let data = (0..g.len() * d).map(|i| maps[i / d][(i % d) * d + j]).collect();
            Section::from_data(rep, grid.clone(), data)
        })
        .collect::<Result<_, _>>()?;
    Ok(ParallelFrame { rep, grid, reference, tree: FRAME_TREE, sections })
}

impl ParallelFrame {
    fn column(&self, n: usize, j: usize) -> &[C] {
        self.sections[j].fiber(n)
    }

    /// Frame coefficients `g_j(n)` with `ψ = Σ_j g_j E_j`.
    pub fn coefficients(&self, psi: &Section<f64>) -> Vec<Vec<C>> {
        let d = self.rep.fiber_dim();
        (0..d)
            .map(|j| {
                (0..self.grid.len())
                    .map(|n| {
                        let e = self.column(n, j);
                        let s: f64 = e.iter().map(|z| z.norm_sqr()).sum();
                        e.iter().zip(psi.fiber(n)).map(|(a, b)| a.conj() * b).sum::<C>() / s
                    })
                    .collect()
            })
            .collect()
    }

    /// `Σ_j g_j E_j`.
    pub fn assemble(&self, g: &[Vec<C>]) -> Section<f64> {
        let d = self.rep.fiber_dim();
        let data = (0..self.grid.len() * d)
            .map(|i| (0..d).map(|j| g[j][i / d] * self.sections[j].data[i]).sum())
            .collect();
        Section::from_data(self.rep, self.grid.clone(), data).expect("shape")
    }

    /// `max_n |E†E · H_ref/H − 1|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let d = self.rep.fiber_dim();
        let g = &*self.grid;
        let m = self.rep.mass;
        let energy = |n: usize| {
            let r = g.r[g.coords(n).0];
            (r * r + m * m).sqrt()
        };
        let h0 = energy(self.reference);
        let mut worst: f64 = 0.0;
        for n in 0..g.len() {
            for i in 0..d {
                for j in 0..d {
                    let s: C = self.column(n, i).iter().zip(self.column(n, j)).map(|(a, b)| a.conj() * b).sum();
                    let e = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((s * h0 / energy(n) - e).norm());
                }
            }
        }
        worst
    }
}

/// `max_a ‖Q_a ψ − Σ_j (i∂_a g_j) E_j‖ / ‖ψ‖`: in the parallel frame the
/// closed-form operator is the component-wise gradient.
pub fn nw_coordinate_residual(frame: &ParallelFrame, psi: &Section<f64>, scheme: &Scheme) -> Result<f64, ConnError> {
    let q = nw_closed_form(psi, scheme)?;
    let scalar = RepSpec::massive(0, 1.0).expect("valid");
    let grads: Vec<[Vec<C>; 3]> = frame
        .coefficients(psi)
        .into_iter()
        .map(|g| Section::from_data(scalar, frame.grid.clone(), g).map(|s| gradient(&s)))
        .collect::<Result<_, _>>()?;
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        let ig: Vec<Vec<C>> = grads.iter().map(|gr| gr[a].iter().map(|z| z * C::i()).collect()).collect();
        worst = worst.max(rel(&q[a].sub(&frame.assemble(&ig)), psi));
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinFrameReport {
    pub nodes: Vec<usize>,
    /// `max |E⁻¹ S_a E − S_a^std|` over sampled nodes, axes and entries.
    pub max_deviation: f64,
    /// Frame matrix of `S_3` at the first sampled node.
    pub s3_first: Vec<C>,
}

/// Matrix of the flat-connection spin `S^{D⁺}` in the parallel frame.
pub fn spin_in_frame(frame: &ParallelFrame, scheme: &Scheme, nodes: &[usize]) -> Result<SpinFrameReport, ConnError> {
    let d = frame.rep.fiber_dim();
    let ops = SplitOperators::new(ConnectionKind::FlatMassive, *scheme);
    let applied: Vec<Triple<f64>> = frame.sections.iter().map(|e| ops.spin(e)).collect::<Result<_, _>>()?;
    let std = frame.rep.spin_matrices::<f64>();
    let mut worst: f64 = 0.0;
    let mut s3_first = Vec::new();
    for (k, &n) in nodes.iter().enumerate() {
        for a in 0..3 {
            let cols: Vec<Vec<C>> = (0..d).map(|j| applied[j][a].fiber(n).to_vec()).collect();
            let col_sections: Vec<Vec<C>> = (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| {
                            let e = frame.column(n, i);
                            let s: f64 = e.iter().map(|z| z.norm_sqr()).sum();
                            e.iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum::<C>() / s
                        })
                        .collect()
                })
                .collect();
            let mat: Vec<C> = (0..d * d).map(|ij| col_sections[ij / d][ij % d]).collect();
            for (x, y) in mat.iter().zip(&std[a]) {
                worst = worst.max((x - y).norm());
            }
            if k == 0 && a == 2 {
                s3_first = mat;
            }
        }
    }
    Ok(SpinFrameReport { nodes: nodes.to_vec(), max_deviation: worst, s3_first })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub solid_angle: f64,
    pub radius: f64,
    /// `max |U − 1|` for `D⁺`.
    pub flat_defect: f64,
    pub boost_angle: f64,
    /// `Ω r² / H²`.
    pub predicted_angle: f64,
}

/// Holonomies of `D⁺` and of the boost connection around each loop.
pub fn probe_loops(rep: &RepSpec, loops: &[HolonomyLoop], opts: &TransportOptions) -> Result<Vec<ProbeReport>, ConnError> {
    require_mass(rep)?;
    loops
        .par_iter()
        .map(|lp| {
            let flat = holonomy(&Connection::new(ConnectionKind::FlatMassive), rep, lp, opts)?;
            let boost = holonomy(&Connection::new(ConnectionKind::Boost), rep, lp, opts)?;
            let r = lp.vertices[0].iter().map(|x| x * x).sum::<f64>().sqrt();
            Ok(ProbeReport {
                solid_angle: lp.solid_angle,
                radius: r,
                flat_defect: flat.defect(),
                boost_angle: boost.rotation_angle(rep),
                predicted_angle: lp.solid_angle * r * r / (r * r + rep.mass * rep.mass),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub lambda: f64,
    /// `‖F^f(e_θ, e_φ)ψ‖ / ‖ψ‖`.
    pub measured: f64,
    /// Same norm of `i(1 − λ²)χψ/|P|²`.
    pub predicted: f64,
    /// `‖F^f ψ − prediction‖ / ‖ψ‖`.
    pub deviation: f64,
}

/// Curvature of `f = λH/m` for each `λ`.
pub fn f_plus_scan<T: Real>(psi: &Section<T>, lambdas: &[f64], scheme: &Scheme) -> Result<Vec<ScanRow>, ConnError> {
    require_mass(&psi.rep)?;
    let chi = apply_generator(Gen::Chi, psi, scheme)?;
    let g = psi.grid.clone();
    lambdas
        .iter()
        .map(|&lambda| {
            let conn = Connection::new(ConnectionKind::Affine(FProfile::EnergyRatio(lambda)));
            let f = curvature_commutator(&conn, &TangentField::ETheta, &TangentField::EPhi, psi, scheme)?;
            let pred = chi.mul_by(|n| {
                let r = g.r[g.coords(n).0];
                Complex::new(T::zero(), cst::<T>(1.0 - lambda * lambda) / (r * r))
            });
            Ok(ScanRow { lambda, measured: rel(&f, psi), predicted: rel(&pred, psi), deviation: rel(&f.sub(&pred), psi) })
        })
        .collect()
}
