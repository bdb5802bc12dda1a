use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cst, levi, BundleError, Real, RepKind, Section};

/// Generator selector. Indices are zero-based Cartesian axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    H,
    P(u8),
    J(u8),
    K(u8),
    Chi,
    JPar(u8),
    JPerp(u8),
    KPar(u8),
    KPerp(u8),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VecGen {
    P,
    J,
    K,
    JPar,
    JPerp,
    KPar,
    KPerp,
}

/// Free parameters of the discrete generator actions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    /// Sign `σ` of the spin term `σ S×P/(H+m)` in the massive boost.
    pub boost_sign: f64,
    /// Coefficient `γ` of an extra `iγP/H` in the boost. Zero is the value
    /// for which `K` is Hermitian under `d³k/ω`.
    pub weight_shift: f64,
    /// Allowed `max|k̂·ψ| / max|ψ|` after a transverse massless operation.
    pub eps_perp: f64,
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme { boost_sign: -1.0, weight_shift: 0.0, eps_perp: 0.1 }
    }
}

/// Spherical partial derivatives `∂_r, ∂_θ, ∂_φ` in section layout.
pub struct Partials<T> {
    pub dr: Vec<Complex<T>>,
    pub dt: Vec<Complex<T>>,
    pub dp: Vec<Complex<T>>,
}

const STENCIL: [(isize, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];

pub fn partials<T: Real>(psi: &Section<T>) -> Partials<T> {
    let g = &*psi.grid;
    let d = psi.dim();
    let n = psi.data.len();
    let data = &psi.data;
    let ct = T::one() / (cst::<T>(12.0) * g.h_theta());
    let cp = T::one() / (cst::<T>(12.0) * g.h_phi());
    let at = |ir: usize, it: usize, ip: usize, c: usize| data[g.index(ir, it, ip) * d + c];
    let dr = (0..n)
        .into_par_iter()
        .map(|i| {
            let (ir, it, ip) = g.coords(i / d);
            let row = &g.d_r[ir * g.nr..(ir + 1) * g.nr];
            let mut s = Complex::new(T::zero(), T::zero());
            for (j, w) in row.iter().enumerate() {
                s += at(j, it, ip, i % d) * *w;
            }
            s
        })
        .collect();
    let dt = (0..n)
        .into_par_iter()
        .map(|i| {
            let (ir, it, ip) = g.coords(i / d);
            let mut s = Complex::new(T::zero(), T::zero());
            for (off, w) in STENCIL {
                let (jt, jp) = g.theta_neighbour(it, ip, off);
                s += at(ir, jt, jp, i % d) * cst::<T>(w);
            }
            s * ct
        })
        .collect();
    let dp = (0..n)
        .into_par_iter()
        .map(|i| {
            let (ir, it, ip) = g.coords(i / d);
            let mut s = Complex::new(T::zero(), T::zero());
            for (off, w) in STENCIL {
                let jp = (ip as isize + off).rem_euclid(g.np as isize) as usize;
                s += at(ir, it, jp, i % d) * cst::<T>(w);
            }
            s * cp
        })
        .collect();
    Partials { dr, dt, dp }
}

/// Cartesian gradient of every fiber component.
pub fn gradient<T: Real>(psi: &Section<T>) -> [Vec<Complex<T>>; 3] {
    let p = partials(psi);
    gradient_from(psi, &p)
}

fn gradient_from<T: Real>(psi: &Section<T>, p: &Partials<T>) -> [Vec<Complex<T>>; 3] {
    let g = &*psi.grid;
    let d = psi.dim();
    std::array::from_fn(|a| {
        (0..psi.data.len())
            .map(|i| {
                let (ir, it, ip) = g.coords(i / d);
                let r = g.r[ir];
                let ek = g.e_k(it, ip)[a];
                let et = g.e_theta(it, ip)[a];
                let ep = g.e_phi(ip)[a];
                p.dr[i] * ek + p.dt[i] * (et / r) + p.dp[i] * (ep / (r * g.sin_t[it]))
            })
            .collect()
    })
}

fn i_times<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(-z.im, z.re)
}

/// Pointwise `Σ_b M_b(node) ψ` where `M` is a fiber matrix built per node.
fn fiber_map<T: Real>(
    psi: &Section<T>,
    mat: impl Fn(usize) -> Vec<Complex<T>> + Sync,
) -> Vec<Complex<T>> {
    let d = psi.dim();
    (0..psi.grid.len())
        .into_par_iter()
        .flat_map_iter(|node| {
            let m = mat(node);
            let v = psi.fiber(node);
            (0..d)
                .map(|r| {
                    let mut s = Complex::new(T::zero(), T::zero());
                    for c in 0..d {
                        s += m[r * d + c] * v[c];
                    }
                    s
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn check_drift<T: Real>(op: &str, out: &Section<T>, scheme: &Scheme) -> Result<(), BundleError> {
    if out.rep.transverse_helicity().is_none() {
        return Ok(());
    }
    let peak = out.max_abs();
    if peak == T::zero() {
        return Ok(());
    }
    let drift = (out.transverse_violation() / peak).to_f64().unwrap();
    if drift > scheme.eps_perp {
        return Err(BundleError::ConstraintDrift { op: op.to_string(), drift, tol: scheme.eps_perp });
    }
    Ok(())
}

fn angular_momentum<T: Real>(psi: &Section<T>, p: &Partials<T>) -> [Vec<Complex<T>>; 3] {
    let g = &*psi.grid;
    let d = psi.dim();
    let s = psi.rep.spin_matrices::<T>();
    std::array::from_fn(|a| {
        let spin = fiber_map(psi, |_| s[a].clone());
        (0..psi.data.len())
            .map(|i| {
                let (_, it, ip) = g.coords(i / d);
                let et = g.e_theta(it, ip)[a];
                let ep = g.e_phi(ip)[a];
                // -i (k×∇)_a = -i (e_φ ∂_θ - e_θ ∂_φ / sinθ)_a
                let orb = p.dt[i] * ep - p.dp[i] * (et / g.sin_t[it]);
                spin[i] - i_times(orb)
            })
            .collect()
    })
}

fn helicity<T: Real>(psi: &Section<T>) -> Vec<Complex<T>> {
    let g = &*psi.grid;
    let s = psi.rep.spin_matrices::<T>();
    let d = psi.dim();
    fiber_map(psi, |node| {
        let (_, it, ip) = g.coords(node);
        let e = g.e_k(it, ip);
        (0..d * d).map(|x| s[0][x] * e[0] + s[1][x] * e[1] + s[2][x] * e[2]).collect()
    })
}

fn boosts<T: Real>(psi: &Section<T>, p: &Partials<T>, scheme: &Scheme) -> [Vec<Complex<T>>; 3] {
    let g = &*psi.grid;
    let d = psi.dim();
    let m = cst::<T>(psi.rep.mass);
    let gamma = cst::<T>(scheme.weight_shift);
    match psi.rep.kind {
        RepKind::Massive { .. } => {
            let grad = gradient_from(psi, p);
            let s = psi.rep.spin_matrices::<T>();
            let sigma = cst::<T>(scheme.boost_sign);
            std::array::from_fn(|a| {
                // σ (S×k)_a / (H+m) = σ ε_abc S_b k_c / (H+m)
                let spin = fiber_map(psi, |node| {
                    let k = g.k_vec(node);
                    let r = g.r[g.coords(node).0];
                    let h = (r * r + m * m).sqrt();
                    let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
                    for b in 0..3 {
                        for c in 0..3 {
                            let e = levi(a, b, c);
                            if e != 0 {
                                let f = cst::<T>(e as f64) * k[c] * sigma / (h + m);
                                for (o, sb) in out.iter_mut().zip(&s[b]) {
                                    *o += *sb * f;
                                }
                            }
                        }
                    }
                    out
                });
                (0..psi.data.len())
                    .map(|i| {
                        let node = i / d;
                        let r = g.r[g.coords(node).0];
                        let h = (r * r + m * m).sqrt();
                        let ka = g.k_vec(node)[a];
                        i_times(grad[a][i] * h + psi.data[i] * (gamma * ka / h)) + spin[i]
                    })
                    .collect()
            })
        }
        RepKind::Massless { .. } => {
            // K = P̂ (P̂·K) + P̂×J with P̂·K = i(|k| ∂_r + γ)
            let j = angular_momentum(psi, p);
            std::array::from_fn(|a| {
                (0..psi.data.len())
                    .map(|i| {
                        let (ir, it, ip) = g.coords(i / d);
                        let e = g.e_k(it, ip);
                        let radial = i_times(p.dr[i] * g.r[ir] + psi.data[i] * gamma);
                        let mut cross = Complex::new(T::zero(), T::zero());
                        for b in 0..3 {
                            for c in 0..3 {
                                let l = levi(a, b, c);
                                if l != 0 {
                                    cross += j[c][i] * (cst::<T>(l as f64) * e[b]);
                                }
                            }
                        }
                        radial * e[a] + cross
                    })
                    .collect()
            })
        }
    }
}

/// `P̂_a Σ_b P̂_b V_b` and `V_a - P̂_a Σ_b P̂_b V_b`.
fn radial_split<T: Real>(psi: &Section<T>, v: &[Vec<Complex<T>>; 3]) -> ([Vec<Complex<T>>; 3], [Vec<Complex<T>>; 3]) {
    let g = &*psi.grid;
    let d = psi.dim();
    let n = psi.data.len();
    let along: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let (_, it, ip) = g.coords(i / d);
            let e = g.e_k(it, ip);
            v[0][i] * e[0] + v[1][i] * e[1] + v[2][i] * e[2]
        })
        .collect();
    let par: [Vec<Complex<T>>; 3] = std::array::from_fn(|a| {
        (0..n)
            .map(|i| {
                let (_, it, ip) = g.coords(i / d);
                along[i] * g.e_k(it, ip)[a]
            })
            .collect()
    });
    let perp = std::array::from_fn(|a| v[a].iter().zip(&par[a]).map(|(x, y)| *x - *y).collect());
    (par, perp)
}

/// All three components of a vector generator.
pub fn apply_vector<T: Real>(which: VecGen, psi: &Section<T>, scheme: &Scheme) -> Result<[Section<T>; 3], BundleError> {
    let g = &*psi.grid;
    let d = psi.dim();
    let comps: [Vec<Complex<T>>; 3] = match which {
        VecGen::P => std::array::from_fn(|a| {
            (0..psi.data.len()).map(|i| psi.data[i] * g.k_vec(i / d)[a]).collect()
        }),
        VecGen::J => angular_momentum(psi, &partials(psi)),
        VecGen::K => boosts(psi, &partials(psi), scheme),
        VecGen::JPar | VecGen::JPerp => {
            let chi = helicity(psi);
            let par: [Vec<Complex<T>>; 3] = std::array::from_fn(|a| {
                (0..psi.data.len())
                    .map(|i| {
                        let (_, it, ip) = g.coords(i / d);
                        chi[i] * g.e_k(it, ip)[a]
                    })
                    .collect()
            });
            if which == VecGen::JPar {
                par
            } else {
                let j = angular_momentum(psi, &partials(psi));
                std::array::from_fn(|a| j[a].iter().zip(&par[a]).map(|(x, y)| *x - *y).collect())
            }
        }
        VecGen::KPar | VecGen::KPerp => {
            let k = boosts(psi, &partials(psi), scheme);
            let (par, perp) = radial_split(psi, &k);
            if which == VecGen::KPar {
                par
            } else {
                perp
            }
        }
    };
    let out = comps.map(|c| psi.with_data(c));
    for s in &out {
        check_drift(&format!("{which:?}"), s, scheme)?;
    }
    Ok(out)
}

pub fn apply_generator<T: Real>(gen: Gen, psi: &Section<T>, scheme: &Scheme) -> Result<Section<T>, BundleError> {
    let g = &*psi.grid;
    let m = cst::<T>(psi.rep.mass);
    let pick = |v: VecGen, a: u8| -> Result<Section<T>, BundleError> {
        if a > 2 {
            return Err(BundleError::UnknownRelation(format!("axis {a}")));
        }
        let [x, y, z] = apply_vector(v, psi, scheme)?;
        Ok([x, y, z].into_iter().nth(a as usize).unwrap())
    };
    match gen {
        Gen::H => Ok(psi.mul_by(|node| {
            let r = g.r[g.coords(node).0];
            Complex::new((r * r + m * m).sqrt(), T::zero())
        })),
        Gen::Chi => Ok(psi.with_data(helicity(psi))),
        Gen::P(a) => pick(VecGen::P, a),
        Gen::J(a) => pick(VecGen::J, a),
        Gen::K(a) => pick(VecGen::K, a),
        Gen::JPar(a) => pick(VecGen::JPar, a),
        Gen::JPerp(a) => pick(VecGen::JPerp, a),
        Gen::KPar(a) => pick(VecGen::KPar, a),
        Gen::KPerp(a) => pick(VecGen::KPerp, a),
    }
}
