use std::sync::Arc;

use num_complex::Complex;
use serde::Serialize;

use super::{ConnError, Connection, ConnectionKind, FProfile, Perturbation, TangentField};
use crate::bundle::{apply_vector, cst, gradient, Grid, Real, RepSpec, Scheme, Section, VecGen};

type Triple<T> = [Section<T>; 3];

fn weight_field<T: Real>(conn: &Connection, rep: &RepSpec, g: &Grid<T>) -> Result<Vec<T>, ConnError> {
    let f: FProfile = match &conn.kind {
        ConnectionKind::FlatMassive if rep.mass <= 0.0 => {
            return Err(ConnError::SingularLimit(
                "the flat massive connection D+ does not exist at m = 0".into(),
            ))
        }
        k => k.weight().expect("every kind has a weight"),
    };
    f.validate()?;
    g.r.iter().map(|r| f.eval(r.to_f64().unwrap(), rep.mass).map(cst)).collect()
}

/// Cartesian components `D_a ψ`, `a = 1, 2, 3`.
pub fn components<T: Real>(conn: &Connection, psi: &Section<T>, scheme: &Scheme) -> Result<Triple<T>, ConnError> {
    let g = psi.grid.clone();
    let d = psi.dim();
    let m = cst::<T>(psi.rep.mass);
    let f = weight_field(conn, &psi.rep, &g)?;
    let uses_rotation = f.iter().any(|x| *x != T::one());
    let k = apply_vector(VecGen::K, psi, scheme)?;
    let j = if uses_rotation { Some(apply_vector(VecGen::J, psi, scheme)?) } else { None };
    let drop_cross = conn.perturbation == Perturbation::DropCross;
    let n = psi.data.len();
    let mut out: [Vec<Complex<T>>; 3] = Default::default();
    for (a, slot) in out.iter_mut().enumerate() {
        *slot = (0..n)
            .map(|i| {
                let node = i / d;
                let (ir, it, ip) = g.coords(node);
                let r = g.r[ir];
                let h = (r * r + m * m).sqrt();
                let e = g.e_k(it, ip);
                let radial = psi.data[i] * (-(e[a] * r) / (cst::<T>(2.0) * h * h));
                let minus_i = Complex::new(T::zero(), -T::one());
                let boost = k[a].data[i] * minus_i / h + radial;
                let fr = f[ir];
                if fr == T::one() {
                    return boost;
                }
                let jj = j.as_ref().expect("rotation part needs J");
                let mut cross = Complex::new(T::zero(), T::zero());
                if !drop_cross {
                    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                    cross = (jj[c].data[i] * e[b] - jj[b].data[i] * e[c]) / r;
                }
                let along = k[0].data[i] * e[0] + k[1].data[i] * e[1] + k[2].data[i] * e[2];
                let rot = (cross + along * (e[a] / h)) * minus_i + radial;
                boost * fr + rot * (T::one() - fr)
            })
            .collect();
    }
    if let Perturbation::Constant { c, u } = conn.perturbation {
        for (a, slot) in out.iter_mut().enumerate() {
            let z = Complex::new(T::zero(), cst::<T>(c * u[a]));
            for (o, p) in slot.iter_mut().zip(&psi.data) {
                *o += *p * z;
            }
        }
    }
    Ok(out.map(|v| psi.with_data(v)))
}

pub(crate) fn contract<T: Real>(x: &[[T; 3]], comps: &Triple<T>) -> Section<T> {
    let d = comps[0].dim();
    let data = (0..comps[0].data.len())
        .map(|i| {
            let xv = x[i / d];
            comps[0].data[i] * xv[0] + comps[1].data[i] * xv[1] + comps[2].data[i] * xv[2]
        })
        .collect();
    comps[0].with_data(data)
}

/// `D_X ψ = Σ_a X_a D_a ψ`.
pub fn apply_connection<T: Real>(
    conn: &Connection,
    x: &TangentField,
    psi: &Section<T>,
    scheme: &Scheme,
) -> Result<Section<T>, ConnError> {
    Ok(contract(&x.values(&psi.grid), &components(conn, psi, scheme)?))
}

/// `‖D_X(fψ) − f D_Xψ − df(X) ψ‖ / ‖ψ‖` with `df` from the same stencils.
pub fn leibniz_residual<T: Real>(
    conn: &Connection,
    x: &TangentField,
    f: &[Complex<T>],
    psi: &Section<T>,
    scheme: &Scheme,
) -> Result<f64, ConnError> {
    let g = &psi.grid;
    let xv = x.values(g);
    let scalar = Section::from_data(RepSpec::massive(0, 1.0).expect("valid"), g.clone(), f.to_vec())?;
    let df = gradient(&scalar);
    let dfx: Vec<Complex<T>> = (0..g.len()).map(|n| df[0][n] * xv[n][0] + df[1][n] * xv[n][1] + df[2][n] * xv[n][2]).collect();
    let lhs = apply_connection(conn, x, &psi.mul_field(f), scheme)?;
    let rhs = apply_connection(conn, x, psi, scheme)?.mul_field(f).add(&psi.mul_field(&dfx));
    Ok((lhs.sub(&rhs).norm() / psi.norm()).to_f64().unwrap())
}

/// `D1_X D2_Y ψ`, expanding the frame coefficients of `Y` by the Leibniz
/// rule so that only the smooth Cartesian components get differenced.
fn mixed_second<T: Real>(
    x: &[[T; 3]],
    y: &[[T; 3]],
    x_dy: &[[T; 3]],
    inner_first: &Triple<T>,
    outer_of_inner: &[Triple<T>; 3],
) -> Section<T> {
    let d = inner_first[0].dim();
    let data = (0..inner_first[0].data.len())
        .map(|i| {
            let n = i / d;
            let mut s = Complex::new(T::zero(), T::zero());
            for b in 0..3 {
                s += inner_first[b].data[i] * x_dy[n][b];
                for a in 0..3 {
                    s += outer_of_inner[b][a].data[i] * (x[n][a] * y[n][b]);
                }
            }
            s
        })
        .collect();
    inner_first[0].with_data(data)
}

struct Seconds<T> {
    first: Triple<T>,
    second: [Triple<T>; 3],
}

fn seconds<T: Real>(outer: &Connection, inner: &Connection, psi: &Section<T>, scheme: &Scheme) -> Result<Seconds<T>, ConnError> {
    let first = components(inner, psi, scheme)?;
    let [a, b, c] = &first;
    let second = [components(outer, a, scheme)?, components(outer, b, scheme)?, components(outer, c, scheme)?];
    Ok(Seconds { first, second })
}

/// `(D_X D_Y − D_Y D_X − D_[X,Y]) ψ`.
pub fn curvature_commutator<T: Real>(
    conn: &Connection,
    x: &TangentField,
    y: &TangentField,
    psi: &Section<T>,
    scheme: &Scheme,
) -> Result<Section<T>, ConnError> {
    let g = &psi.grid;
    let (xv, yv) = (x.values(g), y.values(g));
    let x_dy = y.derivative_along(&xv, g);
    let y_dx = x.derivative_along(&yv, g);
    let br = x.bracket(y, g);
    let s = seconds(conn, conn, psi, scheme)?;
    let xy = mixed_second(&xv, &yv, &x_dy, &s.first, &s.second);
    let yx = mixed_second(&yv, &xv, &y_dx, &s.first, &s.second);
    Ok(xy.sub(&yx).sub(&contract(&br, &s.first)))
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossReport {
    /// `[D^K_θ, D^R_φ] − iJ_k/|P|² − (i cotθ/(H|P|)) K_φ`, relative.
    pub boost_rotation: f64,
    /// `[D^R_θ, D^K_φ] − iJ_k/|P|² − (i cotθ/|P|²) J_θ`, relative.
    pub rotation_boost: f64,
}

/// Mixed commutators of the boost and rotation connections on the
/// spherical frame.
pub fn cross_commutator_check<T: Real>(psi: &Section<T>, scheme: &Scheme) -> Result<CrossReport, ConnError> {
    if psi.rep.is_massless() {
        return Err(ConnError::Unsupported("boost and rotation connections coincide at m = 0".into()));
    }
    let g: &Arc<Grid<T>> = &psi.grid;
    let d = psi.dim();
    let m = cst::<T>(psi.rep.mass);
    let (et, ep) = (TangentField::ETheta, TangentField::EPhi);
    let (tv, pv) = (et.values(g), ep.values(g));
    let t_dp = ep.derivative_along(&tv, g);
    let p_dt = et.derivative_along(&pv, g);
    let boost = Connection::new(ConnectionKind::Boost);
    let rot = Connection::new(ConnectionKind::Rotation);
    let kr = seconds(&boost, &rot, psi, scheme)?;
    let rk = seconds(&rot, &boost, psi, scheme)?;
    // [A_θ, B_φ] = A_θ B_φ − B_φ A_θ
    let k_then_r = |outer_inner: &Seconds<T>, inner_outer: &Seconds<T>| {
        mixed_second(&tv, &pv, &t_dp, &outer_inner.first, &outer_inner.second)
            .sub(&mixed_second(&pv, &tv, &p_dt, &inner_outer.first, &inner_outer.second))
    };
    let c_kr = k_then_r(&kr, &rk);
    let c_rk = k_then_r(&rk, &kr);
    let j = apply_vector(VecGen::J, psi, scheme)?;
    let k = apply_vector(VecGen::K, psi, scheme)?;
    let i = Complex::new(T::zero(), T::one());
    let (mut e1, mut e2) = (c_kr.data.clone(), c_rk.data.clone());
    for idx in 0..psi.data.len() {
        let (ir, it, ip) = g.coords(idx / d);
        let r = g.r[ir];
        let h = (r * r + m * m).sqrt();
        let ek = g.e_k(it, ip);
        let ephi = g.e_phi(ip);
        let etheta = g.e_theta(it, ip);
        let cot = g.cos_t[it] / g.sin_t[it];
        let jk = (0..3).fold(Complex::new(T::zero(), T::zero()), |s, a| s + j[a].data[idx] * ek[a]);
        let kphi = (0..3).fold(Complex::new(T::zero(), T::zero()), |s, a| s + k[a].data[idx] * ephi[a]);
        let jtheta = (0..3).fold(Complex::new(T::zero(), T::zero()), |s, a| s + j[a].data[idx] * etheta[a]);
        e1[idx] -= i * jk / (r * r) + i * kphi * (cot / (h * r));
        e2[idx] -= i * jk / (r * r) + i * jtheta * (cot / (r * r));
    }
    let norm = psi.norm();
    Ok(CrossReport {
        boost_rotation: (psi.with_data(e1).norm() / norm).to_f64().unwrap(),
        rotation_boost: (psi.with_data(e2).norm() / norm).to_f64().unwrap(),
    })
}
