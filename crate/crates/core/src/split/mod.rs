//! Angular-momentum splittings `J = L + S` induced by a connection, with
//! the diagnostics that decide whether `L` and `S` are angular momenta.

mod nw;

use num_complex::Complex;
use serde::Serialize;

use crate::bundle::{apply_vector, cst, gradient, Real, RepSpec, Scheme, Section, VecGen};
use crate::connection::{components, curvature_commutator, ConnError, Connection, ConnectionKind, TangentField};

pub use nw::{
    f_plus_scan, nw_closed_form, nw_coordinate_residual, nw_match_residual, parallel_frame, probe_loops, spin_in_frame,
    NwMode, NwOperator, ParallelFrame, ProbeReport, ScanRow, SpinFrameReport, FRAME_TREE,
};

type Triple<T> = [Section<T>; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Part {
    /// `L_a = −i D_{e_a×k}`.
    Orbital,
    /// `S_a = J_a − L_a`.
    Spin,
}

/// The splitting induced by one connection.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitOperators {
    pub conn: Connection,
    pub scheme: Scheme,
}

fn rotation_field(a: usize) -> TangentField {
    let mut e = [0.0; 3];
    e[a] = 1.0;
    TangentField::CrossK(e)
}

fn rel<T: Real>(x: &Section<T>, psi: &Section<T>) -> f64 {
    (x.norm() / psi.norm()).to_f64().unwrap()
}

fn eps(a: usize, b: usize) -> Option<(usize, f64)> {
    if a == b {
        return None;
    }
    let c = 3 - a - b;
    Some((c, if (b + 3 - a) % 3 == 1 { 1.0 } else { -1.0 }))
}

impl SplitOperators {
    pub fn new(conn: impl Into<Connection>, scheme: Scheme) -> Self {
        SplitOperators { conn: conn.into(), scheme }
    }

    pub fn orbital<T: Real>(&self, psi: &Section<T>) -> Result<Triple<T>, ConnError> {
        let comps = components(&self.conn, psi, &self.scheme)?;
        let minus_i = Complex::new(T::zero(), -T::one());
        Ok([0, 1, 2].map(|a| {
            let x = rotation_field(a).values(&psi.grid);
            crate::connection::contract(&x, &comps).scale(minus_i)
        }))
    }

    pub fn total<T: Real>(&self, psi: &Section<T>) -> Result<Triple<T>, ConnError> {
        Ok(apply_vector(VecGen::J, psi, &self.scheme)?)
    }

    pub fn spin<T: Real>(&self, psi: &Section<T>) -> Result<Triple<T>, ConnError> {
        let l = self.orbital(psi)?;
        let j = self.total(psi)?;
        Ok([0, 1, 2].map(|a| j[a].sub(&l[a])))
    }

    pub fn part<T: Real>(&self, part: Part, psi: &Section<T>) -> Result<Triple<T>, ConnError> {
        match part {
            Part::Orbital => self.orbital(psi),
            Part::Spin => self.spin(psi),
        }
    }

    /// `max_a ‖(L_a + S_a − J_a)ψ‖ / ‖ψ‖`.
    pub fn decomposition_residual<T: Real>(&self, psi: &Section<T>) -> Result<f64, ConnError> {
        let (l, s, j) = (self.orbital(psi)?, self.spin(psi)?, self.total(psi)?);
        Ok((0..3).map(|a| rel(&l[a].add(&s[a]).sub(&j[a]), psi)).fold(0.0, f64::max))
    }

    /// `max_{a,b} ‖([X_a, J_b] − iε_abc X_c)ψ‖ / ‖ψ‖` for `X = L` or `S`.
    pub fn vector_op_residual<T: Real>(&self, part: Part, psi: &Section<T>) -> Result<f64, ConnError> {
        let x = self.part(part, psi)?;
        let j = self.total(psi)?;
        let x_of_j = j.iter().map(|jb| self.part(part, jb)).collect::<Result<Vec<_>, _>>()?;
        let j_of_x = x.iter().map(|xa| self.total(xa)).collect::<Result<Vec<_>, _>>()?;
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let mut r = x_of_j[b][a].sub(&j_of_x[a][b]);
                if let Some((c, s)) = eps(a, b) {
                    r = r.sub(&x[c].scale(Complex::new(T::zero(), cst(s))));
                }
                worst = worst.max(rel(&r, psi));
            }
        }
        Ok(worst)
    }

    /// `max_a ‖X_a(fψ) − f X_a ψ‖ / ‖ψ‖`.
    pub fn internality_residual<T: Real>(&self, part: Part, f: &[Complex<T>], psi: &Section<T>) -> Result<f64, ConnError> {
        let lhs = self.part(part, &psi.mul_field(f))?;
        let rhs = self.part(part, psi)?;
        Ok((0..3).map(|a| rel(&lhs[a].sub(&rhs[a].mul_field(f)), psi)).fold(0.0, f64::max))
    }

    /// `max_{a,b} ‖([X_a, X_b] − iε_abc X_c)ψ‖ / ‖ψ‖`.
    pub fn so3_residual<T: Real>(&self, part: Part, psi: &Section<T>) -> Result<f64, ConnError> {
        let x = self.part(part, psi)?;
        let xx = x.iter().map(|xb| self.part(part, xb)).collect::<Result<Vec<_>, _>>()?;
        let mut worst: f64 = 0.0;
        for a in 0..3 {
            for b in (a + 1)..3 {
                let (c, s) = eps(a, b).expect("a != b");
                let r = xx[b][a].sub(&xx[a][b]).sub(&x[c].scale(Complex::new(T::zero(), cst(s))));
                worst = worst.max(rel(&r, psi));
            }
        }
        Ok(worst)
    }

    /// Ties the two sides of the flatness criterion together.
    pub fn defect_identity<T: Real>(&self, psi: &Section<T>) -> Result<DefectReport, ConnError> {
        let l = self.orbital(psi)?;
        let ll = l.iter().map(|lb| self.orbital(lb)).collect::<Result<Vec<_>, _>>()?;
        let mut rep = DefectReport::default();
        for a in 0..3 {
            for b in (a + 1)..3 {
                let (c, s) = eps(a, b).expect("a != b");
                let so3 = ll[b][a].sub(&ll[a][b]).sub(&l[c].scale(Complex::new(T::zero(), cst(s))));
                let f = curvature_commutator(&self.conn, &rotation_field(a), &rotation_field(b), psi, &self.scheme)?;
                rep.so3 = rep.so3.max(rel(&so3, psi));
                rep.curvature = rep.curvature.max(rel(&f, psi));
                rep.identity = rep.identity.max(rel(&so3.add(&f), psi));
            }
        }
        Ok(rep)
    }
}

/// Maxima over `a < b` of the three norms, each relative to `‖ψ‖`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DefectReport {
    /// `([L_a, L_b] − iε_abc L_c)ψ`.
    pub so3: f64,
    /// `F(e_a×k, e_b×k)ψ`.
    pub curvature: f64,
    /// Sum of the two.
    pub identity: f64,
}

/// `max_a ‖ψ df(e_a×k)‖ / ‖ψ‖`: the internality defect of `L`.
pub fn leibniz_term<T: Real>(f: &[Complex<T>], psi: &Section<T>) -> Result<f64, ConnError> {
    let g = psi.grid.clone();
    let scalar = Section::from_data(RepSpec::massive(0, 1.0).expect("valid"), g.clone(), f.to_vec())?;
    let df = gradient(&scalar);
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        let x = rotation_field(a).values(&g);
        let dfx: Vec<Complex<T>> = (0..g.len()).map(|n| df[0][n] * x[n][0] + df[1][n] * x[n][1] + df[2][n] * x[n][2]).collect();
        worst = worst.max(rel(&psi.mul_field(&dfx), psi));
    }
    Ok(worst)
}

/// `max_{a,b} ‖([J⊥_a, J⊥_b] − iε_abc(J⊥_c − J∥_c))ψ‖ / ‖ψ‖`, from the
/// generator actions alone.
pub fn j_perp_residual<T: Real>(psi: &Section<T>, scheme: &Scheme) -> Result<f64, ConnError> {
    if !psi.rep.is_massless() {
        return Err(ConnError::Unsupported("J∥ and J⊥ are defined for massless reps".into()));
    }
    let perp = apply_vector(VecGen::JPerp, psi, scheme)?;
    let par = apply_vector(VecGen::JPar, psi, scheme)?;
    let pp = perp.iter().map(|x| apply_vector(VecGen::JPerp, x, scheme)).collect::<Result<Vec<_>, _>>()?;
    let mut worst: f64 = 0.0;
    for a in 0..3 {
        for b in (a + 1)..3 {
            let (c, s) = eps(a, b).expect("a != b");
            let r = pp[b][a].sub(&pp[a][b]).sub(&perp[c].sub(&par[c]).scale(Complex::new(T::zero(), cst(s))));
            worst = worst.max(rel(&r, psi));
        }
    }
    Ok(worst)
}

/// `‖(D^f_X − D^K_X)ψ‖ / ‖ψ‖` maximized over the given fields and profiles.
pub fn degeneracy_residual<T: Real>(
    fields: &[TangentField],
    others: &[ConnectionKind],
    psi: &Section<T>,
    scheme: &Scheme,
) -> Result<f64, ConnError> {
    let boost = components(&Connection::new(ConnectionKind::Boost), psi, scheme)?;
    let mut worst: f64 = 0.0;
    for kind in others {
        let c = components(&Connection::new(kind.clone()), psi, scheme)?;
        for x in fields {
            let xv = x.values(&psi.grid);
            let diff = crate::connection::contract(&xv, &c).sub(&crate::connection::contract(&xv, &boost));
            worst = worst.max(rel(&diff, psi));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_civita_orientation() {
        assert_eq!(eps(0, 1), Some((2, 1.0)));
        assert_eq!(eps(1, 2), Some((0, 1.0)));
        assert_eq!(eps(2, 0), Some((1, 1.0)));
        assert_eq!(eps(1, 0), Some((2, -1.0)));
        assert_eq!(eps(1, 1), None);
    }
}
