//! Closed-form operators built from the generators: the boost, rotation and
//! affine connections and the Newton-Wigner position and spin operators.

use super::expr::{Algebra, OperatorExpr};
use super::poly::{gq_i, gq_rat};
use super::vector::VectorExpr;
use super::AlgebraError;

type R<T> = Result<T, AlgebraError>;

impl Algebra {
    pub fn h_pow(&self, n: i32) -> R<OperatorExpr> {
        self.pow(&self.h(), n)
    }

    /// `P . J`
    pub fn p_dot_j(&self) -> R<OperatorExpr> {
        self.dot(&self.p_vec(), &self.j_vec())
    }

    /// `Phat . K`
    pub fn phat_dot_k(&self) -> R<OperatorExpr> {
        self.dot(&self.phat_vec(), &self.k_vec())
    }

    /// `D^K = -i H^-1 (K - i P / (2H))`
    pub fn boost_connection(&self) -> R<VectorExpr> {
        let hinv = self.h_pow(-1)?;
        let h2 = self.h_pow(-2)?;
        let a = self.scalar_vec(&hinv, &self.k_vec())?;
        let b = self.scalar_vec(&h2, &self.p_vec())?;
        Ok(VectorExpr::from_fn(|i| {
            a.0[i].scale(&-gq_i()).sub(&b.0[i].scale(&gq_rat(1, 2)))
        }))
    }

    /// Rotation connection in the form
    /// `-i (Phat x J / |P| + H^-1 Phat (Phat . K) - i P / (2 H^2))`.
    pub fn rotation_connection(&self) -> R<VectorExpr> {
        let rinv = self.pow(&self.abs_p(), -1)?;
        let hinv = self.h_pow(-1)?;
        let h2 = self.h_pow(-2)?;
        let tangential = self.scalar_vec(&rinv, &self.cross(&self.phat_vec(), &self.j_vec())?)?;
        let radial = self.scalar_vec(
            &hinv,
            &self.vec_scalar(&self.phat_vec(), &self.phat_dot_k()?)?,
        )?;
        let point = self.scalar_vec(&h2, &self.p_vec())?;
        Ok(VectorExpr::from_fn(|i| {
            tangential.0[i]
                .add(&radial.0[i])
                .sub(&point.0[i].scale(&(gq_i() * gq_rat(1, 2))))
                .scale(&-gq_i())
        }))
    }

    /// Rotation connection in the manifestly anti-Hermitian form
    /// `-i (Phat x J / |P| - i Phat / |P|) - (i/2) (H^-1 Phat (Phat.K) + (K.Phat) Phat H^-1)`.
    pub fn rotation_connection_symmetric(&self) -> R<VectorExpr> {
        let rinv = self.pow(&self.abs_p(), -1)?;
        let hinv = self.h_pow(-1)?;
        let tangential = self.scalar_vec(&rinv, &self.cross(&self.phat_vec(), &self.j_vec())?)?;
        let hat = self.scalar_vec(&rinv, &self.phat_vec())?;
        let left = self.scalar_vec(
            &hinv,
            &self.vec_scalar(&self.phat_vec(), &self.phat_dot_k()?)?,
        )?;
        let k_dot_phat = self.dot(&self.k_vec(), &self.phat_vec())?;
        let right = self.vec_scalar(&self.scalar_vec(&k_dot_phat, &self.phat_vec())?, &hinv)?;
        Ok(VectorExpr::from_fn(|i| {
            let first = tangential.0[i].sub(&hat.0[i].scale(&gq_i())).scale(&-gq_i());
            let second = left.0[i].add(&right.0[i]).scale(&(gq_i() * gq_rat(-1, 2)));
            first.add(&second)
        }))
    }

    /// `f D^K + (1 - f) D^R` for a scalar `f`.
    pub fn affine_connection(&self, f: &OperatorExpr) -> R<VectorExpr> {
        let dk = self.boost_connection()?;
        let dr = self.rotation_connection()?;
        let g = self.int(1).sub(f);
        let a = self.scalar_vec(f, &dk)?;
        let b = self.scalar_vec(&g, &dr)?;
        Ok(a.add(&b))
    }

    /// The flat member `f = H/m` of the affine family.
    pub fn flat_connection(&self) -> R<VectorExpr> {
        let minv = self.pow(&self.m(), -1)?;
        let f = self.mul(&self.h(), &minv)?;
        self.affine_connection(&f)
    }

    /// `H J + P x K`
    fn hj_plus_p_cross_k(&self) -> R<VectorExpr> {
        let hj = self.scalar_vec(&self.h(), &self.j_vec())?;
        Ok(hj.add(&self.cross(&self.p_vec(), &self.k_vec())?))
    }

    /// Newton-Wigner position,
    /// `H^-1 (K - i P/(2H)) - P x (H J + P x K) / (m H (H+m))`.
    pub fn newton_wigner(&self) -> R<VectorExpr> {
        let hinv = self.h_pow(-1)?;
        let h2 = self.h_pow(-2)?;
        let lead = self.scalar_vec(&hinv, &self.k_vec())?;
        let point = self.scalar_vec(&h2, &self.p_vec())?;
        let denom = self.mul_all(&[&self.m(), &self.h(), &self.h().add(&self.m())])?;
        let c = self.pow(&denom, -1)?;
        let tail = self.scalar_vec(&c, &self.cross(&self.p_vec(), &self.hj_plus_p_cross_k()?)?)?;
        Ok(VectorExpr::from_fn(|i| {
            lead.0[i]
                .sub(&point.0[i].scale(&(gq_i() * gq_rat(1, 2))))
                .sub(&tail.0[i])
        }))
    }

    /// Jordan's spin, `(H J + P x K)/m - (P . J) P / (m (H+m))`.
    pub fn jordan_spin(&self) -> R<VectorExpr> {
        let minv = self.pow(&self.m(), -1)?;
        let c = self.pow(&self.mul(&self.m(), &self.h().add(&self.m()))?, -1)?;
        let a = self.scalar_vec(&minv, &self.hj_plus_p_cross_k()?)?;
        let pj = self.p_dot_j()?;
        let b = self.scalar_vec(&c, &self.scalar_vec(&pj, &self.p_vec())?)?;
        Ok(a.sub(&b))
    }
}
