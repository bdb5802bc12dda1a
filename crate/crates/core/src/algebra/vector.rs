//! Cartesian triples of operators. Products keep the left factor on the left.

use super::coeff::levi_civita;
use super::expr::{Algebra, OperatorExpr};
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Default)]
pub struct VectorExpr(pub [OperatorExpr; 3]);

impl VectorExpr {
    pub fn from_fn(mut f: impl FnMut(usize) -> OperatorExpr) -> Self {
        VectorExpr([f(0), f(1), f(2)])
    }

    pub fn component(&self, axis: usize) -> &OperatorExpr {
        &self.0[axis]
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(|a| self.0[a].add(&other.0[a]))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(|a| self.0[a].sub(&other.0[a]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(OperatorExpr::is_zero)
    }
}

impl Algebra {
    pub fn p_vec(&self) -> VectorExpr {
        VectorExpr::from_fn(|a| self.p(a))
    }

    pub fn phat_vec(&self) -> VectorExpr {
        VectorExpr::from_fn(|a| self.phat(a))
    }

    pub fn j_vec(&self) -> VectorExpr {
        VectorExpr::from_fn(|a| self.j(a))
    }

    pub fn k_vec(&self) -> VectorExpr {
        VectorExpr::from_fn(|a| self.k(a))
    }

    /// `sum_a a_a b_a`
    pub fn dot(&self, a: &VectorExpr, b: &VectorExpr) -> Result<OperatorExpr, AlgebraError> {
        let mut out = OperatorExpr::zero();
        for k in 0..3 {
            out = out.add(&self.mul(&a.0[k], &b.0[k])?);
        }
        Ok(out)
    }

    /// `(a x b)_i = eps_ijk a_j b_k`
    pub fn cross(&self, a: &VectorExpr, b: &VectorExpr) -> Result<VectorExpr, AlgebraError> {
        let mut out = VectorExpr::default();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let eps = levi_civita(i, j, k);
                    if eps == 0 {
                        continue;
                    }
                    let t = self.mul(&a.0[j], &b.0[k])?;
                    out.0[i] = if eps > 0 { out.0[i].add(&t) } else { out.0[i].sub(&t) };
                }
            }
        }
        Ok(out)
    }

    /// `s * v` componentwise.
    pub fn scalar_vec(&self, s: &OperatorExpr, v: &VectorExpr) -> Result<VectorExpr, AlgebraError> {
        Ok(VectorExpr([
            self.mul(s, &v.0[0])?,
            self.mul(s, &v.0[1])?,
            self.mul(s, &v.0[2])?,
        ]))
    }

    /// `v * s` componentwise.
    pub fn vec_scalar(&self, v: &VectorExpr, s: &OperatorExpr) -> Result<VectorExpr, AlgebraError> {
        Ok(VectorExpr([
            self.mul(&v.0[0], s)?,
            self.mul(&v.0[1], s)?,
            self.mul(&v.0[2], s)?,
        ]))
    }

    pub fn adjoint_vec(&self, v: &VectorExpr) -> Result<VectorExpr, AlgebraError> {
        Ok(VectorExpr([
            self.adjoint(&v.0[0])?,
            self.adjoint(&v.0[1])?,
            self.adjoint(&v.0[2])?,
        ]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::gq_int;
    use crate::algebra::Mode;

    #[test]
    fn cross_of_commuting_entries_vanishes() {
        let alg = Algebra::new(Mode::Massive);
        let p = alg.p_vec();
        assert!(alg.cross(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn momentum_dot_boost_ordering() {
        let alg = Algebra::new(Mode::Massive);
        let pk = alg.dot(&alg.p_vec(), &alg.k_vec()).unwrap();
        let kp = alg.dot(&alg.k_vec(), &alg.p_vec()).unwrap();
        let expect = alg.h().scale(&(crate::algebra::poly::gq_i() * gq_int(-3)));
        assert_eq!(pk.sub(&kp), expect);
    }
}
