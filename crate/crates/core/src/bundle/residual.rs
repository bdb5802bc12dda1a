use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{apply_generator, apply_vector, cst, levi, BundleError, Gen, Real, Scheme, Section, VecGen};

/// The ten commutation-relation families of the Poincaré algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    JJ,
    JK,
    KK,
    JP,
    KP,
    KH,
    JH,
    PH,
    PP,
    HH,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::JJ,
        Family::JK,
        Family::KK,
        Family::JP,
        Family::KP,
        Family::KH,
        Family::JH,
        Family::PH,
        Family::PP,
        Family::HH,
    ];

    fn ops(self) -> (Op, Op) {
        use Op::*;
        match self {
            Family::JJ => (V(VecGen::J), V(VecGen::J)),
            Family::JK => (V(VecGen::J), V(VecGen::K)),
            Family::KK => (V(VecGen::K), V(VecGen::K)),
            Family::JP => (V(VecGen::J), V(VecGen::P)),
            Family::KP => (V(VecGen::K), V(VecGen::P)),
            Family::KH => (V(VecGen::K), Energy),
            Family::JH => (V(VecGen::J), Energy),
            Family::PH => (V(VecGen::P), Energy),
            Family::PP => (V(VecGen::P), V(VecGen::P)),
            Family::HH => (Energy, Energy),
        }
    }

    /// Families whose operators are all pointwise multiplications.
    pub fn is_exact(self) -> bool {
        matches!(self, Family::PH | Family::PP | Family::HH)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One relation `[X_a, Y_b] = RHS`; axes are zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub family: Family,
    pub a: u8,
    pub b: u8,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{},{}", self.family, self.a + 1, self.b + 1)
    }
}

impl FromStr for Relation {
    type Err = BundleError;

    /// Accepts `"KK:1,2"`, or a bare family for scalar pairs such as `"HH"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BundleError::UnknownRelation(s.to_string());
        let (fam, idx) = s.split_once(':').unwrap_or((s, "1,1"));
        let family = Family::ALL.into_iter().find(|f| f.to_string() == fam.trim()).ok_or_else(bad)?;
        let (a, b) = idx.split_once(',').ok_or_else(bad)?;
        let parse = |t: &str| match t.trim().parse::<u8>() {
            Ok(k @ 1..=3) => Ok(k - 1),
            _ => Err(bad()),
        };
        Ok(Relation { family, a: parse(a)?, b: parse(b)? })
    }
}

#[derive(Clone, Copy)]
enum Op {
    V(VecGen),
    Energy,
}

fn act<T: Real>(op: Op, psi: &Section<T>, scheme: &Scheme) -> Result<Vec<Section<T>>, BundleError> {
    match op {
        Op::V(v) => Ok(apply_vector(v, psi, scheme)?.into()),
        Op::Energy => Ok(vec![apply_generator(Gen::H, psi, scheme)?]),
    }
}

/// `(LHS − RHS)ψ` for every index pair of a family, as `(a, b, section)`.
fn defects<T: Real>(family: Family, psi: &Section<T>, scheme: &Scheme) -> Result<Vec<(u8, u8, Section<T>)>, BundleError> {
    let (x, y) = family.ops();
    let xs = act(x, psi, scheme)?;
    let ys = act(y, psi, scheme)?;
    let x_of_y: Vec<Vec<Section<T>>> = ys.iter().map(|s| act(x, s, scheme)).collect::<Result<_, _>>()?;
    let y_of_x: Vec<Vec<Section<T>>> = xs.iter().map(|s| act(y, s, scheme)).collect::<Result<_, _>>()?;
    // Vectors of the right-hand sides, indexed by c.
    let rhs_vec: Option<Vec<Section<T>>> = match family {
        Family::JJ | Family::KK => Some(act(Op::V(VecGen::J), psi, scheme)?),
        Family::JK => Some(act(Op::V(VecGen::K), psi, scheme)?),
        Family::JP | Family::KH => Some(act(Op::V(VecGen::P), psi, scheme)?),
        _ => None,
    };
    let h_psi = apply_generator(Gen::H, psi, scheme)?;
    let i = Complex::new(T::zero(), T::one());
    let mut out = Vec::new();
    for a in 0..xs.len() {
        for b in 0..ys.len() {
            let mut d = x_of_y[b][a].sub(&y_of_x[a][b]);
            match family {
                Family::JJ | Family::JK | Family::JP | Family::KK => {
                    let sign = if family == Family::KK { -1.0 } else { 1.0 };
                    for c in 0..3 {
                        let e = levi(a, b, c);
                        if e != 0 {
                            let coef = i * cst::<T>(sign * e as f64);
                            d = d.sub(&rhs_vec.as_ref().unwrap()[c].scale(coef));
                        }
                    }
                }
                Family::KP if a == b => d = d.sub(&h_psi.scale(i)),
                Family::KH => d = d.sub(&rhs_vec.as_ref().unwrap()[a].scale(i)),
                _ => {}
            }
            out.push((a as u8, b as u8, d));
        }
    }
    Ok(out)
}

/// `‖(LHS − RHS)ψ‖ / ‖ψ‖` for one relation.
pub fn algebra_residual<T: Real>(rel: Relation, psi: &Section<T>, scheme: &Scheme) -> Result<f64, BundleError> {
    let norm = psi.norm();
    let all = defects(rel.family, psi, scheme)?;
    let (x, y) = rel.family.ops();
    let a = if matches!(x, Op::Energy) { 0 } else { rel.a };
    let b = if matches!(y, Op::Energy) { 0 } else { rel.b };
    let (_, _, d) = all.into_iter().find(|(p, q, _)| *p == a && *q == b).expect("index pair present");
    Ok((d.norm() / norm).to_f64().unwrap())
}

/// Largest relative residual over the index pairs of a family.
pub fn family_residual<T: Real>(family: Family, psi: &Section<T>, scheme: &Scheme) -> Result<f64, BundleError> {
    let norm = psi.norm();
    Ok(defects(family, psi, scheme)?
        .iter()
        .map(|(_, _, d)| (d.norm() / norm).to_f64().unwrap())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_ids_round_trip() {
        let r: Relation = "KK:1,2".parse().unwrap();
        assert_eq!(r, Relation { family: Family::KK, a: 0, b: 1 });
        assert_eq!(r.to_string(), "KK:1,2");
        assert!("HH".parse::<Relation>().is_ok());
        assert!("QQ:1,2".parse::<Relation>().is_err());
        assert!("KK:0,2".parse::<Relation>().is_err());
    }
}
