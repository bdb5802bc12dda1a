use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{BundleError, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Massive { spin: u8 },
    Massless { helicity: i8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepSpec {
    pub kind: RepKind,
    pub mass: f64,
}

impl RepSpec {
    pub fn massive(spin: u8, mass: f64) -> Result<Self, BundleError> {
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(BundleError::InvalidRep(format!("massive rep needs m > 0, got {mass}")));
        }
        if spin > 4 {
            return Err(BundleError::InvalidRep(format!("spin {spin} is not supported")));
        }
        Ok(RepSpec { kind: RepKind::Massive { spin }, mass })
    }

    pub fn massless(helicity: i8) -> Result<Self, BundleError> {
        if helicity.abs() > 1 {
            return Err(BundleError::InvalidRep(format!(
                "helicity {helicity} needs a tensor-power fiber, only |h| <= 1 is built"
            )));
        }
        Ok(RepSpec { kind: RepKind::Massless { helicity }, mass: 0.0 })
    }

    pub fn validate(&self) -> Result<(), BundleError> {
        match self.kind {
            RepKind::Massive { spin } => Self::massive(spin, self.mass).map(|_| ()),
            RepKind::Massless { helicity } => {
                if self.mass != 0.0 {
                    return Err(BundleError::InvalidRep("massless rep needs m = 0".into()));
                }
                Self::massless(helicity).map(|_| ())
            }
        }
    }

    pub fn is_massless(&self) -> bool {
        matches!(self.kind, RepKind::Massless { .. })
    }

    /// Helicity of a massless rep whose fiber is the transverse part of ℂ³.
    pub fn transverse_helicity(&self) -> Option<i8> {
        match self.kind {
            RepKind::Massless { helicity } if helicity != 0 => Some(helicity),
            _ => None,
        }
    }

    /// Storage components per node.
    pub fn fiber_dim(&self) -> usize {
        match self.kind {
            RepKind::Massive { spin } => 2 * spin as usize + 1,
            RepKind::Massless { helicity: 0 } => 1,
            RepKind::Massless { .. } => 3,
        }
    }

    /// Effective fiber rank (1 for every massless rep).
    pub fn rank(&self) -> usize {
        match self.kind {
            RepKind::Massive { spin } => 2 * spin as usize + 1,
            RepKind::Massless { .. } => 1,
        }
    }

    /// Spin matrices `S_a`, row-major `d x d`. Massive reps use the `S_3`
    /// eigenbasis ordered `m_s = s, ..., -s`; the transverse massless fiber
    /// uses Cartesian components with `(S_a)_bc = -i ε_abc`.
    pub fn spin_matrices<T: Real>(&self) -> [Vec<Complex<T>>; 3] {
        let d = self.fiber_dim();
        let z = Complex::new(T::zero(), T::zero());
        let mut s = [vec![z; d * d], vec![z; d * d], vec![z; d * d]];
        match self.kind {
            RepKind::Massive { spin } => {
                let sf = spin as f64;
                for row in 0..d {
                    let mr = sf - row as f64;
                    s[2][row * d + row] = Complex::new(T::from_f64(mr).unwrap(), T::zero());
                    if row + 1 < d {
                        // <m+1| S+ |m> with m = mr - 1
                        let m = mr - 1.0;
                        let c = (sf * (sf + 1.0) - m * (m + 1.0)).sqrt();
                        let half = T::from_f64(0.5 * c).unwrap();
                        // S1 = (S+ + S-)/2, S2 = (S+ - S-)/(2i)
                        s[0][row * d + row + 1] = Complex::new(half, T::zero());
                        s[0][(row + 1) * d + row] = Complex::new(half, T::zero());
                        s[1][row * d + row + 1] = Complex::new(T::zero(), -half);
                        s[1][(row + 1) * d + row] = Complex::new(T::zero(), half);
                    }
                }
            }
            RepKind::Massless { helicity } if helicity != 0 => {
                for (a, sa) in s.iter_mut().enumerate() {
                    for b in 0..3 {
                        for c in 0..3 {
                            let e = crate::bundle::levi(a, b, c);
                            if e != 0 {
                                sa[b * 3 + c] = Complex::new(T::zero(), T::from_i32(-e).unwrap());
                            }
                        }
                    }
                }
            }
            RepKind::Massless { .. } => {}
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    type C = Complex<f64>;

    fn mul(a: &[C], b: &[C], d: usize) -> Vec<C> {
        let mut out = vec![C::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    out[i * d + j] += a[i * d + k] * b[k * d + j];
                }
            }
        }
        out
    }

    fn check_su2(rep: RepSpec) {
        let d = rep.fiber_dim();
        let s = rep.spin_matrices::<f64>();
        for a in 0..3 {
            let (b, c) = ((a + 1) % 3, (a + 2) % 3);
            let lhs: Vec<C> = mul(&s[a], &s[b], d)
                .iter()
                .zip(mul(&s[b], &s[a], d))
                .map(|(x, y)| x - y)
                .collect();
            for (l, r) in lhs.iter().zip(&s[c]) {
                assert!((l - C::i() * r).norm() < 1e-14, "{rep:?}");
            }
        }
    }

    #[test]
    fn spin_matrices_close_su2() {
        for spin in 0..=3 {
            check_su2(RepSpec::massive(spin, 1.0).unwrap());
        }
        check_su2(RepSpec::massless(1).unwrap());
    }

    #[test]
    fn invalid_reps() {
        assert!(RepSpec::massive(1, 0.0).is_err());
        assert!(RepSpec::massless(2).is_err());
        let bad = RepSpec { kind: RepKind::Massless { helicity: 1 }, mass: 1.0 };
        assert!(bad.validate().is_err());
    }
}
