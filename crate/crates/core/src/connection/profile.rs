use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::ConnError;
use crate::algebra::{Mode, ScalarCoeff};

/// Radial weight `f(|k|)` of an affine connection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FProfile {
    Constant(f64),
    /// `λ H / m`.
    EnergyRatio(f64),
    /// Samples `(r_i, f_i)` with strictly increasing `r_i`, interpolated by
    /// monotone cubic Hermite segments and held constant outside.
    Table { r: Vec<f64>, f: Vec<f64> },
}

impl FProfile {
    pub fn validate(&self) -> Result<(), ConnError> {
        if let FProfile::Table { r, f } = self {
            if r.len() < 2 || r.len() != f.len() {
                return Err(ConnError::Unsupported("profile table needs >= 2 matching samples".into()));
            }
            if r.windows(2).any(|w| !(w[1] > w[0])) || f.iter().any(|x| !x.is_finite()) {
                return Err(ConnError::Unsupported("profile table radii must increase".into()));
            }
        }
        Ok(())
    }

    pub fn eval(&self, r: f64, m: f64) -> Result<f64, ConnError> {
        match self {
            FProfile::Constant(c) => Ok(*c),
            FProfile::EnergyRatio(lambda) => {
                if m <= 0.0 {
                    return Err(ConnError::SingularLimit(
                        "the weight H/m has no massless limit".into(),
                    ));
                }
                Ok(lambda * (r * r + m * m).sqrt() / m)
            }
            FProfile::Table { r: xs, f: ys } => {
                self.validate()?;
                Ok(monotone_cubic(xs, ys, r))
            }
        }
    }

    /// Exact weight for the named profiles.
    pub fn symbolic(&self, mode: Mode) -> Option<ScalarCoeff> {
        let q = |x: f64| BigRational::from_float(x).map(ScalarCoeff::from_rational);
        match self {
            FProfile::Constant(c) => q(*c),
            FProfile::EnergyRatio(lambda) => {
                let m_inv = ScalarCoeff::mass(mode).inv().ok()?;
                Some(q(*lambda)?.mul(&ScalarCoeff::h(mode)).mul(&m_inv))
            }
            FProfile::Table { .. } => None,
        }
    }

    /// `f·1 + (1 − f)·1 − 1`, which must vanish identically.
    pub fn affine_defect(&self, mode: Mode) -> Option<ScalarCoeff> {
        let f = self.symbolic(mode)?;
        let one = ScalarCoeff::one();
        Some(f.add(&one.sub(&f)).sub(&one))
    }

    /// `f²/H² + (1 − f²)/|P|²`, the factor multiplying `J_k` in the
    /// sphere curvature of the affine connection.
    pub fn curvature_factor(&self, mode: Mode) -> Option<ScalarCoeff> {
        let f = self.symbolic(mode)?;
        let f2 = f.mul(&f);
        let h2 = ScalarCoeff::h(mode).pow(2).ok()?;
        let p2 = ScalarCoeff::abs_p().pow(2).ok()?;
        Some(f2.div(&h2).ok()?.add(&ScalarCoeff::one().sub(&f2).div(&p2).ok()?))
    }
}

/// Fritsch-Carlson monotone interpolation.
fn monotone_cubic(x: &[f64], y: &[f64], t: f64) -> f64 {
    let n = x.len();
    if t <= x[0] {
        return y[0];
    }
    if t >= x[n - 1] {
        return y[n - 1];
    }
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { 0.5 * (delta[i - 1] + delta[i]) };
    }
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
        } else {
            let (a, b) = (m[i] / delta[i], m[i + 1] / delta[i]);
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[i] = tau * a * delta[i];
                m[i + 1] = tau * b * delta[i];
            }
        }
    }
    let i = x.partition_point(|&xi| xi <= t) - 1;
    let h = x[i + 1] - x[i];
    let s = (t - x[i]) / h;
    let (h00, h10, h01, h11) = (
        (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
        s * (1.0 - s) * (1.0 - s),
        s * s * (3.0 - 2.0 * s),
        s * s * (s - 1.0),
    );
    h00 * y[i] + h10 * h * m[i] + h01 * y[i + 1] + h11 * h * m[i + 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_weight_kills_the_curvature_factor_exactly() {
        let plus = FProfile::EnergyRatio(1.0).curvature_factor(Mode::Massive).unwrap();
        assert!(plus.is_zero());
        let minus = FProfile::EnergyRatio(-1.0).curvature_factor(Mode::Massive).unwrap();
        assert!(minus.is_zero());
        let half = FProfile::EnergyRatio(0.5).curvature_factor(Mode::Massive).unwrap();
        assert!(!half.is_zero());
        assert!(FProfile::EnergyRatio(1.0).symbolic(Mode::Massless).is_none());
    }

    #[test]
    fn affine_weights_sum_to_one() {
        for f in [FProfile::Constant(0.3), FProfile::EnergyRatio(1.1)] {
            assert!(f.affine_defect(Mode::Massive).unwrap().is_zero());
        }
    }

    #[test]
    fn table_interpolation_is_monotone_and_exact_at_knots() {
        let f = FProfile::Table { r: vec![1.0, 1.5, 2.0, 3.0], f: vec![0.0, 0.1, 0.9, 1.0] };
        assert_eq!(f.eval(1.5, 1.0).unwrap(), 0.1);
        let mut last = -1.0;
        for k in 0..=200 {
            let v = f.eval(0.9 + 2.2 * k as f64 / 200.0, 1.0).unwrap();
            assert!(v >= last - 1e-15);
            last = v;
        }
        let bad = FProfile::Table { r: vec![1.0, 1.0], f: vec![0.0, 1.0] };
        assert!(bad.eval(1.0, 1.0).is_err());
    }

    #[test]
    fn energy_ratio_needs_mass() {
        assert!(matches!(FProfile::EnergyRatio(1.0).eval(1.0, 0.0), Err(ConnError::SingularLimit(_))));
        assert!((FProfile::EnergyRatio(2.0).eval(3.0, 4.0).unwrap() - 2.5).abs() < 1e-15);
    }
}
