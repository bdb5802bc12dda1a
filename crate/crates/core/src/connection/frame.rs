use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::bundle::{cst, gradient, Grid, Real, RepSpec, Section};

/// Vector field on momentum space, named or sampled per node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TangentField {
    Ek,
    ETheta,
    EPhi,
    Constant([f64; 3]),
    /// `u × k`, the rotation field about `u`.
    CrossK([f64; 3]),
    /// Cartesian components at every node in grid order.
    Sampled(Arc<Vec<[f64; 3]>>),
}

fn cross<T: Real>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl TangentField {
    pub fn values<T: Real>(&self, g: &Grid<T>) -> Vec<[T; 3]> {
        (0..g.len())
            .map(|n| {
                let (_, it, ip) = g.coords(n);
                match self {
                    TangentField::Ek => g.e_k(it, ip),
                    TangentField::ETheta => g.e_theta(it, ip),
                    TangentField::EPhi => g.e_phi(ip),
                    TangentField::Constant(u) => u.map(cst),
                    TangentField::CrossK(u) => cross(u.map(cst), g.k_vec(n)),
                    TangentField::Sampled(v) => v[n].map(cst),
                }
            })
            .collect()
    }

    /// `(X·∇) self` at every node; analytic except for sampled fields.
    pub fn derivative_along<T: Real>(&self, x: &[[T; 3]], g: &Arc<Grid<T>>) -> Vec<[T; 3]> {
        let zero = [T::zero(); 3];
        match self {
            TangentField::Constant(_) => vec![zero; g.len()],
            TangentField::CrossK(u) => x.iter().map(|xv| cross(u.map(cst), *xv)).collect(),
            TangentField::Sampled(v) => {
                let rep = RepSpec::massive(0, 1.0).expect("valid");
                let grads: Vec<[Vec<Complex<T>>; 3]> = (0..3)
                    .map(|c| {
                        let data = v.iter().map(|p| Complex::new(cst(p[c]), T::zero())).collect();
                        gradient(&Section::from_data(rep, g.clone(), data).expect("scalar layout"))
                    })
                    .collect();
                (0..g.len())
                    .map(|n| std::array::from_fn(|c| (0..3).fold(T::zero(), |s, a| s + x[n][a] * grads[c][a][n].re)))
                    .collect()
            }
            named => (0..g.len())
                .map(|n| {
                    let (ir, it, ip) = g.coords(n);
                    let r = g.r[ir];
                    let (ek, et, ep) = (g.e_k(it, ip), g.e_theta(it, ip), g.e_phi(ip));
                    let cot = g.cos_t[it] / g.sin_t[it];
                    let xv = x[n];
                    let comb = |a: T, u: [T; 3], b: T, v: [T; 3]| -> [T; 3] {
                        std::array::from_fn(|i| (a * u[i] + b * v[i]) / r)
                    };
                    match named {
                        // ∂_θ k̂ = e_θ, ∂_φ k̂ = sinθ e_φ
                        TangentField::Ek => comb(dot(xv, et), et, dot(xv, ep), ep),
                        // ∂_θ e_θ = −k̂, ∂_φ e_θ = cosθ e_φ
                        TangentField::ETheta => comb(-dot(xv, et), ek, dot(xv, ep) * cot, ep),
                        // ∂_φ e_φ = −(sinθ k̂ + cosθ e_θ)
                        TangentField::EPhi => comb(-dot(xv, ep), ek, -dot(xv, ep) * cot, et),
                        _ => unreachable!(),
                    }
                })
                .collect(),
        }
    }

    /// Jacobi-Lie bracket `[self, other] = (self·∇)other − (other·∇)self`.
    pub fn bracket<T: Real>(&self, other: &TangentField, g: &Arc<Grid<T>>) -> Vec<[T; 3]> {
        let x = self.values(g);
        let y = other.values(g);
        let a = other.derivative_along(&x, g);
        let b = self.derivative_along(&y, g);
        a.iter().zip(&b).map(|(p, q)| std::array::from_fn(|i| p[i] - q[i])).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::make_grid;

    #[test]
    fn theta_phi_bracket_matches_closed_form() {
        let g = Arc::new(make_grid::<f64>(5, 10, 20, 1.0, 2.0).unwrap());
        let br = TangentField::ETheta.bracket(&TangentField::EPhi, &g);
        for n in 0..g.len() {
            let (ir, it, ip) = g.coords(n);
            let cot = g.cos_t[it] / g.sin_t[it];
            let ep = g.e_phi(ip);
            for i in 0..3 {
                assert!((br[n][i] + cot / g.r[ir] * ep[i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn sampled_derivative_agrees_with_named() {
        let err = |nt: usize| {
            let g = Arc::new(make_grid::<f64>(10, nt, 2 * nt, 1.0, 2.0).unwrap());
            let sampled = TangentField::Sampled(Arc::new(TangentField::CrossK([0.3, -0.2, 0.9]).values(&g)));
            let x = TangentField::Constant([1.0, 2.0, -0.5]).values(&g);
            let a = sampled.derivative_along(&x, &g);
            let b = TangentField::CrossK([0.3, -0.2, 0.9]).derivative_along(&x, &g);
            a.iter().zip(&b).flat_map(|(p, q)| (0..3).map(move |i| (p[i] - q[i]).abs())).fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(24), err(48));
        // Fourth-order angular stencils.
        assert!(fine < 1e-5, "{fine}");
        assert!((coarse / fine).log2() > 3.5, "{coarse} -> {fine}");
    }
}
