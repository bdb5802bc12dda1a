use std::f64::consts::PI;

use super::{BundleError, Real};

/// Tensor grid on a spherical shell `r_min <= |k| <= r_max`.
///
/// Radial nodes are Chebyshev-Gauss-Lobatto points (ascending), polar nodes
/// are staggered `θ_j = (j + 1/2)π/Nθ`, azimuthal nodes are `φ_l = 2πl/Nφ`.
/// Node index is `(ir * Nθ + it) * Nφ + ip`; fiber components are innermost
/// in section storage.
#[derive(Clone, Debug)]
pub struct Grid<T> {
    pub nr: usize,
    pub nt: usize,
    pub np: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub r: Vec<T>,
    pub theta: Vec<T>,
    pub phi: Vec<T>,
    pub sin_t: Vec<T>,
    pub cos_t: Vec<T>,
    pub sin_p: Vec<T>,
    pub cos_p: Vec<T>,
    /// Row-major `nr x nr` radial differentiation matrix.
    pub d_r: Vec<T>,
    /// Clenshaw-Curtis weights for `∫ dr`.
    pub w_r: Vec<T>,
    /// Fejér weights for `∫ sinθ dθ`.
    pub w_t: Vec<T>,
}

pub fn make_grid<T: Real>(
    nr: usize,
    nt: usize,
    np: usize,
    r_min: f64,
    r_max: f64,
) -> Result<Grid<T>, BundleError> {
    if nr < 4 || nt < 4 || np < 4 {
        return Err(BundleError::InvalidGrid(format!(
            "every resolution must be at least 4, got ({nr}, {nt}, {np})"
        )));
    }
    if np % 2 != 0 {
        return Err(BundleError::InvalidGrid(format!(
            "N_phi must be even for pole reflection, got {np}"
        )));
    }
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(BundleError::InvalidGrid(format!(
            "need 0 < r_min < r_max, got [{r_min}, {r_max}]"
        )));
    }
    let t = |x: f64| T::from_f64(x).expect("f64 fits the scalar type");
    let n = nr - 1;
    let half = 0.5 * (r_max - r_min);
    let r64: Vec<f64> = (0..nr)
        .map(|j| r_min + half * (1.0 - (PI * j as f64 / n as f64).cos()))
        .collect();
    let theta64: Vec<f64> = (0..nt).map(|j| (j as f64 + 0.5) * PI / nt as f64).collect();
    let phi64: Vec<f64> = (0..np).map(|l| 2.0 * PI * l as f64 / np as f64).collect();

    let d = cheb_diff(&r64);
    let w_r = clenshaw_curtis(n).into_iter().map(|w| w * half);
    Ok(Grid {
        nr,
        nt,
        np,
        r_min,
        r_max,
        r: r64.iter().map(|&x| t(x)).collect(),
        sin_t: theta64.iter().map(|x| t(x.sin())).collect(),
        cos_t: theta64.iter().map(|x| t(x.cos())).collect(),
        sin_p: phi64.iter().map(|x| t(x.sin())).collect(),
        cos_p: phi64.iter().map(|x| t(x.cos())).collect(),
        theta: theta64.iter().map(|&x| t(x)).collect(),
        phi: phi64.iter().map(|&x| t(x)).collect(),
        d_r: d.into_iter().map(t).collect(),
        w_r: w_r.map(t).collect(),
        w_t: fejer(nt).into_iter().map(t).collect(),
    })
}

impl<T: Real> Grid<T> {
    pub fn len(&self) -> usize {
        self.nr * self.nt * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ir: usize, it: usize, ip: usize) -> usize {
        (ir * self.nt + it) * self.np + ip
    }

    #[inline]
    pub fn coords(&self, node: usize) -> (usize, usize, usize) {
        let ip = node % self.np;
        let rest = node / self.np;
        (rest / self.nt, rest % self.nt, ip)
    }

    pub fn h_theta(&self) -> T {
        T::PI() / T::from_usize(self.nt).unwrap()
    }

    pub fn h_phi(&self) -> T {
        T::PI() * T::from_f64(2.0).unwrap() / T::from_usize(self.np).unwrap()
    }

    /// Unit radial direction at angular node `(it, ip)`.
    #[inline]
    pub fn e_k(&self, it: usize, ip: usize) -> [T; 3] {
        let s = self.sin_t[it];
        [s * self.cos_p[ip], s * self.sin_p[ip], self.cos_t[it]]
    }

    #[inline]
    pub fn e_theta(&self, it: usize, ip: usize) -> [T; 3] {
        let c = self.cos_t[it];
        [c * self.cos_p[ip], c * self.sin_p[ip], -self.sin_t[it]]
    }

    #[inline]
    pub fn e_phi(&self, ip: usize) -> [T; 3] {
        [-self.sin_p[ip], self.cos_p[ip], T::zero()]
    }

    /// Momentum vector at a node.
    pub fn k_vec(&self, node: usize) -> [T; 3] {
        let (ir, it, ip) = self.coords(node);
        self.e_k(it, ip).map(|x| x * self.r[ir])
    }

    /// Neighbour `off` steps away in θ, continued across a pole by
    /// `f(-θ, φ) = f(θ, φ + π)`.
    #[inline]
    pub fn theta_neighbour(&self, it: usize, ip: usize, off: isize) -> (usize, usize) {
        let j = it as isize + off;
        let nt = self.nt as isize;
        let flip = (ip + self.np / 2) % self.np;
        if j < 0 {
            ((-1 - j) as usize, flip)
        } else if j >= nt {
            ((2 * nt - 1 - j) as usize, flip)
        } else {
            (j as usize, ip)
        }
    }

    /// Quadrature weight of `d³k / ω` at a node.
    pub fn measure_weight(&self, node: usize, mass: T) -> T {
        let (ir, it, _) = self.coords(node);
        let r = self.r[ir];
        let omega = (r * r + mass * mass).sqrt();
        self.w_r[ir] * r * r * self.w_t[it] * self.h_phi() / omega
    }

    pub fn same_shape(&self, other: &Grid<T>) -> bool {
        (self.nr, self.nt, self.np) == (other.nr, other.nt, other.np)
            && self.r_min == other.r_min
            && self.r_max == other.r_max
    }
}

/// Barycentric differentiation matrix on the given Chebyshev-Lobatto nodes.
fn cheb_diff(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let w: Vec<f64> = (0..n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * s
            } else {
                s
            }
        })
        .collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (x[i] - x[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

/// Clenshaw-Curtis weights on `[-1, 1]` for `n + 1` Lobatto points.
fn clenshaw_curtis(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    let nf = n as f64;
    let mut v = vec![1.0; n.saturating_sub(1)];
    if n % 2 == 0 {
        w[0] = 1.0 / (nf * nf - 1.0);
        for k in 1..n / 2 {
            let kf = k as f64;
            for (j, vj) in v.iter_mut().enumerate() {
                let th = PI * (j + 1) as f64 / nf;
                *vj -= 2.0 * (2.0 * kf * th).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (j, vj) in v.iter_mut().enumerate() {
            let th = PI * (j + 1) as f64 / nf;
            *vj -= (nf * th).cos() / (nf * nf - 1.0);
        }
    } else {
        w[0] = 1.0 / (nf * nf);
        for k in 1..=(n - 1) / 2 {
            let kf = k as f64;
            for (j, vj) in v.iter_mut().enumerate() {
                let th = PI * (j + 1) as f64 / nf;
                *vj -= 2.0 * (2.0 * kf * th).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    w[n] = w[0];
    for (j, vj) in v.iter().enumerate() {
        w[j + 1] = 2.0 * vj / nf;
    }
    w
}

/// Fejér first-rule weights for staggered polar nodes; they absorb `sinθ`.
fn fejer(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let th = (j as f64 + 0.5) * PI / n as f64;
            let mut s = 1.0;
            for k in 1..=n / 2 {
                let kf = k as f64;
                s -= 2.0 * (2.0 * kf * th).cos() / (4.0 * kf * kf - 1.0);
            }
            2.0 * s / n as f64
        })
        .collect()
}
