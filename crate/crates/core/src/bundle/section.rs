use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::{Deserialize, Serialize};

use super::{cst, BundleError, Grid, Real, RepSpec};

/// Fiber values at every node, `d` components per node.
#[derive(Clone, Debug)]
pub struct Section<T> {
    pub rep: RepSpec,
    pub grid: Arc<Grid<T>>,
    pub data: Vec<Complex<T>>,
}

impl<T: Real> Section<T> {
    pub fn zeros(rep: RepSpec, grid: Arc<Grid<T>>) -> Self {
        let n = grid.len() * rep.fiber_dim();
        Section { rep, grid, data: vec![Complex::new(T::zero(), T::zero()); n] }
    }

    pub fn from_data(rep: RepSpec, grid: Arc<Grid<T>>, data: Vec<Complex<T>>) -> Result<Self, BundleError> {
        if data.len() != grid.len() * rep.fiber_dim() {
            return Err(BundleError::Mismatch);
        }
        Ok(Section { rep, grid, data })
    }

    pub fn dim(&self) -> usize {
        self.rep.fiber_dim()
    }

    pub fn fiber(&self, node: usize) -> &[Complex<T>] {
        let d = self.dim();
        &self.data[node * d..(node + 1) * d]
    }

    pub fn with_data(&self, data: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(data.len(), self.data.len());
        Section { rep: self.rep, grid: self.grid.clone(), data }
    }

    pub fn compatible(&self, other: &Section<T>) -> Result<(), BundleError> {
        if self.rep == other.rep && (Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_shape(&other.grid)) {
            Ok(())
        } else {
            Err(BundleError::Mismatch)
        }
    }

    pub fn add(&self, other: &Section<T>) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Section<T>) -> Self {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Section<T>, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert!(self.compatible(other).is_ok(), "section mismatch");
        self.with_data(self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect())
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.with_data(self.data.iter().map(|a| *a * c).collect())
    }

    /// Pointwise product with a complex scalar field given per node.
    pub fn mul_field(&self, f: &[Complex<T>]) -> Self {
        let d = self.dim();
        self.with_data(self.data.iter().enumerate().map(|(i, a)| *a * f[i / d]).collect())
    }

    /// Pointwise product with a function of the node index.
    pub fn mul_by(&self, f: impl Fn(usize) -> Complex<T>) -> Self {
        let d = self.dim();
        let vals: Vec<Complex<T>> = (0..self.grid.len()).map(f).collect();
        self.with_data(self.data.iter().enumerate().map(|(i, a)| *a * vals[i / d]).collect())
    }

    /// `⟨self, other⟩` with weight `d³k/ω`, antilinear in `self`.
    pub fn inner(&self, other: &Section<T>) -> Result<Complex<T>, BundleError> {
        self.compatible(other)?;
        let d = self.dim();
        let m = cst::<T>(self.rep.mass);
        let mut acc = Complex::new(T::zero(), T::zero());
        for node in 0..self.grid.len() {
            let w = self.grid.measure_weight(node, m);
            let mut s = Complex::new(T::zero(), T::zero());
            for c in 0..d {
                s += self.data[node * d + c].conj() * other.data[node * d + c];
            }
            acc += s * w;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> T {
        self.inner(self).expect("self-compatible").re.max(T::zero()).sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }

    /// Largest `|k̂·ψ|` over nodes; zero unless the fiber is Cartesian ℂ³.
    pub fn transverse_violation(&self) -> T {
        if self.rep.transverse_helicity().is_none() {
            return T::zero();
        }
        let g = &self.grid;
        (0..g.len())
            .map(|node| {
                let (_, it, ip) = g.coords(node);
                let e = g.e_k(it, ip);
                let v = self.fiber(node);
                (v[0] * e[0] + v[1] * e[1] + v[2] * e[2]).norm()
            })
            .fold(T::zero(), T::max)
    }

    /// Pointwise projection onto `k̂·ψ = 0` and then onto helicity `h`.
    pub fn project_massless(&self) -> Self {
        let Some(h) = self.rep.transverse_helicity() else {
            return self.clone();
        };
        let g = &self.grid;
        let hf = cst::<T>(h as f64);
        let half = cst::<T>(0.5);
        let mut out = self.data.clone();
        for node in 0..g.len() {
            let (_, it, ip) = g.coords(node);
            let e = g.e_k(it, ip);
            let v = &mut out[node * 3..node * 3 + 3];
            let dot = v[0] * e[0] + v[1] * e[1] + v[2] * e[2];
            for a in 0..3 {
                v[a] -= dot * e[a];
            }
            // χv = i k̂×v
            let cr = [
                v[2] * e[1] - v[1] * e[2],
                v[0] * e[2] - v[2] * e[0],
                v[1] * e[0] - v[0] * e[1],
            ];
            for a in 0..3 {
                v[a] = (v[a] + cr[a] * Complex::new(T::zero(), hf)) * half;
            }
        }
        self.with_data(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    GaussianBump,
    MultiBump,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialExtent {
    /// Width comparable to the shell; nonzero at the radial boundaries.
    Broad,
    /// Boundary values below `1e-12` of the peak.
    Compact,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub kind: ProfileKind,
    pub radial: RadialExtent,
    /// Angular concentration of each bump, `exp(κ(n·c − 1))`.
    pub kappa: f64,
}

impl Profile {
    pub fn broad(kind: ProfileKind) -> Self {
        Profile { kind, radial: RadialExtent::Broad, kappa: 2.5 }
    }

    pub fn compact(kind: ProfileKind) -> Self {
        Profile { kind, radial: RadialExtent::Compact, kappa: 4.0 }
    }
}

/// Boundary decay of a compact profile relative to its peak.
pub const COMPACT_TAIL: f64 = 1e-12;

struct Bump {
    dir: [f64; 3],
    kappa: f64,
    r0: f64,
    sigma: f64,
    coef: Vec<Complex<f64>>,
}

/// Deterministic smooth section built from Gaussian-times-von-Mises bumps.
pub fn random_test_section<T: Real>(rep: RepSpec, grid: Arc<Grid<T>>, seed: u64, profile: Profile) -> Section<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = match profile.kind {
        ProfileKind::GaussianBump => 1,
        ProfileKind::MultiBump => 3,
    };
    let d = rep.fiber_dim();
    let (a, b) = (grid.r_min, grid.r_max);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let bumps: Vec<Bump> = (0..nb)
        .map(|_| {
            let dir: [f64; 3] = UnitSphere.sample(&mut rng);
            let (r0, sigma) = match profile.radial {
                RadialExtent::Broad => (mid + half * rng.gen_range(-0.3..0.3), half * rng.gen_range(1.0..1.5)),
                // Half the tail leaves room for the peak falling between nodes.
                RadialExtent::Compact => (mid, half / (2.0 * (2.0 / COMPACT_TAIL).ln()).sqrt()),
            };
            let kappa = if nb == 1 { profile.kappa } else { profile.kappa * rng.gen_range(0.75..1.25) };
            let coef = (0..d)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            Bump { dir, kappa, r0, sigma, coef }
        })
        .collect();
    let mut data = vec![Complex::new(T::zero(), T::zero()); grid.len() * d];
    for node in 0..grid.len() {
        let (ir, it, ip) = grid.coords(node);
        let r = grid.r[ir].to_f64().unwrap();
        let n = grid.e_k(it, ip).map(|x| x.to_f64().unwrap());
        for bump in &bumps {
            let cosang = n[0] * bump.dir[0] + n[1] * bump.dir[1] + n[2] * bump.dir[2];
            let x = (r - bump.r0) / bump.sigma;
            let amp = (-0.5 * x * x + bump.kappa * (cosang - 1.0)).exp();
            for c in 0..d {
                let z = bump.coef[c] * amp;
                data[node * d + c] += Complex::new(cst(z.re), cst(z.im));
            }
        }
    }
    let s = Section { rep, grid, data };
    s.project_massless()
}

/// Real scalar field sampled from a function of the momentum vector.
pub fn scalar_field<T: Real>(grid: &Grid<T>, f: impl Fn([f64; 3]) -> f64) -> Vec<Complex<T>> {
    (0..grid.len())
        .map(|node| {
            let k = grid.k_vec(node).map(|x| x.to_f64().unwrap());
            Complex::new(cst(f(k)), T::zero())
        })
        .collect()
}
