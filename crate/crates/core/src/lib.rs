//! Connections, curvature and spin-orbital splittings on Poincaré particle
//! bundles: an exact operator algebra with a small expression language, and
//! a discretized momentum-space bundle for the numerical side.
//!
//! Numerical types are generic over [`bundle::Real`]; the aliases below fix
//! the scalar to `f64` or `f32`.

pub mod algebra;
pub mod bundle;
pub mod connection;
pub mod lang;
pub mod split;

pub use bundle::Real;

pub type Grid64 = bundle::Grid<f64>;
pub type Grid32 = bundle::Grid<f32>;
pub type Section64 = bundle::Section<f64>;
pub type Section32 = bundle::Section<f32>;
pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;
