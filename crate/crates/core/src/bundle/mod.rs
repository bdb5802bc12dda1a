//! Discretized momentum-space bundles and the generator actions on them.

mod grid;
mod io;
mod ops;
mod rep;
mod residual;
mod section;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

pub use grid::{make_grid, Grid};
pub use io::{read_section, read_section_bytes, section_bytes, sidecar_json, write_section, MAGIC};
pub use ops::{apply_generator, apply_vector, gradient, partials, Gen, Partials, Scheme, VecGen};
pub use rep::{RepKind, RepSpec};
pub use residual::{algebra_residual, family_residual, Family, Relation};
pub use section::{random_test_section, scalar_field, Profile, ProfileKind, RadialExtent, Section};

/// Floating scalar used by the numerical engine.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Send + Sync + Debug + Display + Default + 'static
{
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + NumAssign + Send + Sync + Debug + Display + Default + 'static
{
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BundleError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("sections live on different grids or reps")]
    Mismatch,
    #[error("transversality drift {drift:.3e} exceeds {tol:.3e} after {op}")]
    ConstraintDrift { op: String, drift: f64, tol: f64 },
    #[error("unknown relation {0:?}")]
    UnknownRelation(String),
    #[error("section format: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for BundleError {
    fn from(e: std::io::Error) -> Self {
        BundleError::Io(e.to_string())
    }
}

#[inline]
pub(crate) fn levi(a: usize, b: usize, c: usize) -> i32 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

#[inline]
pub fn cst<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 fits the scalar type")
}
