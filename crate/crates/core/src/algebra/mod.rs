//! Exact symbolic engine for the operator algebra generated by `H`, `P`, `J`
//! and `K`.

pub mod coeff;
pub mod expr;
pub mod named;
pub mod poly;
pub mod suite;
pub mod vector;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use coeff::ScalarCoeff;
pub use expr::{Algebra, OperatorExpr};
pub use suite::{identity_names, identity_suite, IdentityReport, IdentityResult, Mutation};
pub use vector::VectorExpr;

/// Whether `m` is a formal positive symbol or identically zero (`H = |P|`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Massive,
    Massless,
}

/// A basis generator. The derived order is the PBW order
/// `J1 < J2 < J3 < K1 < K2 < K3`; the index is zero-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    J(u8),
    K(u8),
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::J(0),
        Generator::J(1),
        Generator::J(2),
        Generator::K(0),
        Generator::K(1),
        Generator::K(2),
    ];

    pub fn axis(self) -> usize {
        match self {
            Generator::J(a) | Generator::K(a) => a as usize,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::J(a) => write!(f, "J[{}]", a + 1),
            Generator::K(a) => write!(f, "K[{}]", a + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgebraError {
    #[error("malformed coefficient: {0}")]
    MalformedCoefficient(String),
    #[error("evaluation pole: {0}")]
    Pole(String),
    #[error("generator word of length {len} exceeds the limit {max}")]
    TooLarge { len: usize, max: usize },
}
