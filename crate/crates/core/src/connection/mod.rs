//! Connections on the discretized bundles, their curvature, holonomy and
//! lattice Chern numbers.
//!
//! Two independent routes are kept apart on purpose: section-level actions
//! built from the generator actions, and the pointwise connection form used
//! by parallel transport.

mod apply;
mod chern;
mod form;
mod frame;
mod profile;

use serde::{Deserialize, Serialize};

use crate::bundle::BundleError;

pub use apply::{
    apply_connection, components, cross_commutator_check, curvature_commutator, leibniz_residual, CrossReport,
};


pub use chern::{chern_number, ChernOptions, ChernResult};
pub use form::{connection_form, helicity_eigenvector, holonomy, spin_coefficient, transport, Holonomy, HolonomyLoop, Path, TransportOptions};
pub(crate) use apply::contract;
pub use frame::TangentField;
pub use profile::FProfile;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConnectionKind {
    Boost,
    Rotation,
    /// `f D^K + (1 − f) D^R` with a radial weight.
    Affine(FProfile),
    /// `Affine(H/m)`; needs `m > 0`.
    FlatMassive,
}

impl ConnectionKind {
    /// Radial weight on the boost connection, `None` for the pure kinds.
    pub fn weight(&self) -> Option<FProfile> {
        match self {
            ConnectionKind::Boost => Some(FProfile::Constant(1.0)),
            ConnectionKind::Rotation => Some(FProfile::Constant(0.0)),
            ConnectionKind::Affine(f) => Some(f.clone()),
            ConnectionKind::FlatMassive => Some(FProfile::EnergyRatio(1.0)),
        }
    }
}

/// Deliberate modifications used as controls.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perturbation {
    #[default]
    None,
    /// Rotation part without its `P̂×J/|P|` term; not a connection.
    DropCross,
    /// Adds the endomorphism-valued form `A(X) = i c X·u` for a fixed `u`.
    Constant { c: f64, u: [f64; 3] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub kind: ConnectionKind,
    #[serde(default)]
    pub perturbation: Perturbation,
}

impl Connection {
    pub fn new(kind: ConnectionKind) -> Self {
        Connection { kind, perturbation: Perturbation::None }
    }

    pub fn perturbed(kind: ConnectionKind, perturbation: Perturbation) -> Self {
        Connection { kind, perturbation }
    }
}

impl From<ConnectionKind> for Connection {
    fn from(kind: ConnectionKind) -> Self {
        Connection::new(kind)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConnError {
    #[error(transparent)]
    Bundle(#[from] BundleError),
    #[error("singular limit: {0}")]
    SingularLimit(String),
    #[error("chart: {0}")]
    Chart(String),
    #[error("accuracy: {0}")]
    Accuracy(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
