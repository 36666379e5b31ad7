//! Exact diagonalization and chaos/thermalization diagnostics for the
//! spin-boson Dicke model.
//!
//! Energies are scaled by the pseudo-spin size throughout (`epsilon = E / j`).

pub mod basis_map;
pub mod classical;
pub mod entropy;
pub mod error;
pub mod eth;
pub mod linalg;
pub mod model;
pub mod params;
pub mod spectral;
pub mod spin;
pub mod stats;

pub use error::{DickeError, Result};
pub use params::{BasisKind, BasisSpec, ModelParams};
