//! Dicke Hamiltonian construction, exact diagonalization, convergence control
//! and the Tavis-Cummings limit.

mod convergence;
mod eigen;
mod hamiltonian;
mod parity;
mod tavis_cummings;

pub use convergence::*;
pub use eigen::*;
pub use hamiltonian::*;
pub use parity::*;
pub use tavis_cummings::*;
