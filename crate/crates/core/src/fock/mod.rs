//! Truncated Fock-space simulator: exact matrices for a handful of modes, used as ground truth
//! for commutator identities, BCH defects, characteristic functions and Wick moments.

pub mod algebra;
pub mod checks;
pub mod operators;
pub mod state;
pub mod workspace;

pub use checks::*;
pub use operators::{
    build_hamiltonian, density_fluctuation, dynamics_commutator, order_fluctuation, zero_mode_fluctuation,
};
pub use state::{Factor, FiniteState};
pub use workspace::{FockMode, FockWorkspace, DEFAULT_CAP};
