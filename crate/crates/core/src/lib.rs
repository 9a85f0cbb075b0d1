pub mod asymptotics;
pub mod error;
pub mod fluctuations;
pub mod fock;
pub mod linalg;
pub mod model;
pub mod quasifree;

pub use error::{Error, Result};
pub use model::*;
