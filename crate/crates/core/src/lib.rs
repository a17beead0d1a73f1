//! Time-frequency norms, metaplectic operators and quadratic-Hamiltonian
//! Schrödinger propagators on sampled grids.

pub mod bounds;
pub mod error;
pub mod explab;
pub mod field;
pub mod matrix;
pub mod metaplectic;
pub mod parallel;
pub mod symplectic;
pub mod tfnorm;
pub mod witness;

pub use error::{Error, Result};
pub use field::{Grid, SampledField};
pub use symplectic::{AlgebraElement, QuadraticForm, SymplecticMatrix};
