//! Numerical certification of the bistochastic positive map family Λ_d on
//! d×d complex matrices: the map itself, its entanglement witness
//! `W_d = (id ⊗ Λ_d)(P⁺)`, a family of PPT entangled states detected by it,
//! and randomized certificates for positivity, nondecomposability and
//! optimality.

pub mod certificate;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod optimality;
pub mod posmap;
pub mod sampling;
pub mod states;
pub mod witness;

pub use certificate::{Bound, Certificate};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition};
pub use posmap::MapSpec;
pub use states::PptState;
pub use witness::{Normalization, Witness};

/// Largest supported `d`; witnesses are d²×d².
pub const MAX_DIM: usize = 32;
