//! Exact algebra for kernel configurations of endomorphisms: polynomial arithmetic,
//! constraint normalization, finite models, the ring of definable operators and
//! the diagonalization of triangular sequence systems.

pub mod constructions;
pub mod diagonalize;
pub mod error;
pub mod factor;
pub mod field;
pub mod json;
pub mod kernel_config;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod random;
pub mod ring;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use kernel_config::{KernelConfiguration, Val};
pub use linalg::{Matrix, Subspace, Vector};
pub use model::EndoModel;
pub use poly::{Degree, Poly};
