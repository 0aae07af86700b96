//! Diagonalization of triangular sequence systems over a kernel configuration.

pub mod block;
pub mod pipeline;
pub mod rcf;
pub mod system;
pub mod term;

pub use block::{diagonalize_block, DiagonalizedBlock};
pub use pipeline::{diagonalize_system, verify_block_on_model, BlockCheck, Diagonalization, Substitution};
pub use rcf::{build_b, companion, rcf, Rcf};
pub use system::{
    derive_t_terms, is_bounded, step1_strip, validate_diagonal, validate_triangular, Binding, DiagonalSystem, FBlock,
    KeRow, LdRow, TriLdRow, TriRow, TriangularSystem, Violation,
};
pub use term::{reduce, LinearTerm, Relation, Sym};
