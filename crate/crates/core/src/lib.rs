//! Finite quantum groups, their idempotent states and quantum subhypergroups.
//!
//! Everything is computed from structure constants against a fixed basis.
//! See [`qgroup`] for the data model, [`states`] for functionals and the
//! Fourier transform, [`lattice`] for the order structure of idempotent states,
//! [`hypergroup`] for compressions by group-like projections and [`families`]
//! for the built-in examples.

pub mod error;
pub mod linalg;
pub mod qgroup;
pub mod states;
pub mod lattice;
pub mod families;
pub mod hypergroup;
pub mod io;

pub use error::{Error, Result};
pub use linalg::{CVector, ComplexMatrix, Tensor3, Tolerance, C64};
pub use qgroup::{FiniteQuantumGroup, QuantumStructure, StructureParts, TensorSquareElement};
