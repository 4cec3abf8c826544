//! Quantum random walks on finite-dimensional counital C*-bialgebras.
//!
//! The crate builds walk steps ψ^(h) from implementing data (π, ξ, D),
//! forms their convolution iterates, embeds them into Fock space through
//! exact exponential-vector contractions, and compares the result with the
//! limiting convolution cocycle computed from its associated semigroups.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bialgebra;
pub mod cocycle;
pub mod convolution;
pub mod error;
pub mod experiment;
pub mod fock;
pub mod group;
pub mod io;
pub mod linalg;
pub mod opmap;
pub mod qsmaps;
pub mod tolerance;
pub mod walk;

pub use bialgebra::{
    build_function_algebra, build_group_algebra, verify_bialgebra, CounitalBialgebra,
};
pub use cocycle::{CocycleOracle, SemigroupSpec};
pub use error::{Error, Result};
pub use group::FiniteGroup;
pub use opmap::OperatorMap;
pub use qsmaps::{Character, HatSpace, ImplementingTriple};
