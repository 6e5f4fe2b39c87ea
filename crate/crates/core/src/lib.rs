//! Quantum-refereed nonlocality games.
//!
//! A referee sends question states `τ^s` to Alice and `ω^t` to Bob, who
//! answer with classical outcomes measured jointly on the question and their
//! share of a bipartite state. Orthogonal question sets give Bell games, an
//! orthogonal set on Alice's side only gives steering games, and
//! non-orthogonal sets on both sides give semiquantum games.
//!
//! Joint operators use the tensor order `A0, A, B, B0` throughout.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod appendixlab;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod fixtures;
pub mod games;
pub mod io;
pub mod maps;
pub mod qcore;
pub mod states;

pub use error::{Error, Result};
