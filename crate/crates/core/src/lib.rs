//! Polynomial-sparsification kernel for q-Coloring on graphs that are a
//! matching plus `k` vertices.
//!
//! Given a graph `G` and a modulator `X` such that `G - X` has maximum
//! degree one, [`kernelize`] returns an equivalent subgraph with
//! `O(k^(2q-3))` vertices and edges. Colors are encoded as vectors of a
//! [`Palette`] over a prime field, graph constraints become low-degree
//! determinant polynomials in [`polyring`], and [`sparsifier`] keeps a
//! spanning subset of them.

pub mod cli;
pub mod dimacs;
pub mod field;
pub mod generator;
pub mod graph;
pub mod kernelizer;
pub mod oracle;
pub mod palette;
pub mod polyring;
pub mod selftest;
pub mod sparsifier;

pub use field::{Fe, FieldError, Matrix, PrimeField};
pub use graph::Graph;
pub use kernelizer::{
    check_extension_conditions, enumerate_constraints, extend_coloring, find_modulator, kernelize,
    validate_instance, KernelError, KernelInstance, KernelResult, KernelStats,
};
pub use oracle::{is_q_colorable, lemma7_equivalence, ColoringWitness, OracleLimits};
pub use palette::{Palette, PaletteError, PaletteKind};
pub use polyring::{Monomial, Poly, VarId};
pub use sparsifier::{ConstraintTag, EchelonBasis};
