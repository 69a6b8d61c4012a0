//! Graph invariants from operator commutation algebras.
//!
//! A graph `G` encodes which of a family of Hermitian involutions `O_α`
//! anticommute (edges) and which commute (non-edges). This crate computes the
//! invariants that bracket the worst-case squared norm `Ψ(G)` of
//! `Σ J_α O_α` over unit coefficient vectors:
//!
//! * [`independence`]: exact (weighted) independence number `α(G) ≤ Ψ(G)`;
//! * [`sdp`]: the Lovász theta function `ϑ(G) ≥ Ψ(G)` and the degree-2
//!   commutation-only relaxations for `H` and `H²`;
//! * [`pauli`], [`spectral`], [`psi`]: explicit Pauli-string representations
//!   and Lanczos norms giving certified lower bounds on `Ψ(G)`;
//! * [`fermion`]: SYK instances, free-fermion models and Wick evaluation;
//! * [`knapsack`]: the recursive least-singular-value bound for
//!   `O = c + Σ_i O_i` with single-qubit, possibly non-Hermitian terms.

pub mod capacity;
pub mod error;
pub mod fermion;
pub mod graph;
pub mod independence;
pub mod knapsack;
pub mod pauli;
pub mod psi;
pub mod rng;
pub mod sdp;
pub mod spectral;

pub use capacity::Capacity;
pub use error::{Error, Result};
pub use graph::{Graph, GraphFormat, WeightedGraph};
