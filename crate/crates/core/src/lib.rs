//! Exact trace moments of words in independent random permutation
//! matrices with restricted cycle lengths.
//!
//! The crate has five layers:
//!
//! - [`words`]: the free monoid on starred generators and the
//!   congruence induced by unitarity and cyclic orders.
//! - [`graphs`]: edge-colored directed graphs, word-graphs, quotients,
//!   congruence and strong-congruence enumeration, and the
//!   loop-characteristic.
//! - [`cyclecount`]: exact counting of permutations with cycle lengths
//!   in a set `A`, cycle/graph compatibility probabilities, and exact
//!   uniform sampling from `S_N^(A)`.
//! - [`trace`]: expected products of normalized traces
//!   `E(prod_a tr U_{w_a})`, by an exact congruence sum, by brute-force
//!   enumeration, and by Monte Carlo, plus freeness verdicts over a
//!   grid of matrix sizes.
//! - [`asympt`]: floating-point diagnostics confirming the asymptotic
//!   laws implied by the exact tables.
//!
//! All core computations are exact (big integers and rationals);
//! floating point appears only in diagnostics and Monte Carlo output.

pub mod asympt;
pub mod cyclecount;
pub mod error;
pub mod graphs;
pub mod numeric;
pub mod trace;
pub mod words;

pub use error::{Error, Result};

pub use cyclecount::{CountTable, CycleSet, PermutationSample, Sampler};
pub use graphs::{ColoredGraph, Edge, Partition, PathSummary, DEFAULT_VERTEX_BOUND};
pub use trace::{Engine, McEstimate, Model, TraceReport};
pub use words::{Letter, Order, Signature, Word};

pub use num_bigint::BigUint;
pub use num_rational::BigRational;
