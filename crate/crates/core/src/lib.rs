//! Switch Markov chains on the Hamiltonian cycles and 2-factors of a dense graph,
//! together with the machinery needed to study them at desk scale:
//!
//! - [`graph`]: graphs, 2-factors, Hamiltonian cycles, symmetric differences and
//!   their canonical alternating-circuit decompositions.
//! - [`switch`]: the k-switch chain itself (proposal sampling, exact transition
//!   probabilities, trajectories).
//! - [`reconfigure`]: constructive reconfiguration between two Hamiltonian cycles
//!   (bounded composed switches) and between two 2-factors (4-switches).
//! - [`families`]: generators for the parity counterexample, the forced-path
//!   gadget, the locked two-cycle example, staircase graphs, and seeded random
//!   graphs with a minimum-degree floor.
//! - [`monotone`]: monotone bipartite graphs, the cut-and-glue map from 2-factors
//!   to path systems, its inverse, and the path-joining closure to a Hamiltonian
//!   cycle.
//! - [`js_chain`]: the auxiliary add/delete chain on almost-2-factors, its exact
//!   transition rationals, deficit-repair map, and stability measures.
//! - [`analysis`]: exhaustive enumeration, state graphs with exact rational
//!   transition matrices, connectivity checks, and exact/empirical mixing.

pub mod analysis;
pub mod error;
pub mod families;
pub mod graph;
pub mod io;
pub mod js_chain;
pub mod monotone;
pub mod reconfigure;
pub mod switch;

pub use error::Error;

/// Crate version string embedded in every serialized artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
