//! Saturation and behavioural equivalence checking for finite timed transition systems.
//!
//! Systems carry labelled, timed steps over one of three effect backends (non-deterministic,
//! quantale-weighted, convex-probabilistic). Saturating along a monoid homomorphism turns
//! strong steps into weak and/or time-abstract ones, after which every point of the
//! strong/weak, timed/untimed spectrum is a partition-refinement problem.

pub mod algebra;
pub mod error;
pub mod rational;

pub use error::{Error, Result};
pub mod effects;
pub mod linear;
pub mod random;
pub mod systems;
pub mod saturation;
pub mod equivalence;
pub mod timed_automata;
pub mod markov;
pub mod oracles;
pub mod fixtures;
